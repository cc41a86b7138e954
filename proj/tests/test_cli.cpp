#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "csx/io.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = CSX_CONFIG_DIR;

fs::path root() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("csx_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(CSX_CLI_PATH) + " --quiet " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out(const std::string& name) { return (root() / name).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_with(const std::string& name, const std::string& extra) {
  const fs::path p = root() / name;
  std::ofstream(p) << slurp(kConfigs / "pure.cfg") << extra;
  return p.string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage and file errors map to exit codes") {
  CHECK(run("--out-dir " + out("h0") + " hierarchy 0 2") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("") == 2);
  CHECK(run("--out-dir " + out("bad") + " --config " + config_with("neg.cfg", "time.dt = -1\n") + " simulate") == 2);
  CHECK(run("--out-dir " + out("bad") + " --config " + config_with("zero.cfg", "time.dt = 0\n") + " simulate") == 2);
  CHECK(run("--out-dir " + out("bad") + " --config " + config_with("key.cfg", "colour = red\n") + " simulate") == 2);
  CHECK(run("--out-dir " + out("bad") + " simulate") == 2);
  CHECK(run("--out-dir " + out("bad") + " --config " + out("nowhere.cfg") + " simulate") == 3);
  CHECK(run("--out-dir " + out("bad") + " detect " + out("nowhere.csg")) == 3);
  CHECK(run("--out-dir " + out("bad") + " render " + out("nowhere.csg")) == 3);
}

TEST_CASE("hierarchy tables") {
  CHECK(run("--out-dir " + out("h") + " hierarchy") == 0);
  const std::string csv = slurp(root() / "h" / "hierarchy.csv");
  CHECK(csv.find("vortical") != std::string::npos);
  CHECK(fs::exists(root() / "h" / "hierarchy.txt"));
  CHECK(run("--out-dir " + out("h1") + " hierarchy 1 0") == 0);
  const std::string one = slurp(root() / "h1" / "hierarchy.csv");
  CHECK(one.find("solitonic") != std::string::npos);
}

TEST_CASE("pure state: simulate, detect, verify, determinism") {
  const std::string cfg = (kConfigs / "pure.cfg").string();
  REQUIRE(run("--threads 1 --out-dir " + out("pure_a") + " --config " + cfg + " simulate") == 0);
  REQUIRE(run("--threads 3 --out-dir " + out("pure_b") + " --config " + cfg + " simulate") == 0);
  const auto manifest = csx::read_manifest(root() / "pure_a" / "manifest.txt");
  REQUIRE(manifest.size() == 5);
  for (const auto& e : manifest) {
    CHECK(slurp(root() / "pure_a" / e.file) == slurp(root() / "pure_b" / e.file));
  }
  CHECK(slurp(root() / "pure_a" / "manifest.txt") == slurp(root() / "pure_b" / "manifest.txt"));

  const std::string last = (root() / "pure_a" / manifest.back().file).string();
  REQUIRE(run("--out-dir " + out("pure_det") + " detect " + last) == 0);
  const std::string cores = slurp(root() / "pure_det" / "cores.csv");
  CHECK(std::count(cores.begin(), cores.end(), '\n') == 1);

  CHECK(run("verify " + cfg) == 0);
  CHECK(run("verify --dump " + last) == 0);

  // Break Hermiticity in one sample.
  auto field = csx::read_dump(last);
  field.values[1](3, 7) += csx::cd{1e-3, 0.0};
  csx::write_dump(root() / "tampered.csg", field);
  CHECK(run("verify --dump " + out("tampered.csg")) == 1);

  CHECK(run("--out-dir " + out("pure_tr") + " trace " + out("pure_a/manifest.txt")) == 0);
  CHECK(fs::exists(root() / "pure_tr" / "conservation.txt"));
}

TEST_CASE("rendering") {
  const std::string cfg = (kConfigs / "pure.cfg").string();
  REQUIRE(run("--out-dir " + out("r") + " --config " + cfg + " simulate") == 0);
  CHECK(run("render " + out("r/slice_0000.csg") + " --kind density --out " + out("r/d.ppm")) == 0);
  CHECK(slurp(root() / "r" / "d.ppm").rfind("P6\n", 0) == 0);
  CHECK(run("render " + out("r/slice_0000.csg") + " --kind phase --out " + out("r/p.png")) == 0);
  CHECK(run("render " + out("r/slice_0000.csg") + " --kind texture --out " + out("r/x.png")) == 2);
}

TEST_CASE("two- and three-packet defects") {
  REQUIRE(run("--out-dir " + out("ab") + " --config " + (kConfigs / "two_packet.cfg").string() + " simulate") == 0);
  REQUIRE(run("--out-dir " + out("ab") + " detect " + out("ab/slice_0000.csg")) == 0);
  CHECK(slurp(root() / "ab" / "defects.csv").find("\"{1,1,1,1}\"") != std::string::npos);
  CHECK(slurp(root() / "ab" / "winding.csv").rfind("i,j,x,x_prime,m,spin_pair\n", 0) == 0);

  REQUIRE(run("--out-dir " + out("cd") + " --config " + (kConfigs / "three_packet.cfg").string() + " simulate") == 0);
  REQUIRE(run("--out-dir " + out("cd") + " detect " + out("cd/slice_0000.csg")) == 0);
  CHECK(slurp(root() / "cd" / "defects.csv").find("\"{0,-1,1,0}\"") != std::string::npos);

  CHECK(run("verify " + (kConfigs / "two_packet.cfg").string()) == 0);
}

TEST_CASE("tracing a short ring run") {
  const std::string cfg = (kConfigs / "ring_lines_short.cfg").string();
  REQUIRE(run("--out-dir " + out("f4") + " --config " + cfg + " simulate") == 0);
  CHECK(run("--out-dir " + out("f4") + " --config " + cfg + " trace " + out("f4/manifest.txt")) == 0);
  CHECK(slurp(root() / "f4" / "events.csv").find("creation") != std::string::npos);
  CHECK(slurp(root() / "f4" / "lines.csv").rfind("line_id,t,x,x_prime,m,spin_pair,topology", 0) == 0);
  // Without refinement the base step is too coarse.
  CHECK(run("--out-dir " + out("f4c") + " trace " + out("f4/manifest.txt")) == 2);
  CHECK(run("--out-dir " + out("f4c") + " trace " + out("f4/manifest.txt") + " --refine-depth 4") == 2);
  CHECK(run("verify " + cfg) == 0);

  // A one-slice run cannot be traced.
  const std::string single = config_with("single.cfg", "");
  std::string text = slurp(single);
  text.replace(text.find("time.end = 2"), 12, "time.end = 0");
  std::ofstream(single) << text;
  REQUIRE(run("--out-dir " + out("one") + " --config " + single + " simulate") == 0);
  CHECK(run("--out-dir " + out("one") + " trace " + out("one/manifest.txt")) == 2);
}

}  // TEST_SUITE
