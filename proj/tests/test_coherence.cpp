#include <cmath>
#include <random>

#include "csx/coherence.hpp"
#include "csx/errors.hpp"
#include "csx/topology.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace csx;

namespace {

// Direct pointwise g1 from the packet formula.
cd direct_g1(const MixedEnsemble& e, SpinPair p, double x, double xp, double t, double tp) {
  cd s{};
  for (std::size_t n = 0; n < e.size(); ++n) {
    s += e.weights[n] * std::conj(evaluate_packet(e.packets[n], p.first, x, t, {}, e.domain)) *
         evaluate_packet(e.packets[n], p.second, xp, tp, {}, e.domain);
  }
  return s;
}

}  // namespace

TEST_SUITE("coherence-eval") {

TEST_CASE("g1 structural invariants") {
  const auto d = fx::open_domain(96);
  for (const auto& ens : {fx::two_packet(d), fx::three_packet(d), fx::pure(d)}) {
    for (double t : {0.0, 1.3}) {
      const auto g = eval_g1(ens, d.axis(), d.axis(), t, t);
      const std::size_t n = d.n;
      double herm = 0.0, cs = 0.0, neg = 0.0;
      for (SpinPair p : all_spin_pairs()) {
        const auto& a = g.component(p);
        const auto& b = g.component({p.second, p.first});
        const auto& l = g.component({p.first, p.first});
        const auto& r = g.component({p.second, p.second});
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            herm = std::max(herm, std::abs(a(i, j) - std::conj(b(j, i))));
            cs = std::max(cs, std::norm(a(i, j)) - l(i, i).real() * r(j, j).real());
          }
          if (p.first == p.second) neg = std::max(neg, -a(i, i).real());
        }
      }
      CHECK(herm < 1e-12);
      CHECK(cs < 1e-12);
      CHECK(neg <= 1e-12);
    }
  }
}

TEST_CASE("g1 is a Gram matrix") {
  const auto ens = fx::three_packet();
  const CoherenceSampler g(ens, 0.8, 0.8);
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> pos(-6.0, 6.0), coef(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + trial % 6;
    std::vector<double> xs(m);
    std::vector<cd> c(m);
    std::vector<Spin> sp(m);
    for (int i = 0; i < m; ++i) {
      xs[i] = pos(rng);
      c[i] = {coef(rng), coef(rng)};
      sp[i] = (rng() & 1) ? Spin::kUp : Spin::kDown;
    }
    cd q{};
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) q += std::conj(c[i]) * c[j] * g({sp[i], sp[j]}, xs[i], xs[j]);
    CHECK(q.real() >= -1e-9);
    CHECK(std::abs(q.imag()) < 1e-12);
  }
}

TEST_CASE("coincidence reduction and pointwise agreement") {
  const auto d = fx::open_domain(64);
  const auto ens = fx::three_packet(d);
  const auto g = eval_g1(ens, d.axis(), d.axis(), 0.9, 0.4);
  for (std::size_t i = 0; i < d.n; i += 7) {
    const double x = d.axis().coordinate(i);
    for (SpinPair p : all_spin_pairs()) {
      for (std::size_t j = 0; j < d.n; j += 5) {
        const double xp = d.axis().coordinate(j);
        CHECK(std::abs(g.component(p)(i, j) - direct_g1(ens, p, x, xp, 0.9, 0.4)) < 1e-15);
      }
    }
    const auto eq = eval_g1(ens, d.axis(), d.axis(), 0.9, 0.9);
    for (Spin s : {Spin::kUp, Spin::kDown}) {
      double want = 0.0;
      for (std::size_t n = 0; n < ens.size(); ++n)
        want += ens.weights[n] * std::norm(evaluate_packet(ens.packets[n], s, x, 0.9, {}, d));
      CHECK(std::abs(eq.component({s, s})(i, i) - want) < 1e-12);
    }
  }
}

TEST_CASE("single nodeless member has a separable phase") {
  const auto d = fx::open_domain(128);
  const auto g = eval_g1(fx::pure(d), d.axis(), d.axis(), 0.7, 0.7);
  for (const auto& m : winding_maps(g)) {
    CHECK(m.nonzero() == 0);
    CHECK(m.cores.empty());
  }
}

TEST_CASE("g0 of one member") {
  const auto d = fx::open_domain(200);
  CHECK_THROWS_AS(eval_g0(fx::two_packet(d), d.axis(), 0.0), Error);
  const auto g = eval_g0(fx::two_packet(d), d.axis(), 0.0, 0);
  REQUIRE(g.values.size() == 2);
  // Phase slope 0.5 in both spins.
  for (const auto& a : g.values) {
    for (std::size_t i = 80; i < 120; ++i) {
      const double dphi = std::arg(a(i + 1, 0) / a(i, 0));
      CHECK(dphi / d.spacing() == doctest::Approx(0.5).epsilon(1e-10));
    }
  }
  const auto ens = fx::pure(d);
  const auto g2 = eval_g0(ens, d.axis(), 2.0);
  for (std::size_t i = 0; i < d.n; i += 9) {
    const double x = d.axis().coordinate(i);
    CHECK(g2.values[1](i, 0) == evaluate_packet(ens.packets[0], Spin::kDown, x, 2.0, {}, d));
  }
  MixedEnsemble still;
  still.domain = d;
  still.packets.push_back(normalize_packet({0.0, 0.0, 0.0, 1.0, 1.0}, d));
  still.weights = {1.0};
  const auto g3 = eval_g0(still, d.axis(), 0.0);
  for (const cd& z : g3.values[0].data()) {
    CHECK(z.real() > 0.0);
    CHECK(z.imag() == 0.0);
  }
}

TEST_CASE("g2 slices") {
  const auto d = fx::open_domain(64);
  using R = G2Coordinate::Role;
  SUBCASE("pure member factorizes") {
    const auto ens = fx::pure(d);
    const std::array<G2Coordinate, 4> c{{{R::kRow, 0, 0.5, Spin::kUp},
                                         {R::kFixed, 0.3, 0.5, Spin::kDown},
                                         {R::kColumn, 0, 0.5, Spin::kDown},
                                         {R::kFixed, -1.1, 0.5, Spin::kUp}}};
    const auto g2 = eval_g2(ens, d.axis(), d.axis(), c);
    const auto g1 = eval_g1(ens, d.axis(), d.axis(), 0.5, 0.5);
    const auto& p = ens.packets[0];
    const cd factor = std::conj(evaluate_packet(p, Spin::kDown, 0.3, 0.5, {}, d)) *
                      evaluate_packet(p, Spin::kUp, -1.1, 0.5, {}, d);
    for (std::size_t i = 0; i < d.n; i += 3)
      for (std::size_t j = 0; j < d.n; j += 3)
        CHECK(std::abs(g2.values[0](i, j) - g1.component({Spin::kUp, Spin::kDown})(i, j) * factor) < 1e-15);
  }
  SUBCASE("swap symmetry and coincident positivity") {
    const auto ens = fx::three_packet(d);
    const std::array<G2Coordinate, 4> a{{{R::kRow, 0, 0.2, Spin::kUp},
                                         {R::kFixed, 0.4, 0.2, Spin::kDown},
                                         {R::kColumn, 0, 0.2, Spin::kDown},
                                         {R::kFixed, 1.0, 0.2, Spin::kUp}}};
    const std::array<G2Coordinate, 4> b{{a[1], a[0], a[3], a[2]}};
    const auto ga = eval_g2(ens, d.axis(), d.axis(), a);
    const auto gb = eval_g2(ens, d.axis(), d.axis(), b);
    double diff = 0.0;
    for (std::size_t c = 0; c < ga.values[0].size(); ++c)
      diff = std::max(diff, std::abs(ga.values[0].data()[c] - gb.values[0].data()[c]));
    CHECK(diff < 1e-16);
    for (double x : {-2.0, 0.0, 1.5}) {
      for (Spin s : {Spin::kUp, Spin::kDown}) {
        const Axis one{x, 1.0, 1, false};
        const std::array<G2Coordinate, 4> c{{{R::kRow, 0, 0.0, s},
                                             {R::kFixed, x, 0.0, s},
                                             {R::kColumn, 0, 0.0, s},
                                             {R::kFixed, x, 0.0, s}}};
        const cd v = eval_g2(ens, one, one, c).values[0](0, 0);
        double want = 0.0;
        for (std::size_t n = 0; n < ens.size(); ++n)
          want += ens.weights[n] * std::pow(std::norm(evaluate_packet(ens.packets[n], s, x, 0.0, {}, d)), 2);
        CHECK(v.real() >= 0.0);
        CHECK(std::abs(v.imag()) < 1e-15);
        CHECK(v.real() == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
  SUBCASE("two-packet slice windings match refined loops") {
    const auto dd = fx::open_domain(128);
    const auto ens = fx::two_packet(dd);
    const std::array<G2Coordinate, 4> c{{{R::kRow, 0, 0.0, Spin::kUp},
                                         {R::kFixed, 0.0, 0.0, Spin::kUp},
                                         {R::kColumn, 0, 0.0, Spin::kUp},
                                         {R::kFixed, 0.0, 0.0, Spin::kUp}}};
    const auto g = eval_g2(ens, dd.axis(), dd.axis(), c);
    const auto slice = slice_of(g, std::size_t{0});
    const auto map = plaquette_winding(slice);
    const Sampler exact = [&](double u, double v) {
      cd s{};
      for (std::size_t n = 0; n < ens.size(); ++n) {
        const auto& p = ens.packets[n];
        const cd f0 = evaluate_packet(p, Spin::kUp, 0.0, 0.0, {}, dd);
        s += ens.weights[n] * std::conj(evaluate_packet(p, Spin::kUp, v, 0.0, {}, dd)) * std::conj(f0) *
             evaluate_packet(p, Spin::kUp, u, 0.0, {}, dd) * f0;
      }
      return s;
    };
    const double h = dd.spacing();
    std::size_t checked = 0;
    for (std::size_t r = 0; r + 1 < dd.n; ++r) {
      for (std::size_t col = 0; col + 1 < dd.n; ++col) {
        const bool near_core = map.charge(r, col) != 0 || (r % 17 == 3 && col % 13 == 5);
        if (!near_core || map.indeterminate(r, col)) continue;
        const Point2 centre{dd.axis().coordinate(col) + 0.5 * h, dd.axis().coordinate(r) + 0.5 * h};
        CHECK(loop_circulation(exact, square_loop(centre, 0.5 * h, 100)) == map.charge(r, col));
        ++checked;
      }
    }
    CHECK(map.nonzero() > 0);
    CHECK(checked > map.nonzero());
  }
}

TEST_CASE("full g2 volume is budget-guarded") {
  const auto d = fx::open_domain(8);
  const auto ens = fx::two_packet(d);
  const std::array<Spin, 4> s{Spin::kUp, Spin::kDown, Spin::kDown, Spin::kUp};
  CHECK_THROWS_AS(eval_g2_full(ens, d.axis(), {0, 0, 0, 0}, s, 1000), Error);
  const auto vol = eval_g2_full(ens, d.axis(), {0, 0, 0, 0}, s, 1 << 20);
  using R = G2Coordinate::Role;
  const std::array<G2Coordinate, 4> c{{{R::kRow, 0, 0, s[0]},
                                       {R::kFixed, d.axis().coordinate(2), 0, s[1]},
                                       {R::kColumn, 0, 0, s[2]},
                                       {R::kFixed, d.axis().coordinate(5), 0, s[3]}}};
  const auto slice = eval_g2(ens, d.axis(), d.axis(), c);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(vol.at(i, 2, j, 5) - slice.values[0](i, j)) < 1e-15);
}

TEST_CASE("degree of coherence") {
  const auto d = fx::open_domain(128);
  SUBCASE("pure state is fully coherent") {
    const auto dc = degree_of_coherence(eval_g1(fx::pure(d), d.axis(), d.axis(), 0.3, 0.3));
    for (std::size_t k = 0; k < dc.values.size(); ++k) {
      for (std::size_t c = 0; c < dc.values[k].size(); ++c) {
        if (!dc.defined[k].data()[c]) continue;
        CHECK(std::abs(dc.values[k].data()[c]) == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }
  SUBCASE("mixing lowers coherence, phase untouched") {
    const auto g = eval_g1(fx::two_packet(d), d.axis(), d.axis(), 0.0, 0.0);
    const auto dc = degree_of_coherence(g);
    double lowest = 1.0;
    for (std::size_t c = 0; c < dc.values[0].size(); ++c)
      if (dc.defined[0].data()[c]) lowest = std::min(lowest, std::abs(dc.values[0].data()[c]));
    CHECK(lowest < 0.5);
    double worst = 0.0;
    for (std::size_t k = 0; k < dc.values.size(); ++k) {
      const auto& src = g.values[k];
      for (std::size_t c = 0; c < src.size(); ++c) {
        if (!dc.defined[k].data()[c] || std::abs(src.data()[c]) == 0.0) continue;
        CHECK(std::abs(dc.values[k].data()[c]) <= 1.0 + 1e-9);
        worst = std::max(worst, std::abs(std::arg(dc.values[k].data()[c] / src.data()[c])));
      }
    }
    CHECK(worst < 1e-14);
  }
  SUBCASE("tails below the floor are flagged") {
    const auto dw = Domain1D{60.0, Boundary::kOpen, 241, -30.0};
    const auto dc = degree_of_coherence(eval_g1(fx::pure(dw), dw.axis(), dw.axis(), 0.0, 0.0));
    CHECK(dc.defined[0](0, 0) == 0);
    CHECK(dc.defined[0](120, 120) == 1);
  }
}

}  // TEST_SUITE
