#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "skewdiff/config.hpp"

using namespace skewdiff;

TEST_CASE("fixture media validate cleanly") {
  for (const SkewConfig& cfg :
       {fixtures::brownian(), fixtures::skew(0.7), fixtures::bessel(0.5), fixtures::bessel(1.5),
        fixtures::counterexample(), fixtures::geometric_decay()}) {
    const auto rep = validate(cfg);
    INFO(cfg.name, ": ", rep.to_string());
    CHECK(rep.valid());
  }
}

TEST_CASE("validation rejects structural defects") {
  SkewConfig cfg = fixtures::brownian();
  SUBCASE("window edge disagrees with its tail family") {
    cfg.neg_partition.positions.back() = -0.4;  // family says -0.5 at k=2
    CHECK(!validate(cfg).valid());
  }
  SUBCASE("value count does not match the window") {
    cfg.pos_density.values.pop_back();
    CHECK(!validate(cfg).valid());
  }
  SUBCASE("densities must be positive") {
    cfg.pos_density.values[1] = -1.0;
    CHECK(!validate(cfg).valid());
  }
  SUBCASE("positions must keep the sign of their side") {
    cfg.neg_partition.positions[4] = 0.5;
    CHECK(!validate(cfg).valid());
  }
  SUBCASE("inner breakpoints must accumulate at 0") {
    cfg.pos_partition.inner_tail = TailFamily::constant(0.5);
    CHECK(!validate(cfg).valid());
  }
  SUBCASE("outer breakpoints must be unbounded") {
    cfg.pos_partition.outer_tail = TailFamily::power(2.0, 0.0);
    CHECK(!validate(cfg).valid());
  }
  SUBCASE("positions must be strictly increasing") {
    cfg.neg_partition.positions[2] = -1.6;
    CHECK(!validate(cfg).valid());
  }
  SUBCASE("side tags must match roles") {
    cfg.neg_density.side = Side::positive;
    CHECK(!validate(cfg).valid());
  }
}

TEST_CASE("non-integrable density near 0 is rejected") {
  SkewConfig cfg = fixtures::brownian();
  // density ~ k^2 toward 0 against spacings ~ k^-2: mass sum ~ 1/k diverges.
  cfg.neg_density.inner_tail = TailFamily::power(1.0, 2.0);
  cfg.neg_density.values[2] = 1.0;  // matches power(1,2) at k=1
  CHECK(!validate(cfg).valid());
}

TEST_CASE("partition lookup finds intervals and breakpoints everywhere") {
  const PartitionSpec p = fixtures::unit_partition(Side::negative);
  auto loc = p.locate(-1.0);  // inside (l_{-1}, l_0) = (-1.5, -1.25)? no: (-1.25, -0.75)
  CHECK(loc.k == 0);
  CHECK(!loc.at_breakpoint);
  loc = p.locate(-1.25);
  CHECK(loc.at_breakpoint);
  CHECK(loc.k == 0);
  loc = p.locate(-0.01);  // deep in the accumulation region
  CHECK(p.at(loc.k) <= -0.01);
  CHECK(p.at(loc.k + 1) > -0.01);
  loc = p.locate(-77.5);  // deep in the outer tail
  CHECK(p.at(loc.k) <= -77.5);
  CHECK(p.at(loc.k + 1) > -77.5);
  loc = p.locate(-77.0);  // exactly on an outer-tail breakpoint
  CHECK(loc.at_breakpoint);
  CHECK(p.at(loc.k) == -77.0);
}

TEST_CASE("density evaluation uses the symmetric breakpoint convention") {
  const SkewConfig cfg = fixtures::skew(0.7);
  // gamma = 3/7 on the left, gammabar = 1 on the right.
  CHECK(rho_eval(cfg, -0.3) == doctest::Approx(3.0 / 7.0).epsilon(1e-14));
  CHECK(rho_eval(cfg, 2.7) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rho_eval(cfg, 0.0) == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
  SkewConfig gd = fixtures::geometric_decay();
  // at l_{-1} = -1.5 the levels 0.5 and 1 meet.
  CHECK(rho_eval(gd, -1.5) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("density at 0 is undefined when a one-sided limit blows up") {
  CHECK_THROWS_AS((void)rho_eval(fixtures::bessel(0.5), 0.0), DomainError);
}

TEST_CASE("local time normalization factor") {
  const SkewConfig cfg = fixtures::skew(0.7);
  CHECK(revuz_factor(cfg, BreakpointRef::at_origin()) == doctest::Approx(7.0 / 5.0).epsilon(1e-14));
  const SkewConfig gd = fixtures::geometric_decay();
  // at l_{-1}: gamma_0 + gamma_{-1} = 1 + 0.5.
  CHECK(revuz_factor(gd, BreakpointRef::at_l(-1)) == doctest::Approx(2.0 / 1.5).epsilon(1e-14));
  CHECK_THROWS_AS((void)revuz_factor(fixtures::bessel(0.5), BreakpointRef::at_origin()),
                  DomainError);
}

TEST_CASE("interface weights and densities are mutually inverse") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    fixtures::Rand r(seed, 3);
    AlphaWindow an, ap;
    an.lo = -3;
    ap.lo = -2;
    for (int i = 0; i < 6; ++i) an.values.push_back(r.uni(0.1, 0.9));
    for (int i = 0; i < 5; ++i) ap.values.push_back(r.uni(0.1, 0.9));
    const double g0 = r.uni(0.2, 4.0), gb0 = r.uni(0.2, 4.0);
    const DensityPair dp = gammas_from_alphas(an, ap, g0, gb0);
    SkewConfig cfg = fixtures::brownian();
    cfg.neg_density = dp.neg;
    cfg.pos_density = dp.pos;
    for (Index j = an.lo; j <= an.hi(); ++j) {
      CHECK(alpha_at(cfg, Side::negative, j) == doctest::Approx(an.at(j)).epsilon(1e-12));
    }
    for (Index j = ap.lo; j <= ap.hi(); ++j) {
      CHECK(alpha_at(cfg, Side::positive, j) == doctest::Approx(ap.at(j)).epsilon(1e-12));
    }
    // Out-of-window interfaces are unskewed.
    CHECK(alpha_at(cfg, Side::negative, an.lo - 3) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(alpha_at(cfg, Side::positive, ap.hi() + 3) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("interface weights are invariant under density rescaling") {
  const SkewConfig base = fixtures::geometric_decay();
  SkewConfig scaled = base;
  for (auto* d : {&scaled.neg_density, &scaled.pos_density}) {
    for (double& v : d->values) v *= 13.0;
    d->inner_tail.scale *= 13.0;
    d->outer_tail.scale *= 13.0;
  }
  const AlphaReport a = alphas_from_gammas(base);
  const AlphaReport b = alphas_from_gammas(scaled);
  REQUIRE(a.alpha_neg.size() == b.alpha_neg.size());
  for (size_t i = 0; i < a.alpha_neg.size(); ++i) {
    CHECK(a.alpha_neg[i] == doctest::Approx(b.alpha_neg[i]).epsilon(1e-13));
  }
  REQUIRE(a.effective_alpha.has_value());
  REQUIRE(b.effective_alpha.has_value());
  CHECK(*a.effective_alpha == doctest::Approx(*b.effective_alpha).epsilon(1e-13));
}

TEST_CASE("effective interface weight at the accumulation point") {
  CHECK(*alphas_from_gammas(fixtures::brownian()).effective_alpha ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(*alphas_from_gammas(fixtures::skew(0.7)).effective_alpha ==
        doctest::Approx(0.7).epsilon(1e-14));
  // Left density blows up toward 0: all mass transmits to the finite side.
  const AlphaReport inf_left = alphas_from_gammas(fixtures::bessel(0.5));
  REQUIRE(inf_left.effective_alpha.has_value());
  CHECK(*inf_left.effective_alpha == 0.0);
  // Left density vanishes toward 0 while the right one stays at 1.
  const AlphaReport zero_left = alphas_from_gammas(fixtures::bessel(1.5));
  REQUIRE(zero_left.effective_alpha.has_value());
  CHECK(*zero_left.effective_alpha == 1.0);
  // Both vanish: the symmetric convention applies.
  SkewConfig both = fixtures::bessel(1.5);
  both.pos_density.inner_tail = TailFamily::power(1.0, -0.5);
  both.pos_density.values[0] = 1.0;
  const AlphaReport sym = alphas_from_gammas(both);
  REQUIRE(sym.effective_alpha.has_value());
  CHECK(*sym.effective_alpha == 0.5);
  // Both blow up: undefined, with an explanatory note.
  SkewConfig bad = fixtures::bessel(0.5);
  bad.pos_density.inner_tail = TailFamily::power(1.0, 0.5);
  bad.pos_density.values[0] = 1.0;
  const AlphaReport none = alphas_from_gammas(bad);
  CHECK(!none.effective_alpha.has_value());
  CHECK(!none.note.empty());
}

TEST_CASE("random generator only emits valid media") {
  for (uint64_t seed = 100; seed < 130; ++seed) {
    CHECK(validate(fixtures::random_config(seed)).valid());
    CHECK(validate(fixtures::random_scale_config(seed)).valid());
  }
}
