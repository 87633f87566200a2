#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "skewdiff/classifier.hpp"

using namespace skewdiff;

TEST_CASE("unskewed medium: recurrent conservative null-recurrent") {
  const auto rep = classify_all(fixtures::brownian());
  CHECK(rep.semimartingale == TriState::yes);
  CHECK(rep.scale_regular == TriState::yes);
  CHECK(rep.lgloc_holds == TriState::yes);
  CHECK(rep.h1.status == TriState::yes);
  CHECK(rep.conservative == TriState::yes);
  CHECK(rep.recurrent == TriState::yes);
  CHECK(rep.positive_recurrent == TriState::no);
  CHECK(rep.all_conclusive());
  CHECK(*rep.effective_alpha == doctest::Approx(0.5).epsilon(1e-14));
  // No interfaces carry weight: all three interface sums vanish.
  CHECK(rep.s0.partial_sum == 0.0);
  CHECK(rep.lgloc.partial_sum == 0.0);
}

TEST_CASE("single-interface skew medium keeps every Brownian verdict") {
  const auto rep = classify_all(fixtures::skew(0.7));
  CHECK(rep.semimartingale == TriState::yes);
  CHECK(rep.scale_regular == TriState::yes);
  CHECK(rep.conservative == TriState::yes);
  CHECK(rep.recurrent == TriState::yes);
  CHECK(rep.positive_recurrent == TriState::no);
  CHECK(*rep.effective_alpha == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("density blowing up toward 0 breaks the value-variation sum") {
  const auto rep = classify_all(fixtures::bessel(0.5));
  CHECK(rep.semimartingale == TriState::no);
  CHECK(rep.scale_regular == TriState::yes);
  CHECK(rep.lgloc_holds == TriState::no);
  CHECK(rep.h1.status == TriState::unknown);
  // The advanced criteria need both variation conditions.
  CHECK(rep.conservative == TriState::unknown);
  CHECK(rep.recurrent == TriState::unknown);
  CHECK(!rep.all_conclusive());
  CHECK(!rep.notes.empty());
}

TEST_CASE("density vanishing toward 0 breaks the reciprocal sum") {
  const auto rep = classify_all(fixtures::bessel(1.5));
  CHECK(rep.semimartingale == TriState::yes);
  CHECK(rep.scale_regular == TriState::no);
  CHECK(rep.lgloc_holds == TriState::no);
  CHECK(rep.conservative == TriState::unknown);
}

TEST_CASE("interface deviation sum agrees with value-and-reciprocal summability") {
  // lgloc converges exactly when both variation sums do, whenever conclusive.
  int checked = 0;
  for (uint64_t seed = 0; seed < 60; ++seed) {
    const SkewConfig cfg = fixtures::random_config(seed);
    const auto s0 = check_S0(cfg);
    const auto s1 = check_S1(cfg);
    const auto lg = check_LGloc(cfg);
    if (!s0.conclusive() || !s1.conclusive() || !lg.conclusive()) continue;
    ++checked;
    CHECK(lg.converges() == (s0.converges() && s1.converges()));
  }
  CHECK(checked >= 40);
}

TEST_CASE("variation sums match brute-force partial sums") {
  const SkewConfig cfg = fixtures::bessel(1.5);
  const auto s0 = check_S0(cfg);
  REQUIRE(s0.converges());
  // Left inner half axis: sum_{k>=0} |g(k+1)-g(k)| to depth 10^6 plus the
  // monotone remainder g(10^6).
  double brute = 0.0;
  for (Index k = 0; k < 1000000; ++k) {
    brute += std::abs(cfg.gamma(k + 1) - cfg.gamma(k));
  }
  brute += cfg.gamma(1000000);
  CHECK(s0.value_or_bound() == doctest::Approx(brute).epsilon(1e-9));
}

TEST_CASE("runaway boundary is detected on the fast-growing side") {
  const auto rep = classify_all(fixtures::counterexample());
  CHECK(rep.semimartingale == TriState::yes);
  CHECK(rep.scale_regular == TriState::yes);
  CHECK(rep.conservative == TriState::no);
  CHECK(rep.recurrent == TriState::no);
  CHECK(rep.positive_recurrent == TriState::no);
  CHECK(rep.all_conclusive());
  // The right boundary sum converges; the Brownian left one diverges.
  CHECK(rep.conservative_series.pos.converges());
  CHECK(rep.conservative_series.neg.diverges());
}

TEST_CASE("geometrically decaying density is positive recurrent") {
  const auto rep = classify_all(fixtures::geometric_decay());
  CHECK(rep.conservative == TriState::yes);
  CHECK(rep.recurrent == TriState::yes);
  CHECK(rep.positive_recurrent == TriState::yes);
  REQUIRE(rep.invariant_mass.has_value());

  // Brute-force mass: sum density * spacing over both half lines; the inner
  // remainders telescope against the constant level 1 near 0.
  const SkewConfig cfg = fixtures::geometric_decay();
  double brute = 0.0;
  for (Index k = -2000; k < 400; ++k) {
    brute += cfg.gamma(k + 1) * (cfg.l(k + 1) - cfg.l(k));
  }
  brute += -cfg.l(400);
  for (Index k = -400; k < 2000; ++k) {
    brute += cfg.gammabar(k + 1) * (cfg.r(k + 1) - cfg.r(k));
  }
  brute += cfg.r(-400);
  CHECK(*rep.invariant_mass == doctest::Approx(brute).epsilon(1e-8));
}

TEST_CASE("boundary verdicts do not depend on the base index") {
  for (const SkewConfig& cfg :
       {fixtures::brownian(), fixtures::skew(0.3), fixtures::counterexample(),
        fixtures::geometric_decay()}) {
    ClassifyOptions o1, o2, o5;
    o1.n0 = 1;
    o2.n0 = 2;
    o5.n0 = 5;
    const auto v1 = check_conservative(cfg, o1);
    const auto v2 = check_conservative(cfg, o2);
    const auto v5 = check_conservative(cfg, o5);
    CHECK(v1.pos.status == v2.pos.status);
    CHECK(v2.pos.status == v5.pos.status);
    CHECK(v1.neg.status == v2.neg.status);
    CHECK(v2.neg.status == v5.neg.status);
  }
}

TEST_CASE("advanced criteria refuse media without both variation conditions") {
  CHECK_THROWS_AS((void)check_conservative(fixtures::bessel(0.5)), PreconditionError);
  CHECK_THROWS_AS((void)check_recurrent(fixtures::bessel(1.5)), PreconditionError);
}

TEST_CASE("mass query refuses transient media") {
  CHECK_THROWS_AS((void)check_positive_recurrent(fixtures::counterexample()), PreconditionError);
}

TEST_CASE("implication chain holds on random scale-friendly media") {
  for (uint64_t seed = 500; seed < 540; ++seed) {
    const auto rep = classify_all(fixtures::random_scale_config(seed));
    if (rep.positive_recurrent == TriState::yes) CHECK(rep.recurrent == TriState::yes);
    if (rep.recurrent == TriState::yes) CHECK(rep.conservative != TriState::no);
    if (rep.conservative == TriState::no) CHECK(rep.recurrent != TriState::yes);
  }
}
