#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "twistrank/density.hpp"
#include "twistrank/errors.hpp"

using namespace twistrank;

namespace {

const TwistFamily& congruent() {
  static const auto f = TwistFamily::make(std::array<std::int64_t, 3>{0, 1, -1});
  return f;
}

}  // namespace

TEST_CASE("alpha values") {
  CHECK(alpha(0) == 0);
  CHECK(alpha(1) == 0);
  // Values carried to six places; tolerance covers the last rounded digit.
  CHECK(std::fabs(static_cast<double>(alpha(2)) - 0.209712) < 1e-5);
  CHECK(std::fabs(static_cast<double>(alpha(3)) - 0.419424) < 1e-5);
  CHECK(std::fabs(static_cast<double>(alpha(4)) - 0.279616) < 1e-5);
  CHECK(alpha(3) == doctest::Approx(static_cast<double>(2 * alpha(2))).epsilon(1e-15));
  CHECK(alpha_normalizer() == doctest::Approx(static_cast<double>(oracle::alpha_normalizer_euler())).epsilon(1e-15));
}

TEST_CASE("alpha sums to one and decays") {
  long double s = 0;
  for (int d = 0; d <= 60; ++d) s += alpha(d);
  CHECK(s <= 1.0L + 1e-15L);
  CHECK(s >= 1.0L - 1e-9L);
  for (int d = 3; d < 30; ++d) {
    CHECK(alpha(d + 1) < alpha(d));
    // alpha_d 2^((d-2)(d-3)/2) stays bounded
    const long double scaled = alpha(d) * std::ldexp(1.0L, (d - 2) * (d - 3) / 2);
    CHECK(scaled < 2.0L);
  }
  long double alt = 0;
  for (int d = 0; d <= 60; ++d) alt += (d % 2 ? -1 : 1) * alpha(d);
  CHECK(std::fabs(static_cast<double>(alt)) < 1e-15);
}

TEST_CASE("alpha_by_partitions") {
  const long double P = oracle::alpha_normalizer_euler();
  CHECK(alpha_by_partitions(2) == doctest::Approx(static_cast<double>(1 / P)).epsilon(1e-14));
  CHECK(alpha_by_partitions(3) == doctest::Approx(static_cast<double>(2 / P)).epsilon(1e-14));
  for (int d = 2; d <= 20; ++d) CHECK(std::fabs(static_cast<double>(alpha_by_partitions(d) - alpha(d))) < 1e-9);
}

TEST_CASE("F") {
  CHECK(F_eval(-1) == 0);
  CHECK(F_pow2(1) == 12);
  CHECK(F_pow2(2) == 240);
  CHECK(F_pow2(3) == 8640);
  CHECK(F_eval(1) == doctest::Approx(1).epsilon(1e-15));
  for (int k = 1; k <= 3; ++k) {
    long double series = 0;
    for (int d = 0; d <= 60; ++d) series += alpha(d) * std::ldexp(1.0L, k * d);
    const long double f = F_pow2(k);
    CHECK(std::fabs(static_cast<double>((series - f) / f)) < 1e-6);
    CHECK(F_eval(std::ldexp(1.0L, k)) == doctest::Approx(static_cast<double>(f)).epsilon(1e-12));
  }
}

TEST_CASE("AlphaTable") {
  const auto t = AlphaTable::make(12);
  CHECK(t.values.size() == 13);
  CHECK(t.partial_sum() <= 1);
  CHECK(1 - t.partial_sum() <= t.tail_bound);
  CHECK(t.at(5) == alpha(5));
  CHECK(t.at(40) == alpha(40));
  CHECK_THROWS_AS(AlphaTable::make(-1), InvalidArgument);
}

TEST_CASE("pi_estimate basics") {
  const auto& f = congruent();
  const auto e0 = pi_estimate(f, 0, 50, 7);
  CHECK(e0.histogram.size() == 1);
  CHECK(e0.histogram.at(selmer_rank(f, 1).selmer_dim) == 50);
  const auto a = pi_estimate(f, 6, 3000, 99);
  const auto b = pi_estimate(f, 6, 3000, 99, 3);
  CHECK(a == b);
  std::uint64_t total = 0;
  for (const auto& [d, c] : a.histogram) {
    total += c;
    CHECK(d >= 2);
  }
  CHECK(total == 3000);
  CHECK(a.fraction(3) + a.fraction(2) <= 1.0);
  CHECK(a.standard_error(3) > 0);
  CHECK_FALSE(pi_estimate(f, 6, 3000, 100) == a);
}

TEST_CASE("sample_model is reproducible per index") {
  const auto& f = congruent();
  CHECK(sample_model(f, 5, 1, 17) == sample_model(f, 5, 1, 17));
  const auto m = sample_model(f, 5, 1, 17);
  m.validate(f);
  CHECK(m.n() == 5);
}

TEST_CASE("pi_exhaustive agrees with Monte Carlo") {
  const auto& f = congruent();
  const auto ex = pi_exhaustive(f, 2);
  // 2 classes bits per prime (mod 8 classes: 4 each), one Legendre bit
  CHECK(ex.samples == 4 * 4 * 2);
  const auto mc = pi_estimate(f, 2, 20000, 3);
  for (const auto& [d, c] : mc.histogram) CHECK(ex.histogram.count(d) == 1);
  for (const auto& [d, c] : ex.histogram) {
    CHECK(mc.histogram.count(d) == 1);
    CHECK(std::fabs(mc.fraction(d) - ex.fraction(d)) < 5 * mc.standard_error(d) + 1e-3);
  }
  CHECK_THROWS_AS(pi_exhaustive(TwistFamily::make(std::array<std::int64_t, 3>{0, 2, 7}), 6), BudgetExceeded);
}

TEST_CASE("pi_exhaustive equals direct enumeration of formal models") {
  const auto f = TwistFamily::make(std::array<std::int64_t, 3>{0, 1, 3});
  const auto ex = pi_exhaustive(f, 1);
  std::map<int, std::uint64_t> h;
  for (std::uint32_t c = 0; c < f.residues().size(); ++c) {
    FormalTwistModel m;
    m.classes = {c};
    m.legendre_bits = {{0}};
    ++h[selmer_rank_formal(f, m)];
  }
  CHECK(ex.histogram == h);
}
