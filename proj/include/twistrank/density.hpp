#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "twistrank/selmer.hpp"

namespace twistrank {

/// Factors of prod_{j>=0} (1 + 2^-j x) beyond j = 64 are dropped; the
/// relative truncation error is below |x| 2^-63.
inline constexpr int kProductTerms = 64;

/// prod_{j=0}^{64} (1 + 2^-j).
long double alpha_normalizer();

/// alpha_{n+2} = 2^n / (prod_{j=1}^n (2^j - 1) * prod_{j>=0} (1 + 2^-j));
/// alpha_0 = alpha_1 = 0.
long double alpha(int d);

/// Sum over sets of d-2 distinct nonnegative parts of 2^-(sum of parts),
/// divided by the same normalizer. Computed as a coefficient of
/// prod_j (1 + t 2^-j) by dynamic programming over parts 0..kPartitionParts.
long double alpha_by_partitions(int d);
inline constexpr int kPartitionParts = 160;

/// F(x) = x^2 prod_j (1 + 2^-j x) / prod_j (1 + 2^-j).
long double F_eval(long double x);
/// F(2^k) = 2^(2k) prod_{j=1}^k (1 + 2^j), exact for k <= 12.
long double F_pow2(int k);

struct AlphaTable {
  int dmax = 0;
  std::vector<long double> values;  // alpha_0 .. alpha_dmax
  /// Upper bound on sum_{d > dmax} alpha_d.
  long double tail_bound = 1;

  static AlphaTable make(int dmax);
  long double partial_sum() const;
  long double at(int d) const { return d >= 0 && d <= dmax ? values[static_cast<std::size_t>(d)] : alpha(d); }
};

struct PiEstimate {
  int n = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::map<int, std::uint64_t> histogram;  // Selmer dimension -> count

  double fraction(int d) const;
  /// Binomial standard error of fraction(d).
  double standard_error(int d) const;
  /// (1/2) sum_d |fraction(d) - alpha_d|.
  double tv_distance_to_alpha() const;

  bool operator==(const PiEstimate&) const = default;
};

/// The i-th model drawn for a given seed: classes uniform in (Z/D)^*/squares,
/// Legendre bits uniform. Each sample has its own engine seeded from
/// (seed, i), so results do not depend on how samples are split across workers.
FormalTwistModel sample_model(const TwistFamily& family, int n, std::uint64_t seed, std::uint64_t index);

/// Monte Carlo estimate of pi_d(n). Samples are sharded across `workers`
/// threads and histograms merged.
PiEstimate pi_estimate(const TwistFamily& family, int n, std::uint64_t samples, std::uint64_t seed,
                       unsigned workers = 1);

/// Exact pi_d(n) by enumerating every configuration; histogram counts
/// configurations. Throws BudgetExceeded above 2^22 configurations.
PiEstimate pi_exhaustive(const TwistFamily& family, int n, unsigned workers = 1);

}  // namespace twistrank
