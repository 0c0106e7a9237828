#include "twistrank/density.hpp"

#include <cmath>
#include <random>
#include <thread>

#include "twistrank/errors.hpp"

namespace twistrank {

long double alpha_normalizer() {
  static const long double P = [] {
    long double p = 1;
    for (int j = 0; j <= kProductTerms; ++j) p *= 1 + std::ldexp(1.0L, -j);
    return p;
  }();
  return P;
}

long double alpha(int d) {
  if (d < 2) return 0;
  const int n = d - 2;
  long double v = std::ldexp(1.0L, n);
  for (int j = 1; j <= n; ++j) v /= std::ldexp(1.0L, j) - 1;
  return v / alpha_normalizer();
}

long double alpha_by_partitions(int d) {
  if (d < 2) return 0;
  const int k = d - 2;
  // coef[i] = sum over i distinct parts among those processed of 2^-(sum).
  std::vector<long double> coef(static_cast<std::size_t>(k) + 1, 0);
  coef[0] = 1;
  for (int part = 0; part <= kPartitionParts; ++part) {
    const long double w = std::ldexp(1.0L, -part);
    for (int i = k; i >= 1; --i) coef[static_cast<std::size_t>(i)] += coef[static_cast<std::size_t>(i) - 1] * w;
  }
  return coef[static_cast<std::size_t>(k)] / alpha_normalizer();
}

long double F_eval(long double x) {
  long double p = x * x;
  for (int j = 0; j <= kProductTerms; ++j) p *= 1 + std::ldexp(x, -j);
  return p / alpha_normalizer();
}

long double F_pow2(int k) {
  if (k < 0) throw InvalidArgument("F_pow2: k must be nonnegative");
  long double v = std::ldexp(1.0L, 2 * k);
  for (int j = 1; j <= k; ++j) v *= 1 + std::ldexp(1.0L, j);
  return v;
}

AlphaTable AlphaTable::make(int dmax) {
  if (dmax < 0) throw InvalidArgument("AlphaTable: dmax must be nonnegative");
  AlphaTable t;
  t.dmax = dmax;
  for (int d = 0; d <= dmax; ++d) t.values.push_back(alpha(d));
  if (dmax >= 2) {
    // alpha_{d+1} / alpha_d = 2 / (2^(d-1) - 1) decreases in d, so the tail is
    // dominated by a geometric series from alpha_{dmax+1}.
    const long double r = alpha(dmax + 2) / alpha(dmax + 1);
    t.tail_bound = r < 1 ? alpha(dmax + 1) / (1 - r) : 1;
  }
  return t;
}

long double AlphaTable::partial_sum() const {
  long double s = 0;
  for (auto v : values) s += v;
  return s;
}

// ---------------------------------------------------------------------------

double PiEstimate::fraction(int d) const {
  if (samples == 0) return 0;
  const auto it = histogram.find(d);
  return it == histogram.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(samples);
}

double PiEstimate::standard_error(int d) const {
  if (samples == 0) return 0;
  const double p = fraction(d);
  return std::sqrt(p * (1 - p) / static_cast<double>(samples));
}

double PiEstimate::tv_distance_to_alpha() const {
  int top = 64;
  if (!histogram.empty()) top = std::max(top, histogram.rbegin()->first);
  double s = 0;
  for (int d = 0; d <= top; ++d) s += std::fabs(fraction(d) - static_cast<double>(alpha(d)));
  return s / 2;
}

FormalTwistModel sample_model(const TwistFamily& family, int n, std::uint64_t seed, std::uint64_t index) {
  if (n < 0) throw InvalidArgument("sample_model: n must be nonnegative");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  const std::uint32_t mask = family.residues().size() - 1;
  FormalTwistModel m;
  const auto un = static_cast<std::size_t>(n);
  m.classes.resize(un);
  for (auto& c : m.classes) c = static_cast<std::uint32_t>(rng()) & mask;
  m.legendre_bits.assign(un, std::vector<std::uint8_t>(un, 0));
  for (std::size_t i = 0; i < un; ++i) {
    for (std::size_t j = i + 1; j < un; ++j) {
      m.legendre_bits[i][j] = m.legendre_bits[j][i] = static_cast<std::uint8_t>(rng() >> 63);
    }
  }
  return m;
}

namespace {

/// Runs body(i) for i in [0, count) over `workers` threads with contiguous
/// shards; each shard fills its own histogram.
template <class Body>
std::map<int, std::uint64_t> sharded_histogram(std::uint64_t count, unsigned workers, Body body) {
  workers = std::max(1u, workers);
  std::vector<std::map<int, std::uint64_t>> parts(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](unsigned w) {
    try {
      const std::uint64_t lo = count * w / workers, hi = count * (w + 1) / workers;
      for (std::uint64_t i = lo; i < hi; ++i) ++parts[w][body(i)];
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::map<int, std::uint64_t> out;
  for (const auto& p : parts) {
    for (const auto& [d, c] : p) out[d] += c;
  }
  return out;
}

}  // namespace

PiEstimate pi_estimate(const TwistFamily& family, int n, std::uint64_t samples, std::uint64_t seed,
                       unsigned workers) {
  if (n < 0) throw InvalidArgument("pi_estimate: n must be nonnegative");
  if (samples < 1) throw InvalidArgument("pi_estimate: samples must be positive");
  PiEstimate est;
  est.n = n;
  est.samples = samples;
  est.seed = seed;
  auto& cache = LocalImageCache::global();
  est.histogram = sharded_histogram(samples, workers, [&](std::uint64_t i) {
    return selmer_rank_formal(family, sample_model(family, n, seed, i), cache);
  });
  return est;
}

PiEstimate pi_exhaustive(const TwistFamily& family, int n, unsigned workers) {
  if (n < 0) throw InvalidArgument("pi_exhaustive: n must be nonnegative");
  const int class_bits = family.residues().rank();
  const int pair_bits = n * (n - 1) / 2;
  const int total_bits = n * class_bits + pair_bits;
  if (total_bits > 22) throw BudgetExceeded("pi_exhaustive: 2^" + std::to_string(total_bits) + " configurations");
  const std::uint64_t count = std::uint64_t{1} << total_bits;
  const auto un = static_cast<std::size_t>(n);
  auto& cache = LocalImageCache::global();
  PiEstimate est;
  est.n = n;
  est.samples = count;
  est.histogram = sharded_histogram(count, workers, [&](std::uint64_t cfg) {
    FormalTwistModel m;
    const std::uint32_t mask = (1u << class_bits) - 1;
    for (std::size_t i = 0; i < un; ++i) {
      m.classes.push_back(static_cast<std::uint32_t>(cfg) & mask);
      cfg >>= class_bits;
    }
    m.legendre_bits.assign(un, std::vector<std::uint8_t>(un, 0));
    for (std::size_t i = 0; i < un; ++i) {
      for (std::size_t j = i + 1; j < un; ++j) {
        m.legendre_bits[i][j] = m.legendre_bits[j][i] = static_cast<std::uint8_t>(cfg & 1);
        cfg >>= 1;
      }
    }
    return selmer_rank_formal(family, m, cache);
  });
  return est;
}

}  // namespace twistrank
