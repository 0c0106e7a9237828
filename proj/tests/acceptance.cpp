// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "twistrank/charlab.hpp"
#include "twistrank/density.hpp"
#include "twistrank/harness.hpp"
#include "twistrank/selmer.hpp"

using namespace twistrank;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void verdict(int n, bool ok, const std::string& what, const std::string& detail, double seconds) {
  std::printf("%s criterion %d: %s [%s] (%.1fs)\n", ok ? "PASS" : "FAIL", n, what.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

const TwistFamily& congruent() {
  static const auto f = TwistFamily::make(std::array<std::int64_t, 3>{0, 1, -1});
  return f;
}

bool eligible(std::uint64_t b) { return is_squarefree(b) && std::gcd(b, congruent().D()) == 1; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Twists used by criteria 1 and 2, rechecked structurally in 3.
std::vector<std::int64_t> corpus1, corpus2;

void criterion1() {
  Timer t;
  int checked = 0, bad = 0;
  for (std::uint64_t b = 1; b <= 500; ++b) {
    if (!eligible(b)) continue;
    const auto sb = static_cast<std::int64_t>(b);
    corpus1.push_back(sb);
    const int r = selmer_rank(congruent(), sb).selmer_dim;
    const int cs = selmer_rank_charsum(congruent(), sb);
    const int co = oracle::selmer_rank_by_conics(congruent(), sb);
    if (r != cs || r != co) {
      ++bad;
      std::printf("  b=%lld: intersection %d, charsum %d, conics %d\n", static_cast<long long>(b), r, cs, co);
    }
    ++checked;
  }
  verdict(1, bad == 0 && checked > 0, "oracle equivalence, c=(0,1,-1), squarefree b<=500 coprime to D",
          fmt("%d twists, %d disagreements", checked, bad), t.seconds());
}

void criterion2() {
  Timer t;
  std::mt19937_64 rng(20240601);
  int bad = 0;
  while (corpus2.size() < 200) {
    const std::uint64_t b = 1 + rng() % 1000000;
    if (!eligible(b)) continue;
    const auto sb = static_cast<std::int64_t>(b);
    corpus2.push_back(sb);
    const int r = selmer_rank(congruent(), sb).selmer_dim;
    const int f = selmer_rank_formal(congruent(), FormalTwistModel::extract(congruent(), sb));
    if (r != f) {
      ++bad;
      std::printf("  b=%lld: real %d, formal %d\n", static_cast<long long>(b), r, f);
    }
  }
  verdict(2, bad == 0, "formal/real agreement on 200 random b<=1e6", fmt("%d disagreements", bad), t.seconds());
}

void criterion3() {
  Timer t;
  int bad_lagr = 0, bad_dim = 0, checked = 0;
  for (const auto* corpus : {&corpus1, &corpus2}) {
    for (auto b : *corpus) {
      const auto a = analyze_twist(congruent(), b);
      if (!is_lagrangian(a.U, a.space.form()) || !is_lagrangian(a.W, a.space.form())) ++bad_lagr;
      if (a.selmer.rank() < 2) ++bad_dim;
      ++checked;
    }
  }
  std::mt19937_64 rng(33);
  auto rnd = [&] {
    std::int64_t v = 0;
    while (v == 0) v = static_cast<std::int64_t>(rng() % 200001) - 100000;
    return v;
  };
  int bad_prod = 0;
  for (int k = 0; k < 10000; ++k) {
    const Rational x{rnd(), std::abs(rnd())}, y{rnd(), std::abs(rnd())};
    std::vector<std::uint64_t> ps{2};
    for (auto v : {x.num, x.den, y.num, y.den})
      for (auto q : prime_factors(static_cast<std::uint64_t>(std::abs(v)))) ps.push_back(q);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    int prod = hilbert_symbol(x, y, Place::infinity());
    for (auto q : ps) prod *= hilbert_symbol(x, y, Place::of_prime(q));
    if (prod != 1) ++bad_prod;
  }
  verdict(3, bad_lagr == 0 && bad_dim == 0 && bad_prod == 0, "U, W Lagrangian; dim >= 2; Hilbert product formula",
          fmt("%d twists: %d non-Lagrangian, %d with dim<2; 10000 rational pairs: %d product-formula failures", checked,
              bad_lagr, bad_dim, bad_prod),
          t.seconds());
}

DensityTable full_table;  // b <= 1e6, reused by criterion 9's spot check

void criterion4() {
  Timer t;
  int mismatches = 0, checked = 0;
  for (std::int64_t b = 1; b <= 10000; ++b) {
    if (!is_squarefree(static_cast<std::uint64_t>(b))) continue;
    for (std::int64_t s : {b, -b}) {
      if (parity_predict(congruent(), s).parity != selmer_rank(congruent(), s).parity) ++mismatches;
      ++checked;
    }
  }
  const auto& R = congruent().residues();
  std::uint32_t even = 0;
  for (std::uint32_t c = 0; c < R.size(); ++c) even += parity_for_class(congruent(), c) == 0;

  SweepConfig cfg;
  cfg.family = congruent();
  cfg.N = 1000000;
  full_table = sweep(cfg);
  const double ef = full_table.even_fraction();
  const bool ok = mismatches == 0 && even * 2 == R.size() && std::fabs(ef - 0.5) <= 0.01;
  verdict(4, ok, "parity law",
          fmt("%d of %d squarefree |b|<=1e4 mispredicted; %u of %u classes even; even fraction over %llu twists "
              "b<=1e6 = %.5f",
              mismatches, checked, even, R.size(), static_cast<unsigned long long>(full_table.total), ef),
          t.seconds());
}

void criterion5() {
  Timer t;
  long double s = 0;
  for (int d = 0; d <= 60; ++d) s += alpha(d);
  const bool sum_ok = s >= 1 - 1e-9L && s <= 1 + 1e-15L;  // rounding can land a few ulps above 1
  long double worst_part = 0;
  for (int d = 0; d <= 20; ++d) {
    const long double a = d < 2 ? 0 : alpha_by_partitions(d);
    worst_part = std::max(worst_part, std::fabs(a - alpha(d)));
  }
  const bool F_ok = F_eval(-1) == 0 && F_pow2(1) == 12 && F_pow2(2) == 240 && F_pow2(3) == 8640;
  long double worst_series = 0;
  for (int k = 1; k <= 3; ++k) {
    long double series = 0;
    for (int d = 0; d <= 60; ++d) series += alpha(d) * std::ldexp(1.0L, k * d);
    worst_series = std::max(worst_series, std::fabs(series - F_pow2(k)) / F_pow2(k));
  }
  const bool ok = sum_ok && worst_part <= 1e-9L && F_ok && worst_series <= 1e-6L;
  verdict(5, ok, "alpha/F identities",
          fmt("sum alpha - 1 = %.3Le; max |alpha - partitions| = %.3Le; F(-1)=%.1Lf F(2)=%.1Lf F(4)=%.1Lf F(8)=%.1Lf; "
              "max rel series error %.3Le",
              s - 1, worst_part, F_eval(-1), F_pow2(1), F_pow2(2), F_pow2(3), worst_series),
          t.seconds());
}

void criterion6() {
  Timer t;
  SweepConfig cfg;
  cfg.family = congruent();
  cfg.N = 1000000;
  cfg.window_filter = true;
  const auto tab = sweep(cfg);
  double worst = 0;
  std::string detail;
  for (int d = 2; d <= 4; ++d) {
    const double diff = tab.C(d) - static_cast<double>(alpha(d));
    worst = std::max(worst, std::fabs(diff));
    detail += fmt("C_%d=%.4f (alpha %.4f) ", d, tab.C(d), static_cast<double>(alpha(d)));
  }
  const double mean = tab.moment(1);
  detail += fmt("mean 2^dim=%.3f vs 12; %llu twists", mean, static_cast<unsigned long long>(tab.total));
  verdict(6, worst <= 0.10 && mean >= 8 && mean <= 16,
          "distribution diagnostic (non-binding: convergence in N is log-log slow)", detail, t.seconds());
}

void criterion7() {
  Timer t;
  const std::uint64_t samples = 100000;
  std::vector<double> tv;
  PiEstimate e20;
  for (int n : {5, 10, 20}) {
    auto e = pi_estimate(congruent(), n, samples, 7000 + static_cast<std::uint64_t>(n));
    tv.push_back(e.tv_distance_to_alpha());
    if (n == 20) e20 = e;
  }
  double worst = 0;
  for (int d = 0; d <= 5; ++d) worst = std::max(worst, std::fabs(e20.fraction(d) - static_cast<double>(alpha(d))));
  const bool mono = tv[0] > tv[1] && tv[1] > tv[2];

  // Exhaustive n = 3 against Monte Carlo: same support, fractions within 5 standard errors.
  const auto ex = pi_exhaustive(congruent(), 3);
  const auto mc = pi_estimate(congruent(), 3, samples, 4242);
  bool support = true;
  double worst_z = 0;
  for (const auto& [d, c] : ex.histogram) {
    if (!mc.histogram.count(d)) support = false;
    const double se = std::sqrt(ex.fraction(d) * (1 - ex.fraction(d)) / static_cast<double>(samples));
    worst_z = std::max(worst_z, std::fabs(mc.fraction(d) - ex.fraction(d)) / std::max(se, 1e-12));
  }
  for (const auto& [d, c] : mc.histogram)
    if (!ex.histogram.count(d)) support = false;
  const bool ok = worst <= 0.05 && mono && support && worst_z <= 5;
  verdict(7, ok, "Monte Carlo pi_d(n)",
          fmt("n=20: max_{d<=5} |pi-alpha| = %.4f; TV n=5,10,20: %.4f, %.4f, %.4f; exhaustive n=3 (%llu configs) vs "
              "MC: support %s, max z = %.2f",
              worst, tv[0], tv[1], tv[2], static_cast<unsigned long long>(ex.samples), support ? "equal" : "differs",
              worst_z),
          t.seconds());
}

CharSumSpec plain_spec(int n, std::uint64_t N) {
  CharSumSpec s;
  s.n = n;
  s.N = N;
  s.D = 24;
  s.chi.assign(static_cast<std::size_t>(n), Character{});
  s.d_matrix.assign(static_cast<std::size_t>(n), std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0));
  s.e_matrix = s.d_matrix;
  return s;
}

void criterion8() {
  Timer t;
  // exact examples
  const double seven = char_sum(plain_spec(2, 100)).value();
  std::int64_t primes = 0;
  for (std::uint64_t p = 2; p <= 10000; ++p) primes += oracle::is_prime_trial(p) && 24 % p != 0;
  const double n1 = char_sum(plain_spec(1, 10000)).value();
  double brute = 0;
  for (std::uint64_t p = 3; p <= 100; ++p)
    for (std::uint64_t q = 3; p * q <= 100; ++q)
      if (p != q && oracle::is_prime_trial(p) && oracle::is_prime_trial(q))
        brute += oracle::legendre_euler(static_cast<std::int64_t>(p), q);
  const auto one = [](std::uint64_t) { return 1.0; };
  const double lps = legendre_pair_sum(3, 100, one, one);
  const bool exact = seven == 7 && n1 == static_cast<double>(primes) && lps == brute;

  // reciprocity compensation on random specs
  std::mt19937_64 rng(88);
  static const std::vector<std::string> labels{"trivial", "mod4", "mod8:+", "mod8:-", "-3", "12", "-24"};
  int bad = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + static_cast<int>(rng() % 3);
    auto s = plain_spec(n, 20000);
    for (auto& c : s.chi) c = Character::parse(labels[rng() % labels.size()]);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        s.d_matrix[i][j] = s.d_matrix[j][i] = rng() & 1;
        s.e_matrix[i][j] = s.e_matrix[j][i] = rng() & 1;
      }
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do std::shuffle(perm.begin(), perm.end(), rng);
    while (std::is_sorted(perm.begin(), perm.end()));
    if (char_sum(permute_spec(s, perm, true)).numerator != char_sum(s).numerator) ++bad;
  }

  // decay with one active e-pair
  auto s = plain_spec(2, 1000);
  s.e_matrix[0][1] = s.e_matrix[1][0] = 1;
  std::vector<double> ratios;
  for (std::uint64_t N : {1000ull, 10000ull, 100000ull}) {
    s.N = N;
    ratios.push_back(std::fabs(char_sum(s).value()) / static_cast<double>(N));
  }
  const bool decay = ratios[0] > ratios[1] && ratios[1] > ratios[2];
  verdict(8, exact && bad == 0 && decay, "charlab exactness and decay",
          fmt("sum=%.0f (7); n=1: %.0f vs %lld primes; pair sum %.0f vs %.0f; %d/100 reciprocity failures; "
              "|sum|/N = %.4f, %.4f, %.4f",
              seven, n1, static_cast<long long>(primes), lps, brute, bad, ratios[0], ratios[1], ratios[2]),
          t.seconds());
}

void criterion9() {
  Timer t;
  const auto dir = fs::temp_directory_path() / "twistrank_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SweepConfig cfg;
  cfg.family = congruent();
  cfg.N = 200000;
  cfg.output = dir / "one.jsonl";
  cfg.workers = 1;
  const auto one = sweep(cfg);
  const auto bytes = slurp(*cfg.output);

  auto four = cfg;
  four.workers = 4;
  four.output = dir / "four.jsonl";
  const bool workers_same = sweep(four) == one && slurp(*four.output) == bytes;

  auto part = cfg;
  part.workers = 2;
  part.output = dir / "resumed.jsonl";
  part.stop_after = one.total / 2;
  sweep(part);
  {
    std::ofstream app(*part.output, std::ios::app);
    app << "{\"b\":";  // a half-written record, as after a crash
  }
  part.stop_after = 0;
  const auto resumed = resume(part);
  const bool resume_same = resumed == one && slurp(*part.output) == bytes;
  const AlphaTable at = AlphaTable::make(20);
  const bool report_same = report(resumed, at, ReportFormat::Csv) == report(one, at, ReportFormat::Csv);

  // The 1e6 table from criterion 4 equals its sharded recomputation.
  DensityTable shards = empty_table(1000000);
  for (std::uint64_t lo = 1; lo <= 1000000; lo += 250000) {
    SweepConfig c;
    c.family = congruent();
    c.N = 1000000;
    c.range_lo = lo;
    c.range_hi = lo + 249999;
    c.workers = 3;
    shards.merge(sweep(c));
  }
  const bool shard_same = shards == full_table;

  const auto s1 = pi_estimate(congruent(), 12, 20000, 5, 1);
  const auto s4 = pi_estimate(congruent(), 12, 20000, 5, 4);
  const bool sim_same = s1 == s4;
  fs::remove_all(dir);
  verdict(9, workers_same && resume_same && report_same && shard_same && sim_same, "reproducibility",
          fmt("workers 1 vs 4 %s; resume after interrupt %s; report %s; 4-shard 1e6 table %s; simulate 1 vs 4 workers %s",
              workers_same ? "identical" : "DIFFER", resume_same ? "identical" : "DIFFERS",
              report_same ? "identical" : "DIFFERS", shard_same ? "identical" : "DIFFERS",
              sim_same ? "identical" : "DIFFER"),
          t.seconds());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
