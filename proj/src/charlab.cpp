#include "twistrank/charlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "twistrank/arith.hpp"
#include "twistrank/errors.hpp"

namespace twistrank {

Character Character::parse(const std::string& label) {
  Character c;
  c.label = label;
  if (label == "trivial") {
    c.discriminant = 1;
  } else if (label == "mod4") {
    c.discriminant = -4;
  } else if (label == "mod8:+") {
    c.discriminant = 8;
  } else if (label == "mod8:-") {
    c.discriminant = -8;
  } else {
    try {
      std::size_t used = 0;
      c.discriminant = std::stoll(label, &used);
      if (used != label.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw InvalidArgument("unknown character label: " + label);
    }
    const auto r = ((c.discriminant % 4) + 4) % 4;
    if (c.discriminant == 0 || (r != 0 && r != 1)) {
      throw InvalidArgument("character discriminant must be nonzero and 0 or 1 mod 4: " + label);
    }
  }
  return c;
}

std::uint64_t Character::modulus() const {
  return static_cast<std::uint64_t>(discriminant < 0 ? -discriminant : discriminant);
}

int Character::operator()(std::uint64_t p) const { return kronecker(discriminant, p); }

// ---------------------------------------------------------------------------

void CharSumSpec::validate() const {
  if (n < 1) throw InvalidArgument("CharSumSpec: n must be positive");
  if (N < 1) throw InvalidArgument("CharSumSpec: N must be positive");
  if (D == 0 || D % 4 != 0) throw InvalidArgument("CharSumSpec: D must be divisible by 4");
  const auto un = static_cast<std::size_t>(n);
  if (chi.size() != un) throw InvalidArgument("CharSumSpec: need one character per index");
  for (const auto& c : chi) {
    if (D % c.modulus() != 0) throw InvalidArgument("CharSumSpec: character " + c.label + " has modulus not dividing D");
  }
  for (const auto* mat : {&d_matrix, &e_matrix}) {
    if (mat->size() != un) throw InvalidArgument("CharSumSpec: matrix has wrong size");
    for (std::size_t i = 0; i < un; ++i) {
      if ((*mat)[i].size() != un) throw InvalidArgument("CharSumSpec: matrix is not square");
      if ((*mat)[i][i] != 0) throw InvalidArgument("CharSumSpec: nonzero diagonal");
      for (std::size_t j = 0; j < un; ++j) {
        if ((*mat)[i][j] > 1) throw InvalidArgument("CharSumSpec: entries must be 0 or 1");
        if ((*mat)[i][j] != (*mat)[j][i]) throw InvalidArgument("CharSumSpec: matrix is not symmetric");
      }
    }
  }
}

int CharSumSpec::m() const {
  int count = 0;
  const auto un = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i < un; ++i) {
    const bool some_e = std::any_of(e_matrix[i].begin(), e_matrix[i].end(), [](auto v) { return v != 0; });
    const bool no_d = std::all_of(d_matrix[i].begin(), d_matrix[i].end(), [](auto v) { return v == 0; });
    const auto mod = chi[i].modulus();
    if (some_e || 4 % mod != 0 || (mod == 4 && no_d)) ++count;
  }
  return count;
}

CharSumSpec CharSumSpec::from_json(const nlohmann::json& j) {
  CharSumSpec s;
  try {
    s.n = j.at("n").get<int>();
    s.N = j.at("N").get<std::uint64_t>();
    s.D = j.at("D").get<std::uint64_t>();
    const auto un = static_cast<std::size_t>(std::max(s.n, 0));
    if (j.contains("chi")) {
      for (const auto& c : j.at("chi")) {
        s.chi.push_back(Character::parse(c.is_string() ? c.get<std::string>() : std::to_string(c.get<std::int64_t>())));
      }
    } else {
      s.chi.assign(un, Character{});
    }
    auto matrix = [&](const char* key) {
      if (!j.contains(key)) return std::vector<std::vector<std::uint8_t>>(un, std::vector<std::uint8_t>(un, 0));
      return j.at(key).get<std::vector<std::vector<std::uint8_t>>>();
    };
    s.d_matrix = matrix("d_matrix");
    s.e_matrix = matrix("e_matrix");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("CharSumSpec: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::json CharSumSpec::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["N"] = N;
  j["D"] = D;
  auto labels = nlohmann::json::array();
  for (const auto& c : chi) labels.push_back(c.label);
  j["chi"] = labels;
  j["d_matrix"] = d_matrix;
  j["e_matrix"] = e_matrix;
  return j;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

/// Calls visit(primes) for each squarefree b <= N coprime to D with exactly
/// n prime factors, in ascending order of b.
template <class Visit>
std::uint64_t for_each_tuple(int n, std::uint64_t N, std::uint64_t D, std::uint64_t per_tuple, std::uint64_t budget,
                             Visit visit) {
  if (n > 12) throw BudgetExceeded("too-large: n = " + std::to_string(n));
  const FactorSieve sieve(N);
  std::vector<std::uint32_t> primes;
  std::uint64_t tuples = 0;
  for (std::uint64_t b = 2; b <= N; ++b) {
    if (std::gcd(b, D) != 1) continue;
    if (!sieve.squarefree_factors(b, primes)) continue;
    if (static_cast<int>(primes.size()) != n) continue;
    if (++tuples > budget / per_tuple) throw BudgetExceeded("too-large: more than " + std::to_string(budget) + " terms");
    visit(primes);
  }
  return tuples;
}

}  // namespace

CharSumResult char_sum(const CharSumSpec& spec, std::uint64_t budget) {
  spec.validate();
  const int n = spec.n;
  const auto un = static_cast<std::size_t>(n);
  CharSumResult res;
  res.n_factorial = factorial(n);
  res.m = spec.m();
  std::vector<int> perm(un);
  std::vector<std::uint8_t> chibit(un * un), eps(un), leg(un * un);
  res.tuples = for_each_tuple(n, spec.N, spec.D, res.n_factorial, budget, [&](const std::vector<std::uint32_t>& q) {
    for (std::size_t k = 0; k < un; ++k) {
      eps[k] = static_cast<std::uint8_t>(epsilon(q[k]));
      for (std::size_t i = 0; i < un; ++i) chibit[i * un + k] = spec.chi[i](q[k]) == -1;
      for (std::size_t l = 0; l < un; ++l) leg[k * un + l] = k != l && jacobi(q[k], q[l]) == -1;
    }
    std::iota(perm.begin(), perm.end(), 0);
    do {
      unsigned bit = 0;
      for (std::size_t i = 0; i < un; ++i) {
        const auto a = static_cast<std::size_t>(perm[i]);
        bit ^= chibit[i * un + a];
        for (std::size_t j = i + 1; j < un; ++j) {
          const auto b = static_cast<std::size_t>(perm[j]);
          bit ^= spec.d_matrix[i][j] & eps[a] & eps[b];
          bit ^= spec.e_matrix[i][j] & leg[a * un + b];
        }
      }
      res.numerator += bit ? -1 : 1;
    } while (std::next_permutation(perm.begin(), perm.end()));
  });
  return res;
}

CharSumSpec permute_spec(const CharSumSpec& spec, const std::vector<int>& perm, bool compensate) {
  spec.validate();
  const auto un = static_cast<std::size_t>(spec.n);
  std::vector<int> check = perm;
  std::sort(check.begin(), check.end());
  bool ok = check.size() == un;
  for (std::size_t i = 0; ok && i < un; ++i) ok = check[i] == static_cast<int>(i);
  if (!ok) throw InvalidArgument("permute_spec: not a permutation");
  CharSumSpec out = spec;
  for (std::size_t k = 0; k < un; ++k) {
    const auto a = static_cast<std::size_t>(perm[k]);
    out.chi[k] = spec.chi[a];
    for (std::size_t l = 0; l < un; ++l) {
      const auto b = static_cast<std::size_t>(perm[l]);
      out.d_matrix[k][l] = spec.d_matrix[a][b];
      out.e_matrix[k][l] = spec.e_matrix[a][b];
      // Pair (k < l) now reads (p_a / p_b) where the original read (p_b / p_a).
      if (compensate && k != l && spec.e_matrix[a][b] && (a > b) == (k < l)) out.d_matrix[k][l] ^= 1;
    }
  }
  return out;
}

double ClassGapResult::gap() const { return std::fabs(tuple_average - main_term); }

ClassGapResult class_average_gap(const std::vector<double>& f, int n, std::uint64_t N, std::uint64_t D,
                                 std::uint64_t budget) {
  if (n < 1) throw InvalidArgument("class_average_gap: n must be positive");
  if (D == 0 || D % 4 != 0) throw InvalidArgument("class_average_gap: D must be divisible by 4");
  const ResidueClasses R(D);
  const auto un = static_cast<std::size_t>(n);
  std::uint64_t size = 1;
  for (int i = 0; i < n; ++i) {
    if (size > (std::uint64_t{1} << 24) / R.size()) throw BudgetExceeded("too-large: |G| above 2^24");
    size *= R.size();
  }
  if (f.size() != size) throw InvalidArgument("class_average_gap: table size must be |G| = " + std::to_string(size));
  for (double v : f) {
    if (!(std::fabs(v) <= 1)) throw InvalidArgument("class_average_gap: |f| must be at most 1");
  }
  const std::uint64_t nf = factorial(n);
  long double sum = 0;
  std::vector<int> perm(un);
  std::vector<std::uint32_t> cls(un);
  ClassGapResult res;
  res.tuples = for_each_tuple(n, N, D, nf, budget, [&](const std::vector<std::uint32_t>& q) {
    for (std::size_t k = 0; k < un; ++k) cls[k] = R.class_of(q[k]);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::uint64_t idx = 0;
      for (std::size_t i = un; i-- > 0;) idx = idx * R.size() + cls[static_cast<std::size_t>(perm[i])];
      sum += f[idx];
    } while (std::next_permutation(perm.begin(), perm.end()));
  });
  long double mean = 0;
  for (double v : f) mean += v;
  mean /= static_cast<long double>(size);
  res.tuple_average = static_cast<double>(sum / static_cast<long double>(nf));
  res.main_term = static_cast<double>(mean * static_cast<long double>(res.tuples));
  return res;
}

double legendre_pair_sum(std::uint64_t A, std::uint64_t X, const std::function<double(std::uint64_t)>& a,
                         const std::function<double(std::uint64_t)>& b) {
  const std::uint64_t lo = std::max<std::uint64_t>(A, 3);
  if (lo > X) return 0;
  const std::uint64_t limit = X / lo;
  if (limit < lo) return 0;
  std::vector<std::uint64_t> primes;
  {
    const FactorSieve sieve(limit);
    for (auto p : sieve.primes()) {
      if (p >= lo) primes.push_back(p);
    }
  }
  long double total = 0;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const auto p1 = primes[i];
    const long double ap = a(p1);
    if (ap == 0) continue;
    for (std::size_t j = 0; j < primes.size() && primes[j] <= X / p1; ++j) {
      const auto p2 = primes[j];
      if (p1 == p2) continue;
      total += ap * b(p2) * jacobi(static_cast<i128>(p1), p2);
    }
  }
  return static_cast<double>(total);
}

}  // namespace twistrank
