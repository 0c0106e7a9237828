#include "twistrank/arith.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "twistrank/errors.hpp"

namespace twistrank {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

std::uint64_t mod_positive(i128 x, std::uint64_t m) {
  i128 r = x % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<std::uint64_t>(r);
}

std::uint64_t abs_u64(i128 x) { return static_cast<std::uint64_t>(x < 0 ? -x : x); }

}  // namespace

// ---------------------------------------------------------------------------

Place Place::odd_prime(std::uint64_t p) {
  if (p % 2 == 0 || !is_prime(p)) {
    throw InvalidArgument("Place::odd_prime: " + std::to_string(p) + " is not an odd prime");
  }
  return Place(Kind::OddPrime, p);
}

Place Place::of_prime(std::uint64_t p) { return p == 2 ? two() : odd_prime(p); }

std::size_t Place::class_dim() const {
  switch (kind_) {
    case Kind::Infinity:
      return 1;
    case Kind::Two:
      return 3;
    case Kind::OddPrime:
      return 2;
  }
  return 0;
}

std::string Place::name() const {
  switch (kind_) {
    case Kind::Infinity:
      return "inf";
    case Kind::Two:
      return "2";
    case Kind::OddPrime:
      return std::to_string(prime_);
  }
  return "?";
}

SquareClass::SquareClass(Place place, std::uint8_t bits)
    : place_(place), bits_(static_cast<std::uint8_t>(bits & ((1u << place.class_dim()) - 1))) {}

bool SquareClass::negative() const { return place_.kind() == Place::Kind::Infinity && (bits_ & 1); }

bool SquareClass::odd_valuation() const { return place_.is_finite() && (bits_ & 1); }

bool SquareClass::unit_nonresidue() const {
  return place_.kind() == Place::Kind::OddPrime && (bits_ & 2);
}

int SquareClass::unit_mod8() const {
  if (place_.kind() != Place::Kind::Two) throw InvalidArgument("unit_mod8: not the place 2");
  const bool eps = bits_ & 2;
  const bool omg = bits_ & 4;
  // (eps, omega): 1 -> (0,0), 3 -> (1,1), 5 -> (0,1), 7 -> (1,0)
  if (!eps && !omg) return 1;
  if (eps && omg) return 3;
  if (!eps && omg) return 5;
  return 7;
}

SquareClass SquareClass::operator*(const SquareClass& other) const {
  if (!(place_ == other.place_)) throw InvalidArgument("SquareClass: product across places");
  return SquareClass(place_, bits_ ^ other.bits_);
}

Rational parse_rational(const std::string& text) {
  Rational r;
  const auto slash = text.find('/');
  auto parse = [&](std::string_view s, std::int64_t& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw InvalidArgument("not a rational number: '" + text + "'");
    }
  };
  const std::string_view sv(text);
  parse(sv.substr(0, slash), r.num);
  if (slash != std::string::npos) parse(sv.substr(slash + 1), r.den);
  if (r.den == 0) throw InvalidArgument("zero denominator: '" + text + "'");
  if (r.den < 0) {
    r.den = -r.den;
    r.num = -r.num;
  }
  const auto g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

// ---------------------------------------------------------------------------

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  // Deterministic for all 64-bit n.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  if (n == 0) throw InvalidArgument("prime_factors: zero");
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

bool is_squarefree(std::uint64_t n) {
  if (n == 0) return false;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return false;
    }
  }
  return true;
}

std::int64_t squarefree_part(std::int64_t n) {
  if (n == 0) throw InvalidArgument("squarefree_part: zero");
  const std::int64_t sign = n < 0 ? -1 : 1;
  std::uint64_t m = abs_u64(n);
  std::uint64_t out = 1;
  for (std::uint64_t p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (e % 2) out *= p;
  }
  out *= m;
  return sign * static_cast<std::int64_t>(out);
}

bool is_perfect_square(i128 n) {
  if (n < 0) return false;
  auto r = static_cast<i128>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n;
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

int valuation(i128 x, std::uint64_t p) {
  if (x == 0) throw InvalidArgument("valuation of zero");
  int v = 0;
  const i128 pp = static_cast<i128>(p);
  while (x % pp == 0) {
    x /= pp;
    ++v;
  }
  return v;
}

int jacobi(i128 a_in, std::uint64_t n) {
  std::uint64_t a = mod_positive(a_in, n);
  int t = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const std::uint64_t r = n % 8;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) t = -t;
    a %= n;
  }
  return n == 1 ? t : 0;
}

int kronecker(std::int64_t a, std::uint64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int t = 1;
  while (n % 2 == 0) {
    n /= 2;
    if (a % 2 == 0) return 0;
    const std::uint64_t r = mod_positive(a, 8);
    if (r == 3 || r == 5) t = -t;
  }
  return t * jacobi(a, n);
}

int legendre(std::int64_t a, std::uint64_t p) {
  if (p % 2 == 0 || !is_prime(p)) {
    throw InvalidArgument("legendre: modulus " + std::to_string(p) + " is not an odd prime");
  }
  return jacobi(a, p);
}

int epsilon(std::int64_t p) {
  if (p % 2 == 0) throw InvalidArgument("epsilon: even argument");
  return mod_positive(p, 4) == 3 ? 1 : 0;
}

int omega8(std::int64_t u) {
  if (u % 2 == 0) throw InvalidArgument("omega8: even argument");
  const auto r = mod_positive(u, 8);
  return (r == 3 || r == 5) ? 1 : 0;
}

// ---------------------------------------------------------------------------

SquareClass square_class(i128 x, const Place& place) {
  if (x == 0) throw InvalidArgument("square_class: zero");
  switch (place.kind()) {
    case Place::Kind::Infinity:
      return SquareClass(place, x < 0 ? 1 : 0);
    case Place::Kind::Two: {
      int v = 0;
      while (x % 2 == 0) {
        x /= 2;
        ++v;
      }
      const auto r = mod_positive(x, 8);
      const std::uint8_t eps = (r % 4 == 3) ? 1 : 0;
      const std::uint8_t omg = (r == 3 || r == 5) ? 1 : 0;
      return SquareClass(place, static_cast<std::uint8_t>((v & 1) | (eps << 1) | (omg << 2)));
    }
    case Place::Kind::OddPrime: {
      const std::uint64_t p = place.prime();
      const i128 pp = static_cast<i128>(p);
      int v = 0;
      while (x % pp == 0) {
        x /= pp;
        ++v;
      }
      const std::uint8_t nonres = jacobi(x, p) == -1 ? 1 : 0;
      return SquareClass(place, static_cast<std::uint8_t>((v & 1) | (nonres << 1)));
    }
  }
  return SquareClass::trivial(place);
}

SquareClass square_class(const Rational& x, const Place& place) {
  if (x.num == 0 || x.den == 0) throw InvalidArgument("square_class: zero");
  return square_class(static_cast<i128>(x.num) * x.den, place);
}

int hilbert_bit_raw(Place::Kind kind, int eps_p, std::uint8_t xb, std::uint8_t yb) {
  const unsigned x = xb;
  const unsigned y = yb;
  switch (kind) {
    case Place::Kind::Infinity:
      return static_cast<int>(x & y & 1u);
    case Place::Kind::OddPrime: {
      // (-1)^{alpha beta eps(p)} (u/p)^beta (v/p)^alpha
      const unsigned alpha = x & 1u, beta = y & 1u;
      const unsigned su = (x >> 1) & 1u, sv = (y >> 1) & 1u;
      return static_cast<int>((alpha & beta & static_cast<unsigned>(eps_p & 1)) ^ (beta & su) ^ (alpha & sv));
    }
    case Place::Kind::Two: {
      // (-1)^{eps(u) eps(v) + alpha omega(v) + beta omega(u)}
      const unsigned alpha = x & 1u, beta = y & 1u;
      const unsigned eu = (x >> 1) & 1u, ev = (y >> 1) & 1u;
      const unsigned wu = (x >> 2) & 1u, wv = (y >> 2) & 1u;
      return static_cast<int>((eu & ev) ^ (alpha & wv) ^ (beta & wu));
    }
  }
  return 0;
}

int hilbert_bit(const SquareClass& a, const SquareClass& b) {
  if (!(a.place() == b.place())) throw InvalidArgument("hilbert_bit: classes at different places");
  const int eps = a.place().kind() == Place::Kind::OddPrime && a.place().prime() % 4 == 3 ? 1 : 0;
  return hilbert_bit_raw(a.place().kind(), eps, a.bits(), b.bits());
}

int hilbert_symbol(const Rational& a, const Rational& b, const Place& place) {
  if (a.num == 0 || b.num == 0) throw InvalidArgument("hilbert_symbol: zero argument");
  return hilbert_bit(square_class(a, place), square_class(b, place)) ? -1 : 1;
}

std::int64_t class_representative(const SquareClass& cls) {
  const Place& place = cls.place();
  switch (place.kind()) {
    case Place::Kind::Infinity:
      return cls.negative() ? -1 : 1;
    case Place::Kind::Two:
      return (cls.odd_valuation() ? 2 : 1) * cls.unit_mod8();
    case Place::Kind::OddPrime: {
      const auto p = static_cast<std::int64_t>(place.prime());
      std::int64_t unit = 1;
      if (cls.unit_nonresidue()) {
        unit = 2;
        while (jacobi(unit, place.prime()) != -1) ++unit;
      }
      return (cls.odd_valuation() ? p : 1) * unit;
    }
  }
  return 1;
}

// ---------------------------------------------------------------------------

FactorSieve::FactorSieve(std::uint64_t limit) : limit_(limit), spf_(limit + 1, 0) {
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<std::uint32_t>(i);
      primes_.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes_) {
      const std::uint64_t m = i * p;
      if (p > spf_[i] || m > limit) break;
      spf_[m] = p;
    }
  }
}

bool FactorSieve::squarefree_factors(std::uint64_t n, std::vector<std::uint32_t>& out) const {
  out.clear();
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    n /= p;
    if (n % p == 0) return false;
    out.push_back(p);
  }
  return true;
}

void SquarefreeList::push_back(std::uint64_t b, std::span<const std::uint32_t> primes) {
  values_.push_back(b);
  factors_.insert(factors_.end(), primes.begin(), primes.end());
  offsets_.push_back(static_cast<std::uint32_t>(factors_.size()));
}

SquarefreeList sieve_squarefree_coprime(std::uint64_t N, std::uint64_t D) {
  if (N < 1 || D < 1) throw InvalidArgument("sieve_squarefree_coprime: N and D must be >= 1");
  const FactorSieve sieve(N);
  SquarefreeList out;
  std::vector<std::uint32_t> primes;
  for (std::uint64_t b = 1; b <= N; ++b) {
    if (std::gcd(b, D) != 1) continue;
    if (sieve.squarefree_factors(b, primes)) out.push_back(b, primes);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t OmegaStats::total() const {
  std::uint64_t t = 0;
  for (const auto& [n, c] : histogram) t += c;
  return t;
}

namespace {

struct OmegaTable {
  std::vector<std::uint8_t> omega;
  std::vector<std::uint8_t> squarefree;
};

OmegaTable omega_table(std::uint64_t N) {
  OmegaTable t{std::vector<std::uint8_t>(N + 1, 0), std::vector<std::uint8_t>(N + 1, 1)};
  for (std::uint64_t p = 2; p <= N; ++p) {
    if (t.omega[p] != 0) continue;  // composite: already hit by a smaller prime
    for (std::uint64_t m = p; m <= N; m += p) ++t.omega[m];
    if (p <= N / p) {
      for (std::uint64_t m = p * p; m <= N; m += p * p) t.squarefree[m] = 0;
    }
  }
  return t;
}

}  // namespace

std::uint64_t count_omega(std::uint64_t N, int n, bool squarefree_only) {
  if (N < 1 || n < 0) throw InvalidArgument("count_omega: requires N >= 1, n >= 0");
  const auto t = omega_table(N);
  std::uint64_t count = 0;
  for (std::uint64_t b = 1; b <= N; ++b) {
    if (t.omega[b] == n && (!squarefree_only || t.squarefree[b])) ++count;
  }
  return count;
}

OmegaStats omega_stats(std::uint64_t N, bool squarefree_only, std::uint64_t D) {
  if (N < 1) throw InvalidArgument("omega_stats: N must be >= 1");
  const auto t = omega_table(N);
  OmegaStats s;
  s.N = N;
  for (std::uint64_t b = 1; b <= N; ++b) {
    if (squarefree_only && !t.squarefree[b]) continue;
    if (D > 1 && std::gcd(b, D) != 1) continue;
    ++s.histogram[t.omega[b]];
  }
  if (N >= 16) {
    const auto [lo, hi] = omega_window(N);
    s.window_lo = static_cast<int>(std::floor(lo));
    s.window_hi = static_cast<int>(std::floor(hi));
  }
  return s;
}

std::pair<double, double> omega_window(std::uint64_t N) {
  if (N < 16) throw InvalidArgument("omega_window: N must be >= 16");
  const double ll = std::log(std::log(static_cast<double>(N)));
  const double w = std::pow(ll, 0.75);
  return {ll - w, ll + w};
}

bool in_omega_window(int omega, std::uint64_t N) {
  const auto [lo, hi] = omega_window(N);
  return omega > lo && omega < hi;
}

// ---------------------------------------------------------------------------

ResidueClasses::ResidueClasses(std::uint64_t D) : D_(D) {
  if (D < 1) throw InvalidArgument("ResidueClasses: D must be >= 1");
  std::uint64_t m = D;
  int v2 = 0;
  while (m % 2 == 0) {
    m /= 2;
    ++v2;
  }
  two_bits_ = v2 >= 3 ? 2 : (v2 == 2 ? 1 : 0);
  odd_primes_ = m > 1 ? prime_factors(m) : std::vector<std::uint64_t>{};
  rank_ = two_bits_ + static_cast<int>(odd_primes_.size());
  if (rank_ > 24) throw InvalidArgument("ResidueClasses: too many prime factors in D");
  reps_.assign(size(), 0);
  std::uint32_t found = 0;
  for (std::uint64_t r = 1; r <= D && found < size(); ++r) {
    if (std::gcd(r, D) != 1) continue;
    const auto c = class_of(static_cast<std::int64_t>(r));
    if (reps_[c] == 0) {
      reps_[c] = r;
      ++found;
    }
  }
}

std::uint32_t ResidueClasses::class_of(std::int64_t a) const {
  if (std::gcd(static_cast<std::uint64_t>(a < 0 ? -a : a), D_) != 1) {
    throw InvalidArgument("ResidueClasses::class_of: argument not coprime to D");
  }
  std::uint32_t mask = 0;
  int bit = 0;
  if (two_bits_ >= 1) mask |= static_cast<std::uint32_t>(epsilon(a)) << bit++;
  if (two_bits_ >= 2) mask |= static_cast<std::uint32_t>(omega8(a)) << bit++;
  for (const auto q : odd_primes_) {
    mask |= static_cast<std::uint32_t>(jacobi(a, q) == -1 ? 1 : 0) << bit++;
  }
  return mask;
}

std::uint64_t ResidueClasses::representative(std::uint32_t cls) const {
  if (cls >= size()) throw InvalidArgument("ResidueClasses::representative: class out of range");
  return reps_[cls];
}

int ResidueClasses::eps_bit(std::uint32_t cls) const {
  if (two_bits_ < 1) throw InvalidArgument("eps_bit: 4 does not divide D");
  return static_cast<int>(cls & 1u);
}

int ResidueClasses::omega_bit(std::uint32_t cls) const {
  if (two_bits_ < 2) throw InvalidArgument("omega_bit: 8 does not divide D");
  return static_cast<int>((cls >> 1) & 1u);
}

int ResidueClasses::qr_bit(std::uint32_t cls, std::size_t i) const {
  return static_cast<int>((cls >> (two_bits_ + static_cast<int>(i))) & 1u);
}

}  // namespace twistrank
