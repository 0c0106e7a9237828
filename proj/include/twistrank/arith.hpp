#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace twistrank {

using i128 = __int128;

// ---------------------------------------------------------------------------
// Places of Q
// ---------------------------------------------------------------------------

class Place {
 public:
  enum class Kind : std::uint8_t { Infinity = 0, Two = 1, OddPrime = 2 };

  static Place infinity() { return Place(Kind::Infinity, 0); }
  static Place two() { return Place(Kind::Two, 2); }
  /// Throws InvalidArgument unless p is an odd prime.
  static Place odd_prime(std::uint64_t p);
  /// Place of an arbitrary prime (2 or odd).
  static Place of_prime(std::uint64_t p);

  Kind kind() const { return kind_; }
  /// The residue characteristic; 0 at the real place.
  std::uint64_t prime() const { return prime_; }
  bool is_finite() const { return kind_ != Kind::Infinity; }

  /// F2-dimension of Q_v^* / (Q_v^*)^2: 1 at infinity, 3 at 2, 2 at odd p.
  std::size_t class_dim() const;

  std::string name() const;

  // Canonical order: infinity, 2, then odd primes ascending.
  auto operator<=>(const Place&) const = default;

 private:
  Place(Kind k, std::uint64_t p) : kind_(k), prime_(p) {}

  Kind kind_;
  std::uint64_t prime_;
};

// ---------------------------------------------------------------------------
// Local square classes
//
// Bit encoding of Q_v^*/(Q_v^*)^2, under which the group law is XOR:
//   infinity : bit0 = negative
//   odd p    : bit0 = odd valuation, bit1 = unit part is a non-residue mod p
//   2        : bit0 = odd valuation, bit1 = eps(u) = (u-1)/2,
//              bit2 = omega(u) = (u^2-1)/8   (u the unit part, mod 2)
// ---------------------------------------------------------------------------

class SquareClass {
 public:
  SquareClass(Place place, std::uint8_t bits);
  static SquareClass trivial(Place place) { return SquareClass(place, 0); }

  const Place& place() const { return place_; }
  std::uint8_t bits() const { return bits_; }

  bool negative() const;
  bool odd_valuation() const;
  bool unit_nonresidue() const;
  /// Unit part modulo 8 at the place 2, one of {1,3,5,7}.
  int unit_mod8() const;

  bool is_trivial() const { return bits_ == 0; }

  /// Group law. Throws InvalidArgument for classes at different places.
  SquareClass operator*(const SquareClass& other) const;

  bool operator==(const SquareClass&) const = default;

 private:
  Place place_;
  std::uint8_t bits_;
};

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

/// Parse "a" or "a/b".
Rational parse_rational(const std::string& text);

// ---------------------------------------------------------------------------
// Elementary arithmetic
// ---------------------------------------------------------------------------

bool is_prime(std::uint64_t n);
/// Distinct prime divisors, ascending. n >= 1.
std::vector<std::uint64_t> prime_factors(std::uint64_t n);
bool is_squarefree(std::uint64_t n);
/// Largest squarefree d with n / d a perfect square (sign preserved).
std::int64_t squarefree_part(std::int64_t n);
bool is_perfect_square(i128 n);
std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);

/// p-adic valuation of a nonzero integer.
int valuation(i128 x, std::uint64_t p);

/// Jacobi symbol (a/n) for odd n > 0; no primality check.
int jacobi(i128 a, std::uint64_t n);
/// Kronecker symbol (a/n) for n > 0.
int kronecker(std::int64_t a, std::uint64_t n);

/// Legendre symbol; throws InvalidArgument unless p is an odd prime.
int legendre(std::int64_t a, std::uint64_t p);
/// (p-1)/2 mod 2 for odd p (negative p allowed); throws on even p.
int epsilon(std::int64_t p);
/// (u^2-1)/8 mod 2 for odd u; throws on even u.
int omega8(std::int64_t u);

// ---------------------------------------------------------------------------
// Square classes and Hilbert symbols
// ---------------------------------------------------------------------------

SquareClass square_class(i128 x, const Place& place);
/// A rational's class equals the class of num * den.
SquareClass square_class(const Rational& x, const Place& place);

/// Additive Hilbert pairing: 0 for symbol +1, 1 for symbol -1.
int hilbert_bit(const SquareClass& a, const SquareClass& b);
/// Same pairing on raw class bits at a place of the given kind; only
/// eps(p) of an odd residue characteristic enters the formula.
int hilbert_bit_raw(Place::Kind kind, int eps_p, std::uint8_t x, std::uint8_t y);
/// Hilbert symbol (a, b)_v in {-1, +1}.
int hilbert_symbol(const Rational& a, const Rational& b, const Place& place);

/// Canonical small integer in the given local class: +-1 at infinity,
/// 2^a * u (u in {1,3,5,7}) at 2, p^a * n (n = 1 or the least non-residue)
/// at odd p.
std::int64_t class_representative(const SquareClass& cls);

// ---------------------------------------------------------------------------
// Sieves
// ---------------------------------------------------------------------------

/// Linear sieve of smallest prime factors up to a limit.
class FactorSieve {
 public:
  explicit FactorSieve(std::uint64_t limit);

  std::uint64_t limit() const { return limit_; }
  std::span<const std::uint32_t> primes() const { return primes_; }
  std::uint32_t smallest_factor(std::uint64_t n) const { return spf_[n]; }

  /// Distinct primes of n, ascending; returns false if n is not squarefree.
  bool squarefree_factors(std::uint64_t n, std::vector<std::uint32_t>& out) const;

 private:
  std::uint64_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

/// Squarefree b paired with their prime factorizations, stored flat.
class SquarefreeList {
 public:
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::uint64_t value(std::size_t i) const { return values_[i]; }
  std::span<const std::uint32_t> factors(std::size_t i) const {
    return std::span<const std::uint32_t>(factors_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  std::span<const std::uint64_t> values() const { return values_; }

  void push_back(std::uint64_t b, std::span<const std::uint32_t> primes);

 private:
  std::vector<std::uint64_t> values_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<std::uint32_t> factors_;
};

/// All squarefree 1 <= b <= N with gcd(b, D) = 1, ascending.
SquarefreeList sieve_squarefree_coprime(std::uint64_t N, std::uint64_t D);

// ---------------------------------------------------------------------------
// Prime-divisor statistics
// ---------------------------------------------------------------------------

struct OmegaStats {
  std::uint64_t N = 0;
  std::map<int, std::uint64_t> histogram;  // omega(b) -> count
  int window_lo = 0;                        // floor(loglog N - (loglog N)^{3/4})
  int window_hi = 0;                        // floor(loglog N + (loglog N)^{3/4})

  std::uint64_t total() const;
  bool operator==(const OmegaStats&) const = default;
};

/// Number of b <= N with exactly n distinct prime factors.
std::uint64_t count_omega(std::uint64_t N, int n, bool squarefree_only);

/// Histogram of omega(b) for b <= N (optionally squarefree and coprime to D).
OmegaStats omega_stats(std::uint64_t N, bool squarefree_only, std::uint64_t D = 1);

/// Open interval loglog N -+ (loglog N)^{3/4}. Requires N >= 16.
std::pair<double, double> omega_window(std::uint64_t N);

/// True iff omega lies strictly inside omega_window(N).
bool in_omega_window(int omega, std::uint64_t N);

// ---------------------------------------------------------------------------
// (Z/D)^* / ((Z/D)^*)^2
// ---------------------------------------------------------------------------

/// Square classes of units modulo D, encoded as bit masks: for 8 | D bits 0,1
/// carry eps and omega of the residue; 4 || D carries eps only; then one
/// quadratic-residue bit per odd prime of D, ascending.
class ResidueClasses {
 public:
  explicit ResidueClasses(std::uint64_t D);

  std::uint64_t modulus() const { return D_; }
  int rank() const { return rank_; }
  std::uint32_t size() const { return 1u << rank_; }
  std::span<const std::uint64_t> odd_primes() const { return odd_primes_; }
  int two_bits() const { return two_bits_; }

  /// Class mask of an integer coprime to D.
  std::uint32_t class_of(std::int64_t a) const;
  /// Smallest positive residue in the class.
  std::uint64_t representative(std::uint32_t cls) const;

  int eps_bit(std::uint32_t cls) const;    // requires 4 | D
  int omega_bit(std::uint32_t cls) const;  // requires 8 | D
  /// Residue bit (1 = non-residue) at the i-th odd prime of D.
  int qr_bit(std::uint32_t cls, std::size_t i) const;

 private:
  std::uint64_t D_;
  int two_bits_ = 0;
  int rank_ = 0;
  std::vector<std::uint64_t> odd_primes_;
  std::vector<std::uint64_t> reps_;
};

}  // namespace twistrank
