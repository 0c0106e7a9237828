#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "twistrank/arith.hpp"
#include "twistrank/f2linalg.hpp"

namespace twistrank {

// ---------------------------------------------------------------------------
// The curve family y^2 = (x - b c1)(x - b c2)(x - b c3)
// ---------------------------------------------------------------------------

class TwistFamily {
 public:
  /// Rational roots are rescaled by the square of their common denominator,
  /// which does not change any Selmer group. S = {inf, 2} plus every odd prime
  /// of (c1-c2)(c1-c3)(c2-c3) and any `extra_primes`; D defaults to 8 times the
  /// odd primes of S. Throws InvalidArgument when the roots are not distinct,
  /// some (ci-cj)(ci-ck) is a square, or D is incompatible with S.
  static TwistFamily make(const std::array<Rational, 3>& c, std::span<const std::uint64_t> extra_primes = {},
                          std::uint64_t D = 0);
  static TwistFamily make(const std::array<std::int64_t, 3>& c, std::span<const std::uint64_t> extra_primes = {},
                          std::uint64_t D = 0);

  const std::array<std::int64_t, 3>& c() const { return c_; }
  std::int64_t diff(int i, int j) const { return c_[i] - c_[j]; }
  /// S in canonical order.
  const std::vector<Place>& places() const { return places_; }
  /// Odd primes of S, ascending.
  const std::vector<std::uint64_t>& odd_primes() const { return odd_primes_; }
  std::uint64_t D() const { return D_; }
  const ResidueClasses& residues() const { return *residues_; }

  bool in_S(std::uint64_t p) const;
  /// Canonical text identifying (c, S, D); stable across runs.
  std::string key() const;

 private:
  std::array<std::int64_t, 3> c_{};
  std::vector<Place> places_;
  std::vector<std::uint64_t> odd_primes_;
  std::uint64_t D_ = 8;
  std::shared_ptr<const ResidueClasses> residues_;
};

// ---------------------------------------------------------------------------
// Local spaces V_v of triples (u1, u2, u3) with u1 u2 u3 = 1
// ---------------------------------------------------------------------------

/// A place of B as seen by the linear algebra: its kind and eps(p). Twist
/// primes of a formal model carry no actual prime (prime == 0).
struct PlaceSlot {
  Place::Kind kind = Place::Kind::Infinity;
  std::uint64_t prime = 0;
  int eps = 0;
  bool twist = false;

  std::size_t class_dim() const;
  std::string name() const;
};

/// V_v: coordinates are (class(u1), class(u2)), each class_dim bits, with u3
/// implied. The form is prod_i (u_i, v_i)_v evaluated on basis triples.
struct LocalTripleSpace {
  PlaceSlot slot;
  std::size_t class_dim = 0;
  std::size_t dim = 0;
  BilinearFormF2 form;
  /// Basis triples as raw class bits, in coordinate order.
  std::vector<std::array<std::uint8_t, 3>> basis_labels;

  static LocalTripleSpace make(const PlaceSlot& slot);

  BitVector encode(std::uint8_t u1, std::uint8_t u2) const;
  /// Encode a triple; throws InvalidArgument unless u1 u2 u3 = 1.
  BitVector encode_triple(std::uint8_t u1, std::uint8_t u2, std::uint8_t u3) const;
  std::array<std::uint8_t, 3> decode(const BitVector& v) const;
};

// ---------------------------------------------------------------------------
// Square-class data of a twist
// ---------------------------------------------------------------------------

/// Everything the Selmer computation needs to know about b = +-(S-part) p_1 ... p_n
/// beyond the family: the classes of every global generator at every place of
/// B. Built either from actual primes or from a formal model.
struct TwistSymbols {
  bool negative = false;
  /// Exponents of b on the S generators (-1, 2, odd primes of S); nonzero only
  /// for the sign and for primes of S dividing b.
  std::vector<std::uint8_t> s_exponents;
  /// Actual twist primes, ascending; empty in formal mode.
  std::vector<std::uint64_t> primes;
  /// eps(p_i) of every twist prime.
  std::vector<int> eps;
  /// Class bits of each S generator at each twist place: [i][gen].
  std::vector<std::vector<std::uint8_t>> s_gen_at_twist;
  /// Class bits of each twist prime at each place of S: [s_place][i].
  std::vector<std::vector<std::uint8_t>> twist_at_s;
  /// nonresidue[i][j] = 1 iff p_j is a non-residue mod p_i (i != j).
  std::vector<std::vector<std::uint8_t>> nonresidue;

  std::size_t n() const { return eps.size(); }
};

/// Validates b (nonzero, squarefree, |b| < 2^31) and, when `require_coprime`,
/// gcd(b, D) = 1. Throws InvalidTwist.
void validate_twist(const TwistFamily& family, std::int64_t b, bool require_coprime);

TwistSymbols symbols_for_twist(const TwistFamily& family, std::int64_t b);

// ---------------------------------------------------------------------------
// Global space V = prod_{v in B} V_v
// ---------------------------------------------------------------------------

class LocalImageCache;

class GlobalSpace {
 public:
  GlobalSpace(const TwistFamily& family, TwistSymbols symbols);

  const TwistFamily& family() const { return family_; }
  const TwistSymbols& symbols() const { return symbols_; }
  /// b when built from an actual twist, 0 in formal mode.
  std::int64_t b() const { return b_; }
  void set_b(std::int64_t b) { b_ = b; }

  /// Places of B: S in canonical order, then twist primes ascending.
  const std::vector<PlaceSlot>& places() const { return places_; }
  const std::vector<LocalTripleSpace>& blocks() const { return blocks_; }
  std::size_t offset(std::size_t block) const { return offsets_[block]; }
  std::size_t dim() const { return dim_; }
  std::size_t M() const { return dim_ / 2; }
  const BilinearFormF2& form() const { return form_; }

  std::size_t num_generators() const { return 2 + family_.odd_primes().size() + symbols_.n(); }
  /// Class bits at place `block` of the global element with the given
  /// exponent vector over the generators (-1, 2, odd primes of S, p_1..p_n).
  std::uint8_t class_of(std::size_t block, std::span<const std::uint8_t> exponents) const;
  /// Exponent vector of b.
  const std::vector<std::uint8_t>& b_exponents() const { return b_exponents_; }
  /// Exponent vector of a nonzero integer supported on -1, 2 and odd primes of S.
  std::vector<std::uint8_t> s_unit_exponents(std::int64_t x) const;

  /// Embed the global triple (x1, x2, x1 x2) by its classes at every place.
  BitVector embed(std::span<const std::uint8_t> x1, std::span<const std::uint8_t> x2) const;

 private:
  std::uint8_t generator_class(std::size_t block, std::size_t gen) const;

  TwistFamily family_;
  TwistSymbols symbols_;
  std::int64_t b_ = 0;
  std::vector<PlaceSlot> places_;
  std::vector<LocalTripleSpace> blocks_;
  std::vector<std::size_t> offsets_;
  std::size_t dim_ = 0;
  BilinearFormF2 form_;
  std::vector<std::vector<std::uint8_t>> gen_class_;  // [block][gen]
  std::vector<std::uint8_t> b_exponents_;
};

/// V for an actual twist. b must be squarefree; primes shared with D are
/// allowed here (their places already belong to S).
GlobalSpace build_V(const TwistFamily& family, std::int64_t b);

/// U: span of the images of (-1,-1,1), (1,-1,-1) and (q,q,1), (1,q,q) for
/// every finite q in B.
SubspaceF2 U_subspace(const GlobalSpace& space);

/// The two closed-form generators of W_p at a twist prime p | b, p not in S,
/// in the coordinates of the 4-dimensional V_p block:
/// ((c1-c2)(c1-c3), b(c1-c2), b(c1-c3)) and (b(c3-c1), b(c3-c2), (c3-c1)(c3-c2)).
std::array<BitVector, 2> W_twist_prime(const TwistFamily& family, std::int64_t b, std::uint64_t p);

struct LocalImageOptions {
  /// Precision levels k; at level k the search covers x = a / v^j with
  /// 0 <= j <= k and numerators in windows of radius min(v^k, 2^(k+10)).
  std::vector<int> schedule{3, 5, 8, 12, 20};
};

/// Image of E_b(Q_v) under x -> (x - b c1, x - b c2, x - b c3) as a subspace of
/// the V_v block. Seeds with the 2-torsion images, then enumerates x with
/// increasing precision until the rank reaches dim(V_v) / 2. Throws
/// PrecisionExhausted if the schedule runs out first.
SubspaceF2 W_local_image(const TwistFamily& family, std::int64_t b, const Place& place,
                         const LocalImageOptions& options = {});

/// W = W_S x W_b. Blocks at S places come from the cache (W_v depends only on
/// the class of b at v).
SubspaceF2 W_subspace(const GlobalSpace& space, LocalImageCache& cache);
SubspaceF2 W_subspace(const GlobalSpace& space);

/// Memo of local images keyed by (family, place, class of b at the place).
/// Reads take a shared lock; insertion is single-writer. When a directory is
/// configured (TWISTRANK_CACHE for the process-wide instance) entries persist
/// as one JSON file per family.
class LocalImageCache {
 public:
  LocalImageCache() = default;
  explicit LocalImageCache(std::optional<std::filesystem::path> directory);

  /// Basis of W_v for twists whose class at `place` has the given bits.
  std::vector<BitVector> get(const TwistFamily& family, const Place& place, std::uint8_t b_class);

  std::size_t size() const;
  std::size_t misses() const { return misses_; }

  /// Process-wide cache; honours TWISTRANK_CACHE.
  static LocalImageCache& global();

 private:
  void load_family(const TwistFamily& family);
  void persist_family(const TwistFamily& family);

  std::optional<std::filesystem::path> directory_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::vector<BitVector>> entries_;
  std::map<std::string, bool> loaded_families_;
  std::size_t misses_ = 0;
};

}  // namespace twistrank
