#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twistrank/localspaces.hpp"

namespace twistrank {

struct TwistRecord {
  std::int64_t b = 0;
  std::vector<std::uint64_t> factors;  // distinct primes of |b|, ascending
  int omega = 0;
  int selmer_dim = 0;
  int parity = 0;
  /// Smallest positive representative of the class of b in (Z/D)^*/squares;
  /// 0 when b shares a prime with D.
  std::uint64_t class_mod_D = 0;

  bool operator==(const TwistRecord&) const = default;
};

/// The pieces of one Selmer computation, kept for inspection.
struct SelmerAnalysis {
  GlobalSpace space;
  SubspaceF2 U;
  SubspaceF2 W;
  SubspaceF2 selmer;  // U meet W
};

SelmerAnalysis analyze_twist(const TwistFamily& family, std::int64_t b);
SelmerAnalysis analyze_twist(const TwistFamily& family, std::int64_t b, LocalImageCache& cache);

/// dim S_2(E_b) = dim(U meet W). b must be nonzero and squarefree; primes of
/// D may divide b here.
TwistRecord selmer_rank(const TwistFamily& family, std::int64_t b);
TwistRecord selmer_rank(const TwistFamily& family, std::int64_t b, LocalImageCache& cache);

inline constexpr std::uint64_t kCharsumPairBudget = std::uint64_t{1} << 26;

/// log2 of (1/2^M) sum_{u in U, w in W} (-1)^{<u,w>}, summed literally.
/// Throws BudgetExceeded when 2^(2M) exceeds `max_pairs`.
int selmer_rank_charsum(const TwistFamily& family, std::int64_t b, std::uint64_t max_pairs = kCharsumPairBudget);

/// (1/2^dim U) sum_{u in U} (-1)^{<u,v>}; 1 if v lies in U^perp, else 0.
int character_average(const SubspaceF2& U, const BilinearFormF2& form, const BitVector& v);

// ---------------------------------------------------------------------------
// Formal mode

/// Symbol data of b = p_1 ... p_n (n primes coprime to D, positive b): the
/// class of each p_i in (Z/D)^*/squares (a ResidueClasses mask) and, for
/// i < j, legendre_bits[i][j] = 1 iff p_i is a non-residue mod p_j. Stored
/// symmetrically with zero diagonal.
struct FormalTwistModel {
  std::vector<std::uint32_t> classes;
  std::vector<std::vector<std::uint8_t>> legendre_bits;

  std::size_t n() const { return classes.size(); }

  /// Throws InvalidArgument on size, symmetry, diagonal or class-range errors.
  void validate(const TwistFamily& family) const;

  /// Reads the symbols off an actual positive squarefree b coprime to D.
  static FormalTwistModel extract(const TwistFamily& family, std::int64_t b);

  bool operator==(const FormalTwistModel&) const = default;
};

/// Generator classes at every place expressed through eps-bits, class
/// characters and Legendre bits only.
TwistSymbols symbols_for_model(const TwistFamily& family, const FormalTwistModel& model);

int selmer_rank_formal(const TwistFamily& family, const FormalTwistModel& model);
int selmer_rank_formal(const TwistFamily& family, const FormalTwistModel& model, LocalImageCache& cache);

// ---------------------------------------------------------------------------
// Parity

struct LocalParityTerm {
  std::string place;
  int term = 0;  // dim V_v / 2 - dim(W_v(E) meet W_v(E_b)) mod 2
};

struct ParityPrediction {
  int parity = 0;       // predicted dim S_2(E_b) mod 2
  int base_parity = 0;  // dim S_2(E) mod 2
  int shift = 0;        // sum of local terms mod 2
  /// Squarefree part of the normalizing twist that makes the differences
  /// pairwise coprime.
  std::int64_t d = 1;
  std::string method;
  std::vector<LocalParityTerm> terms;
};

/// Parity of dim S_2(E_b) from the parity for E and local norm indices:
/// sum over v in B of dim(W_v(E) / (W_v(E) meet W_v(E_b))). Depends only on
/// the classes of b at the places of S and on which primes divide b.
ParityPrediction parity_predict(const TwistFamily& family, std::int64_t b);

/// Parity predicted for positive b coprime to D in the given class mask of
/// (Z/D)^*/squares.
int parity_for_class(const TwistFamily& family, std::uint32_t cls);

/// Squarefree d such that the twist of E by d, after clearing the gcd of the
/// differences, has pairwise coprime differences; 0 if none exists.
std::int64_t normalizing_twist(const TwistFamily& family);

}  // namespace twistrank
