#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace twistrank {

/// Quadratic character p -> (disc / p) (Kronecker symbol). The labels
/// "trivial", "mod4", "mod8:+", "mod8:-" stand for discriminants 1, -4, 8, -8.
struct Character {
  std::int64_t discriminant = 1;
  std::string label = "trivial";

  static Character parse(const std::string& label);
  std::uint64_t modulus() const;
  /// Value at a prime coprime to the modulus.
  int operator()(std::uint64_t p) const;
};

struct CharSumSpec {
  int n = 0;
  std::uint64_t N = 0;
  std::uint64_t D = 4;
  std::vector<Character> chi;
  std::vector<std::vector<std::uint8_t>> d_matrix;
  std::vector<std::vector<std::uint8_t>> e_matrix;

  /// Throws InvalidArgument on shape, symmetry, diagonal or modulus errors.
  void validate() const;

  /// Indices i with e_ij = 1 for some j, or chi_i of modulus not dividing 4,
  /// or chi_i of modulus exactly 4 with d_ij = 0 for all j.
  int m() const;

  static CharSumSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct CharSumResult {
  /// Sum over ordered tuples (an integer); value = numerator / n!.
  std::int64_t numerator = 0;
  std::uint64_t n_factorial = 1;
  std::uint64_t tuples = 0;  // unordered: squarefree b with omega(b) = n
  int m = 0;
  double value() const { return static_cast<double>(numerator) / static_cast<double>(n_factorial); }
};

inline constexpr std::uint64_t kCharSumBudget = std::uint64_t{4} << 30;

/// (1/n!) sum over ordered n-tuples of distinct primes coprime to D with
/// product <= N of prod chi_i(p_i) prod_{i<j} (-1)^{eps(p_i) eps(p_j) d_ij}
/// (p_i / p_j)^{e_ij}. Throws BudgetExceeded ("too-large") when the number of
/// terms exceeds `budget`.
CharSumResult char_sum(const CharSumSpec& spec, std::uint64_t budget = kCharSumBudget);

/// Relabel indices by `perm` (new index k is old index perm[k]). With
/// `compensate`, d_ij is toggled for every pair with e_ij = 1 whose order
/// the relabelling reverses, which keeps char_sum unchanged by reciprocity.
CharSumSpec permute_spec(const CharSumSpec& spec, const std::vector<int>& perm, bool compensate);

/// f over G = ((Z/D)^*/squares)^n, indexed by sum_i cls_i * |C|^i with cls_i
/// a ResidueClasses mask.
struct ClassGapResult {
  double tuple_average = 0;  // (1/n!) sum over ordered tuples of f
  double main_term = 0;      // mean of f over G times the number of tuples
  std::uint64_t tuples = 0;
  double gap() const;
};

ClassGapResult class_average_gap(const std::vector<double>& f, int n, std::uint64_t N, std::uint64_t D,
                                 std::uint64_t budget = kCharSumBudget);

/// sum over odd primes p1, p2 >= A with p1 p2 <= X of a(p1) b(p2) (p1 / p2).
double legendre_pair_sum(std::uint64_t A, std::uint64_t X, const std::function<double(std::uint64_t)>& a,
                         const std::function<double(std::uint64_t)>& b);

}  // namespace twistrank
