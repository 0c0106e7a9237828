#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace twistrank {

/// Fixed-length bit vector over F2, packed into 64-bit words (bit i lives in
/// word i / 64 at position i % 64). Unused high bits are kept zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t dim) : dim_(dim), words_((dim + 63) / 64, 0) {}
  /// Parse a string of '0'/'1' characters, bit 0 first.
  static BitVector from_string(const std::string& bits);
  static BitVector unit(std::size_t dim, std::size_t i);

  std::size_t dim() const { return dim_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool value = true) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (value)
      words_[i >> 6] |= m;
    else
      words_[i >> 6] &= ~m;
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  bool is_zero() const;
  /// Index of the lowest set bit, or dim() when zero.
  std::size_t lowest_set_bit() const;
  std::size_t popcount() const;
  /// Sum of coordinatewise products.
  int dot(const BitVector& other) const;

  BitVector& operator^=(const BitVector& other);
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  bool operator==(const BitVector&) const = default;
  bool operator<(const BitVector& other) const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::string to_string() const;

  /// Copy `src` into bits [offset, offset + src.dim()).
  void place(std::size_t offset, const BitVector& src);
  BitVector slice(std::size_t offset, std::size_t len) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> words_;
};

struct RowReduction {
  std::vector<BitVector> basis;     // reduced echelon rows, pivots ascending
  std::vector<std::size_t> pivots;  // pivot column of each basis row
  std::size_t rank() const { return basis.size(); }
};

/// Reduced row echelon form. Pivot of a row is its lowest set bit; rows are
/// ordered by pivot and every pivot column is cleared in all other rows, so
/// the result is unique for the spanned subspace.
RowReduction row_reduce(std::span<const BitVector> generators, std::size_t ambient_dim);

class SubspaceF2 {
 public:
  explicit SubspaceF2(std::size_t ambient_dim = 0) : ambient_dim_(ambient_dim) {}
  SubspaceF2(std::size_t ambient_dim, std::span<const BitVector> generators);

  static SubspaceF2 full(std::size_t ambient_dim);

  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t rank() const { return reduced_.rank(); }
  const std::vector<BitVector>& basis() const { return reduced_.basis; }
  const std::vector<BitVector>& generators() const { return generators_; }

  bool contains(const BitVector& v) const;
  /// Reduce v against the basis; zero iff v is in the subspace.
  BitVector reduce(BitVector v) const;
  /// Add a generator; returns true if the rank grew.
  bool add(const BitVector& v);

  /// All 2^rank elements (rank must be small).
  std::vector<BitVector> elements() const;

  bool operator==(const SubspaceF2& other) const {
    return ambient_dim_ == other.ambient_dim_ && reduced_.basis == other.reduced_.basis;
  }

 private:
  std::size_t ambient_dim_;
  std::vector<BitVector> generators_;
  RowReduction reduced_;
};

/// Exact intersection via the kernel of the stacked system [basis_A ; basis_B].
SubspaceF2 intersect(const SubspaceF2& a, const SubspaceF2& b);
SubspaceF2 subspace_sum(const SubspaceF2& a, const SubspaceF2& b);

/// Bilinear form given by its Gram matrix (row i = G e_i).
class BilinearFormF2 {
 public:
  BilinearFormF2() = default;
  explicit BilinearFormF2(std::vector<BitVector> gram);

  /// Standard symplectic form on F2^{2m}: e_i pairs with e_{m+i}.
  static BilinearFormF2 standard_symplectic(std::size_t m);
  /// Block-diagonal sum of forms, in order.
  static BilinearFormF2 direct_sum(std::span<const BilinearFormF2> blocks);

  std::size_t dim() const { return gram_.size(); }
  const std::vector<BitVector>& gram() const { return gram_; }

  bool is_symmetric() const;
  bool is_alternating() const;
  bool is_nondegenerate() const;

  /// G v.
  BitVector apply(const BitVector& v) const;
  /// u^T G v.
  int pair(const BitVector& u, const BitVector& v) const;

 private:
  std::vector<BitVector> gram_;
};

/// u^T G v; throws InvalidArgument on dimension mismatch.
int pair(const BitVector& u, const BitVector& v, const BilinearFormF2& form);

/// True iff A is isotropic and of half the ambient dimension. Throws
/// InvalidArgument if the form is not alternating or has odd dimension.
bool is_lagrangian(const SubspaceF2& a, const BilinearFormF2& form);

bool is_isotropic(const SubspaceF2& a, const BilinearFormF2& form);

}  // namespace twistrank
