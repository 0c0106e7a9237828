#include "twistrank/f2linalg.hpp"

#include <algorithm>
#include <bit>

#include "twistrank/errors.hpp"

namespace twistrank {

BitVector BitVector::from_string(const std::string& bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1')
      v.set(i);
    else if (bits[i] != '0')
      throw InvalidArgument("BitVector::from_string: invalid character");
  }
  return v;
}

BitVector BitVector::unit(std::size_t dim, std::size_t i) {
  BitVector v(dim);
  v.set(i);
  return v;
}

bool BitVector::is_zero() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::size_t BitVector::lowest_set_bit() const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
  }
  return dim_;
}

std::size_t BitVector::popcount() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

int BitVector::dot(const BitVector& other) const {
  if (dim_ != other.dim_) throw InvalidArgument("BitVector::dot: dimension mismatch");
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & other.words_[w];
  return std::popcount(acc) & 1;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  if (dim_ != other.dim_) throw InvalidArgument("BitVector: dimension mismatch");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

bool BitVector::operator<(const BitVector& other) const {
  if (dim_ != other.dim_) return dim_ < other.dim_;
  return words_ < other.words_;
}

std::string BitVector::to_string() const {
  std::string s(dim_, '0');
  for (std::size_t i = 0; i < dim_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

void BitVector::place(std::size_t offset, const BitVector& src) {
  if (offset + src.dim() > dim_) throw InvalidArgument("BitVector::place: out of range");
  for (std::size_t i = 0; i < src.dim(); ++i) set(offset + i, src.get(i));
}

BitVector BitVector::slice(std::size_t offset, std::size_t len) const {
  if (offset + len > dim_) throw InvalidArgument("BitVector::slice: out of range");
  BitVector out(len);
  for (std::size_t i = 0; i < len; ++i) out.set(i, get(offset + i));
  return out;
}

// ---------------------------------------------------------------------------

RowReduction row_reduce(std::span<const BitVector> generators, std::size_t ambient_dim) {
  RowReduction out;
  for (const auto& g : generators) {
    if (g.dim() != ambient_dim) throw InvalidArgument("row_reduce: ragged generators");
    BitVector v = g;
    for (std::size_t r = 0; r < out.basis.size(); ++r) {
      if (v.get(out.pivots[r])) v ^= out.basis[r];
    }
    if (v.is_zero()) continue;
    const std::size_t piv = v.lowest_set_bit();
    for (auto& row : out.basis) {
      if (row.get(piv)) row ^= v;
    }
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(out.pivots.begin(), out.pivots.end(), piv) - out.pivots.begin());
    out.basis.insert(out.basis.begin() + static_cast<std::ptrdiff_t>(pos), std::move(v));
    out.pivots.insert(out.pivots.begin() + static_cast<std::ptrdiff_t>(pos), piv);
  }
  return out;
}

SubspaceF2::SubspaceF2(std::size_t ambient_dim, std::span<const BitVector> generators)
    : ambient_dim_(ambient_dim), generators_(generators.begin(), generators.end()) {
  reduced_ = row_reduce(generators_, ambient_dim_);
}

SubspaceF2 SubspaceF2::full(std::size_t ambient_dim) {
  std::vector<BitVector> gens;
  for (std::size_t i = 0; i < ambient_dim; ++i) gens.push_back(BitVector::unit(ambient_dim, i));
  return SubspaceF2(ambient_dim, gens);
}

BitVector SubspaceF2::reduce(BitVector v) const {
  if (v.dim() != ambient_dim_) throw InvalidArgument("SubspaceF2: dimension mismatch");
  for (std::size_t r = 0; r < reduced_.basis.size(); ++r) {
    if (v.get(reduced_.pivots[r])) v ^= reduced_.basis[r];
  }
  return v;
}

bool SubspaceF2::contains(const BitVector& v) const { return reduce(v).is_zero(); }

bool SubspaceF2::add(const BitVector& v) {
  const std::size_t before = rank();
  generators_.push_back(v);
  std::vector<BitVector> rows = reduced_.basis;
  rows.push_back(v);
  reduced_ = row_reduce(rows, ambient_dim_);
  return rank() > before;
}

std::vector<BitVector> SubspaceF2::elements() const {
  if (rank() > 24) throw InvalidArgument("SubspaceF2::elements: rank too large to enumerate");
  std::vector<BitVector> out;
  const std::size_t count = std::size_t{1} << rank();
  out.reserve(count);
  BitVector cur(ambient_dim_);
  out.push_back(cur);
  // Gray-code walk.
  for (std::size_t i = 1; i < count; ++i) {
    cur ^= reduced_.basis[static_cast<std::size_t>(std::countr_zero(i))];
    out.push_back(cur);
  }
  return out;
}

SubspaceF2 intersect(const SubspaceF2& a, const SubspaceF2& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw InvalidArgument("intersect: ambient dimension mismatch");
  const std::size_t n = a.ambient_dim();
  const std::size_t ra = a.rank();
  const std::size_t rb = b.rank();
  // Augmented rows [v | coefficient tag]. A row whose vector part reduces to
  // zero yields a relation x_A.A = x_B.B; its A-part is in the intersection.
  const std::size_t width = n + ra + rb;
  std::vector<BitVector> rows;
  rows.reserve(ra + rb);
  for (std::size_t i = 0; i < ra; ++i) {
    BitVector r(width);
    r.place(0, a.basis()[i]);
    r.set(n + i);
    rows.push_back(std::move(r));
  }
  for (std::size_t j = 0; j < rb; ++j) {
    BitVector r(width);
    r.place(0, b.basis()[j]);
    r.set(n + ra + j);
    rows.push_back(std::move(r));
  }
  std::vector<BitVector> echelon;
  std::vector<std::size_t> pivots;
  std::vector<BitVector> relations;
  for (auto& r : rows) {
    for (std::size_t k = 0; k < echelon.size(); ++k) {
      if (r.get(pivots[k])) r ^= echelon[k];
    }
    const std::size_t piv = r.lowest_set_bit();
    if (piv >= n) {
      relations.push_back(std::move(r));
    } else {
      echelon.push_back(std::move(r));
      pivots.push_back(piv);
    }
  }
  std::vector<BitVector> gens;
  gens.reserve(relations.size());
  for (const auto& rel : relations) {
    BitVector v(n);
    for (std::size_t i = 0; i < ra; ++i) {
      if (rel.get(n + i)) v ^= a.basis()[i];
    }
    gens.push_back(std::move(v));
  }
  return SubspaceF2(n, gens);
}

SubspaceF2 subspace_sum(const SubspaceF2& a, const SubspaceF2& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw InvalidArgument("subspace_sum: ambient dimension mismatch");
  std::vector<BitVector> gens = a.basis();
  gens.insert(gens.end(), b.basis().begin(), b.basis().end());
  return SubspaceF2(a.ambient_dim(), gens);
}

// ---------------------------------------------------------------------------

BilinearFormF2::BilinearFormF2(std::vector<BitVector> gram) : gram_(std::move(gram)) {
  for (const auto& row : gram_) {
    if (row.dim() != gram_.size()) throw InvalidArgument("BilinearFormF2: Gram matrix must be square");
  }
}

BilinearFormF2 BilinearFormF2::standard_symplectic(std::size_t m) {
  std::vector<BitVector> g(2 * m, BitVector(2 * m));
  for (std::size_t i = 0; i < m; ++i) {
    g[i].set(m + i);
    g[m + i].set(i);
  }
  return BilinearFormF2(std::move(g));
}

BilinearFormF2 BilinearFormF2::direct_sum(std::span<const BilinearFormF2> blocks) {
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.dim();
  std::vector<BitVector> g;
  g.reserve(total);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (const auto& row : b.gram()) {
      BitVector r(total);
      r.place(offset, row);
      g.push_back(std::move(r));
    }
    offset += b.dim();
  }
  return BilinearFormF2(std::move(g));
}

bool BilinearFormF2::is_symmetric() const {
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = i + 1; j < dim(); ++j)
      if (gram_[i].get(j) != gram_[j].get(i)) return false;
  return true;
}

bool BilinearFormF2::is_alternating() const {
  if (!is_symmetric()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (gram_[i].get(i)) return false;
  return true;
}

bool BilinearFormF2::is_nondegenerate() const { return row_reduce(gram_, dim()).rank() == dim(); }

BitVector BilinearFormF2::apply(const BitVector& v) const {
  if (v.dim() != dim()) throw InvalidArgument("BilinearFormF2::apply: dimension mismatch");
  BitVector out(dim());
  for (std::size_t i = 0; i < dim(); ++i)
    if (gram_[i].dot(v)) out.set(i);
  return out;
}

int BilinearFormF2::pair(const BitVector& u, const BitVector& v) const {
  if (u.dim() != dim() || v.dim() != dim()) throw InvalidArgument("pair: dimension mismatch");
  return u.dot(apply(v));
}

int pair(const BitVector& u, const BitVector& v, const BilinearFormF2& form) { return form.pair(u, v); }

bool is_isotropic(const SubspaceF2& a, const BilinearFormF2& form) {
  if (a.ambient_dim() != form.dim()) throw InvalidArgument("is_isotropic: dimension mismatch");
  const auto& basis = a.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const BitVector gi = form.apply(basis[i]);
    for (std::size_t j = i; j < basis.size(); ++j)
      if (gi.dot(basis[j])) return false;
  }
  return true;
}

bool is_lagrangian(const SubspaceF2& a, const BilinearFormF2& form) {
  if (form.dim() % 2 != 0) throw InvalidArgument("is_lagrangian: symplectic space of odd dimension");
  if (!form.is_alternating()) throw InvalidArgument("is_lagrangian: form is not alternating");
  return a.rank() * 2 == form.dim() && is_isotropic(a, form);
}

}  // namespace twistrank
