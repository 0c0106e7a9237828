#include <random>
#include <set>

#include "doctest.h"
#include "twistrank/errors.hpp"
#include "twistrank/f2linalg.hpp"

using namespace twistrank;

namespace {

BitVector random_vector(std::mt19937_64& rng, std::size_t dim) {
  BitVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v.set(i, rng() & 1);
  return v;
}

SubspaceF2 random_subspace(std::mt19937_64& rng, std::size_t dim, std::size_t gens) {
  std::vector<BitVector> g;
  for (std::size_t i = 0; i < gens; ++i) g.push_back(random_vector(rng, dim));
  return SubspaceF2(dim, g);
}

// Every element of A, checked for membership in B by brute force over B.
std::set<std::string> brute_intersection(const SubspaceF2& a, const SubspaceF2& b) {
  std::set<std::string> in_b;
  for (const auto& v : b.elements()) in_b.insert(v.to_string());
  std::set<std::string> out;
  for (const auto& v : a.elements())
    if (in_b.count(v.to_string())) out.insert(v.to_string());
  return out;
}

std::set<std::string> as_set(const SubspaceF2& s) {
  std::set<std::string> out;
  for (const auto& v : s.elements()) out.insert(v.to_string());
  return out;
}

}  // namespace

TEST_CASE("BitVector basics") {
  const auto v = BitVector::from_string("1011");
  CHECK(v.dim() == 4);
  CHECK(v.get(0));
  CHECK_FALSE(v.get(1));
  CHECK(v.popcount() == 3);
  CHECK(v.to_string() == "1011");
  CHECK(v.lowest_set_bit() == 0);
  CHECK(BitVector(5).lowest_set_bit() == 5);
  BitVector big(130);
  big.set(129);
  CHECK(big.lowest_set_bit() == 129);
  CHECK(big.slice(128, 2).to_string() == "01");
  CHECK(v.dot(BitVector::from_string("1001")) == 0);
  CHECK(v.dot(BitVector::from_string("0001")) == 1);
  CHECK_THROWS_AS(BitVector::from_string("10x"), InvalidArgument);
}

TEST_CASE("row_reduce examples") {
  std::vector<BitVector> g{BitVector::from_string("110"), BitVector::from_string("011"), BitVector::from_string("101")};
  const auto r = row_reduce(g, 3);
  CHECK(r.rank() == 2);
  CHECK(SubspaceF2(3, r.basis) == SubspaceF2(3, std::vector<BitVector>{g[0], g[1]}));
  CHECK(SubspaceF2(3, r.basis).contains(BitVector::from_string("110")));
  CHECK(SubspaceF2(3, r.basis).contains(BitVector::from_string("011")));
  CHECK(row_reduce({}, 4).rank() == 0);
  std::vector<BitVector> z{BitVector(4)};
  CHECK(row_reduce(z, 4).rank() == 0);
  std::vector<BitVector> ragged{BitVector(3), BitVector(4)};
  CHECK_THROWS_AS(row_reduce(ragged, 3), InvalidArgument);
}

TEST_CASE("row_reduce rank matches the element count") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 200; ++t) {
    const std::size_t dim = 1 + rng() % 14, gens = rng() % 10;
    std::vector<BitVector> g;
    for (std::size_t i = 0; i < gens; ++i) g.push_back(random_vector(rng, dim));
    // span by closure
    std::set<std::string> span{BitVector(dim).to_string()};
    std::vector<BitVector> elems{BitVector(dim)};
    for (const auto& x : g) {
      const auto n = elems.size();
      for (std::size_t i = 0; i < n; ++i) {
        auto y = elems[i] ^ x;
        if (span.insert(y.to_string()).second) elems.push_back(y);
      }
    }
    const auto r = row_reduce(g, dim);
    REQUIRE((std::size_t{1} << r.rank()) == span.size());
    // reduced echelon: pivots ascending and cleared elsewhere
    for (std::size_t i = 0; i < r.rank(); ++i) {
      CHECK(r.basis[i].lowest_set_bit() == r.pivots[i]);
      if (i) CHECK(r.pivots[i - 1] < r.pivots[i]);
      for (std::size_t j = 0; j < r.rank(); ++j)
        if (j != i) CHECK_FALSE(r.basis[j].get(r.pivots[i]));
    }
  }
}

TEST_CASE("intersect examples") {
  std::mt19937_64 rng(22);
  const auto A = random_subspace(rng, 8, 4);
  CHECK(intersect(A, A) == A);
  const SubspaceF2 x(2, std::vector<BitVector>{BitVector::from_string("10")});
  const SubspaceF2 y(2, std::vector<BitVector>{BitVector::from_string("01")});
  CHECK(intersect(x, y).rank() == 0);
  CHECK_THROWS_AS(intersect(x, SubspaceF2(3)), InvalidArgument);
}

TEST_CASE("intersect against enumeration in dimension 20") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 60; ++t) {
    const auto A = random_subspace(rng, 20, 1 + rng() % 12);
    const auto B = random_subspace(rng, 20, 1 + rng() % 12);
    const auto C = intersect(A, B);
    REQUIRE(as_set(C) == brute_intersection(A, B));
    // dim(A + B) + dim(A n B) = dim A + dim B
    CHECK(subspace_sum(A, B).rank() + C.rank() == A.rank() + B.rank());
    CHECK(intersect(B, A) == C);
  }
}

TEST_CASE("intersect is associative") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 50; ++t) {
    const auto A = random_subspace(rng, 16, 10), B = random_subspace(rng, 16, 11), C = random_subspace(rng, 16, 12);
    CHECK(intersect(intersect(A, B), C) == intersect(A, intersect(B, C)));
  }
}

TEST_CASE("pair and forms") {
  const auto w = BilinearFormF2::standard_symplectic(1);
  CHECK(pair(BitVector::from_string("10"), BitVector::from_string("01"), w) == 1);
  CHECK(w.is_alternating());
  CHECK(w.is_nondegenerate());
  const auto w4 = BilinearFormF2::standard_symplectic(3);
  std::mt19937_64 rng(25);
  for (int t = 0; t < 100; ++t) {
    const auto u = random_vector(rng, 6), v = random_vector(rng, 6), x = random_vector(rng, 6);
    CHECK(pair(u, u, w4) == 0);
    CHECK(pair(u, v, w4) == pair(v, u, w4));
    CHECK(pair(u ^ x, v, w4) == (pair(u, v, w4) ^ pair(x, v, w4)));
  }
  CHECK_THROWS_AS(pair(BitVector(3), BitVector(2), w), InvalidArgument);
  std::vector<BilinearFormF2> blocks{w, w4};
  const auto sum = BilinearFormF2::direct_sum(blocks);
  CHECK(sum.dim() == 8);
  CHECK(sum.is_nondegenerate());
  std::vector<BitVector> degenerate{BitVector::from_string("00"), BitVector::from_string("00")};
  CHECK_FALSE(BilinearFormF2(degenerate).is_nondegenerate());
}

TEST_CASE("is_lagrangian examples") {
  const auto w = BilinearFormF2::standard_symplectic(1);
  CHECK(is_lagrangian(SubspaceF2(2, std::vector<BitVector>{BitVector::from_string("10")}), w));
  CHECK_FALSE(is_lagrangian(SubspaceF2::full(2), w));
  const auto w3 = BilinearFormF2::standard_symplectic(3);
  CHECK_FALSE(is_lagrangian(SubspaceF2::full(6), w3));
  // span{e1, e2, e3} is Lagrangian for the standard form on F2^6
  std::vector<BitVector> half{BitVector::unit(6, 0), BitVector::unit(6, 1), BitVector::unit(6, 2)};
  CHECK(is_lagrangian(SubspaceF2(6, half), w3));
  CHECK(is_isotropic(SubspaceF2(6, std::vector<BitVector>{half[0]}), w3));
  // odd dimension is refused
  std::vector<BitVector> odd(3, BitVector(3));
  CHECK_THROWS_AS(is_lagrangian(SubspaceF2(3), BilinearFormF2(odd)), InvalidArgument);
}
