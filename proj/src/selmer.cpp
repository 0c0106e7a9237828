#include "twistrank/selmer.hpp"

#include <bit>
#include <numeric>

#include "twistrank/errors.hpp"

namespace twistrank {

SelmerAnalysis analyze_twist(const TwistFamily& family, std::int64_t b, LocalImageCache& cache) {
  GlobalSpace space = build_V(family, b);
  SubspaceF2 U = U_subspace(space);
  SubspaceF2 W = W_subspace(space, cache);
  SubspaceF2 S = intersect(U, W);
  return SelmerAnalysis{std::move(space), std::move(U), std::move(W), std::move(S)};
}

SelmerAnalysis analyze_twist(const TwistFamily& family, std::int64_t b) {
  return analyze_twist(family, b, LocalImageCache::global());
}

TwistRecord selmer_rank(const TwistFamily& family, std::int64_t b, LocalImageCache& cache) {
  const auto a = analyze_twist(family, b, cache);
  TwistRecord r;
  r.b = b;
  const auto mag = static_cast<std::uint64_t>(b < 0 ? -b : b);
  r.factors = prime_factors(mag);
  r.omega = static_cast<int>(r.factors.size());
  r.selmer_dim = static_cast<int>(a.selmer.rank());
  r.parity = r.selmer_dim & 1;
  if (std::gcd(mag, family.D()) == 1) {
    r.class_mod_D = family.residues().representative(family.residues().class_of(b));
  }
  return r;
}

TwistRecord selmer_rank(const TwistFamily& family, std::int64_t b) {
  return selmer_rank(family, b, LocalImageCache::global());
}

int selmer_rank_charsum(const TwistFamily& family, std::int64_t b, std::uint64_t max_pairs) {
  const GlobalSpace space = build_V(family, b);
  const std::size_t M = space.M();
  if (2 * M >= 63 || (std::uint64_t{1} << (2 * M)) > max_pairs) {
    throw BudgetExceeded("oracle-too-large: 2^" + std::to_string(2 * M) + " pair evaluations");
  }
  const SubspaceF2 U = U_subspace(space);
  const SubspaceF2 W = W_subspace(space);
  const auto& ub = U.basis();
  const auto& wb = W.basis();
  // beta(u) bit j = <u, w_j>; the pairing on w = sum s_j w_j is popcount(s & beta) mod 2.
  std::vector<std::uint64_t> beta_basis(ub.size(), 0);
  for (std::size_t j = 0; j < wb.size(); ++j) {
    const BitVector gw = space.form().apply(wb[j]);
    for (std::size_t i = 0; i < ub.size(); ++i) {
      if (ub[i].dot(gw)) beta_basis[i] |= std::uint64_t{1} << j;
    }
  }
  const std::uint64_t nu = std::uint64_t{1} << ub.size();
  const std::uint64_t nw = std::uint64_t{1} << wb.size();
  std::int64_t total = 0;
  std::uint64_t beta = 0;
  for (std::uint64_t k = 0; k < nu; ++k) {
    if (k) beta ^= beta_basis[static_cast<std::size_t>(std::countr_zero(k))];
    for (std::uint64_t s = 0; s < nw; ++s) total += (std::popcount(s & beta) & 1) ? -1 : 1;
  }
  const auto value = total >> M;
  if ((value << M) != total || value <= 0 || !std::has_single_bit(static_cast<std::uint64_t>(value))) {
    throw std::logic_error("selmer_rank_charsum: sum is not 2^M times a power of two");
  }
  return std::countr_zero(static_cast<std::uint64_t>(value));
}

int character_average(const SubspaceF2& U, const BilinearFormF2& form, const BitVector& v) {
  const BitVector gv = form.apply(v);
  std::int64_t total = 0;
  for (const auto& u : U.elements()) total += u.dot(gv) ? -1 : 1;
  return static_cast<int>(total >> U.rank());
}

// ---------------------------------------------------------------------------

void FormalTwistModel::validate(const TwistFamily& family) const {
  const std::size_t n = classes.size();
  for (auto c : classes) {
    if (c >= family.residues().size()) throw InvalidArgument("FormalTwistModel: class out of range");
  }
  if (legendre_bits.size() != n) throw InvalidArgument("FormalTwistModel: Legendre matrix has wrong size");
  for (std::size_t i = 0; i < n; ++i) {
    if (legendre_bits[i].size() != n) throw InvalidArgument("FormalTwistModel: Legendre matrix is not square");
    if (legendre_bits[i][i] != 0) throw InvalidArgument("FormalTwistModel: nonzero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      if (legendre_bits[i][j] > 1) throw InvalidArgument("FormalTwistModel: entries must be bits");
      if (legendre_bits[i][j] != legendre_bits[j][i]) throw InvalidArgument("FormalTwistModel: not symmetric");
    }
  }
}

FormalTwistModel FormalTwistModel::extract(const TwistFamily& family, std::int64_t b) {
  validate_twist(family, b, true);
  if (b < 0) throw InvalidTwist("FormalTwistModel: b must be positive");
  const auto primes = prime_factors(static_cast<std::uint64_t>(b));
  FormalTwistModel m;
  const std::size_t n = primes.size();
  m.legendre_bits.assign(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    m.classes.push_back(family.residues().class_of(static_cast<std::int64_t>(primes[i])));
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::uint8_t bit = legendre(static_cast<std::int64_t>(primes[i]), primes[j]) == -1 ? 1 : 0;
      m.legendre_bits[i][j] = m.legendre_bits[j][i] = bit;
    }
  }
  return m;
}

TwistSymbols symbols_for_model(const TwistFamily& family, const FormalTwistModel& model) {
  model.validate(family);
  const auto& R = family.residues();
  const auto& odd = family.odd_primes();
  const std::size_t n = model.n();
  TwistSymbols s;
  s.s_exponents.assign(2 + odd.size(), 0);
  s.eps.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.eps[i] = R.eps_bit(model.classes[i]);

  s.s_gen_at_twist.assign(n, std::vector<std::uint8_t>(2 + odd.size(), 0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto cls = model.classes[i];
    const int e = s.eps[i];
    auto& row = s.s_gen_at_twist[i];
    row[0] = static_cast<std::uint8_t>(e << 1);                 // (-1 / p) = (-1)^eps(p)
    row[1] = static_cast<std::uint8_t>(R.omega_bit(cls) << 1);  // (2 / p) = (-1)^omega(p)
    for (std::size_t k = 0; k < odd.size(); ++k) {
      // (q / p) = (p / q) (-1)^{eps(p) eps(q)}
      const int bit = R.qr_bit(cls, k) ^ (e & epsilon(static_cast<std::int64_t>(odd[k])));
      row[2 + k] = static_cast<std::uint8_t>(bit << 1);
    }
  }

  const auto& S = family.places();
  s.twist_at_s.assign(S.size(), std::vector<std::uint8_t>(n, 0));
  for (std::size_t v = 0; v < S.size(); ++v) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto cls = model.classes[i];
      std::uint8_t bits = 0;
      switch (S[v].kind()) {
        case Place::Kind::Infinity:
          break;
        case Place::Kind::Two:
          bits = static_cast<std::uint8_t>((R.eps_bit(cls) << 1) | (R.omega_bit(cls) << 2));
          break;
        case Place::Kind::OddPrime: {
          const auto k = static_cast<std::size_t>(
              std::lower_bound(odd.begin(), odd.end(), S[v].prime()) - odd.begin());
          bits = static_cast<std::uint8_t>(R.qr_bit(cls, k) << 1);
          break;
        }
      }
      s.twist_at_s[v][i] = bits;
    }
  }

  s.nonresidue.assign(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      // nonresidue[i][j] = (p_j / p_i); legendre_bits[a][b] with a < b is (p_a / p_b).
      s.nonresidue[i][j] = j < i ? model.legendre_bits[j][i]
                                 : static_cast<std::uint8_t>(model.legendre_bits[i][j] ^ (s.eps[i] & s.eps[j]));
    }
  }
  return s;
}

int selmer_rank_formal(const TwistFamily& family, const FormalTwistModel& model, LocalImageCache& cache) {
  const GlobalSpace space(family, symbols_for_model(family, model));
  return static_cast<int>(intersect(U_subspace(space), W_subspace(space, cache)).rank());
}

int selmer_rank_formal(const TwistFamily& family, const FormalTwistModel& model) {
  return selmer_rank_formal(family, model, LocalImageCache::global());
}

// ---------------------------------------------------------------------------

std::int64_t normalizing_twist(const TwistFamily& family) {
  const auto& c = family.c();
  std::int64_t g = std::gcd(std::gcd(c[0] - c[1], c[0] - c[2]), c[1] - c[2]);
  // Dividing the roots by g (a twist by g up to squares) leaves differences
  // with no common prime, and a prime dividing two of them divides the third.
  return squarefree_part(g);
}

namespace {

BitVector block_of(const GlobalSpace& space, std::size_t block, const BitVector& v) {
  return v.slice(space.offset(block), space.blocks()[block].dim);
}

int norm_index_term(const SubspaceF2& w_base, const SubspaceF2& w_twist) {
  const auto half = w_base.rank();
  return static_cast<int>((half - intersect(w_base, w_twist).rank()) & 1);
}

}  // namespace

ParityPrediction parity_predict(const TwistFamily& family, std::int64_t b) {
  auto& cache = LocalImageCache::global();
  ParityPrediction out;
  out.method = "local-norm-index";
  out.d = normalizing_twist(family);
  const GlobalSpace base_space = build_V(family, 1);
  out.base_parity =
      static_cast<int>(intersect(U_subspace(base_space), W_subspace(base_space, cache)).rank() & 1);

  const GlobalSpace space = build_V(family, b);
  const auto& S = family.places();
  for (std::size_t v = 0; v < S.size(); ++v) {
    const std::size_t dim = space.blocks()[v].dim;
    const SubspaceF2 w1(dim, cache.get(family, S[v], 0));
    const SubspaceF2 wb(dim, cache.get(family, S[v], space.class_of(v, space.b_exponents())));
    out.terms.push_back({S[v].name(), norm_index_term(w1, wb)});
  }
  if (space.places().size() > S.size()) {
    const SubspaceF2 W = W_subspace(space, cache);
    for (std::size_t v = S.size(); v < space.places().size(); ++v) {
      const auto& block = space.blocks()[v];
      // Good reduction at p: W_p(E) is the unramified subspace.
      const SubspaceF2 w1(block.dim, std::vector<BitVector>{block.encode(2, 0), block.encode(0, 2)});
      std::vector<BitVector> local;
      for (const auto& g : W.basis()) {
        const BitVector piece = block_of(space, v, g);
        if (!piece.is_zero()) local.push_back(piece);
      }
      const SubspaceF2 wb(block.dim, local);
      out.terms.push_back({space.places()[v].name(), norm_index_term(w1, wb)});
    }
  }
  for (const auto& t : out.terms) out.shift ^= t.term;
  out.parity = out.base_parity ^ out.shift;
  return out;
}

int parity_for_class(const TwistFamily& family, std::uint32_t cls) {
  const auto rep = family.residues().representative(cls);
  return parity_predict(family, static_cast<std::int64_t>(rep)).parity;
}

}  // namespace twistrank
