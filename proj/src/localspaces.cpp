#include "twistrank/localspaces.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numeric>

#include "json.hpp"

#include "twistrank/errors.hpp"
#include "twistrank/util.hpp"

namespace twistrank {

namespace {

constexpr std::int64_t kMaxRoot = std::int64_t{1} << 31;

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
  const auto l = static_cast<i128>(a) / std::gcd(a, b) * b;
  if (l > kMaxRoot) throw InvalidArgument("TwistFamily: denominators too large");
  return static_cast<std::int64_t>(l);
}

PlaceSlot slot_for(const Place& place) {
  PlaceSlot s;
  s.kind = place.kind();
  s.prime = place.prime();
  s.eps = (place.kind() == Place::Kind::OddPrime && place.prime() % 4 == 3) ? 1 : 0;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// TwistFamily

TwistFamily TwistFamily::make(const std::array<Rational, 3>& c, std::span<const std::uint64_t> extra_primes,
                              std::uint64_t D) {
  std::int64_t den = 1;
  for (const auto& r : c) {
    if (r.den <= 0) throw InvalidArgument("TwistFamily: denominators must be positive");
    den = lcm_checked(den, r.den);
  }
  std::array<std::int64_t, 3> ci{};
  for (int i = 0; i < 3; ++i) {
    // c_i * den^2 is an integer: the curve x -> den^2 x is isomorphic.
    const i128 v = static_cast<i128>(c[i].num) * (den / c[i].den) * den;
    if (v >= kMaxRoot || v <= -kMaxRoot) throw InvalidArgument("TwistFamily: roots too large");
    ci[i] = static_cast<std::int64_t>(v);
  }
  return make(ci, extra_primes, D);
}

TwistFamily TwistFamily::make(const std::array<std::int64_t, 3>& c, std::span<const std::uint64_t> extra_primes,
                              std::uint64_t D) {
  TwistFamily f;
  f.c_ = c;
  for (auto v : c) {
    if (v >= kMaxRoot || v <= -kMaxRoot) throw InvalidArgument("TwistFamily: roots too large");
  }
  if (c[0] == c[1] || c[0] == c[2] || c[1] == c[2]) throw InvalidArgument("TwistFamily: roots must be distinct");
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const i128 prod = static_cast<i128>(c[i] - c[j]) * (c[i] - c[k]);
    if (is_perfect_square(prod)) {
      throw InvalidArgument("TwistFamily: (c" + std::to_string(i + 1) + "-c" + std::to_string(j + 1) + ")(c" +
                            std::to_string(i + 1) + "-c" + std::to_string(k + 1) + ") is a square");
    }
  }
  std::vector<std::uint64_t> odd;
  for (auto d : {c[0] - c[1], c[0] - c[2], c[1] - c[2]}) {
    for (auto p : prime_factors(static_cast<std::uint64_t>(d < 0 ? -d : d))) {
      if (p != 2) odd.push_back(p);
    }
  }
  for (auto p : extra_primes) {
    if (!is_prime(p)) throw InvalidArgument("TwistFamily: extra place " + std::to_string(p) + " is not prime");
    if (p != 2) odd.push_back(p);
  }
  std::sort(odd.begin(), odd.end());
  odd.erase(std::unique(odd.begin(), odd.end()), odd.end());
  f.odd_primes_ = odd;
  f.places_ = {Place::infinity(), Place::two()};
  for (auto p : odd) f.places_.push_back(Place::odd_prime(p));

  std::uint64_t canonical = 8;
  for (auto p : odd) {
    if (canonical > (std::uint64_t{1} << 40) / p) throw InvalidArgument("TwistFamily: D too large");
    canonical *= p;
  }
  if (D == 0) D = canonical;
  if (D % 8 != 0) throw InvalidArgument("TwistFamily: D must be divisible by 8");
  for (auto p : odd) {
    if (D % p != 0) throw InvalidArgument("TwistFamily: D must be divisible by " + std::to_string(p));
  }
  f.D_ = D;
  f.residues_ = std::make_shared<const ResidueClasses>(D);
  return f;
}

bool TwistFamily::in_S(std::uint64_t p) const {
  return p == 2 || std::binary_search(odd_primes_.begin(), odd_primes_.end(), p);
}

std::string TwistFamily::key() const {
  std::string s = "c=" + std::to_string(c_[0]) + "," + std::to_string(c_[1]) + "," + std::to_string(c_[2]) + ";S=";
  for (std::size_t i = 0; i < places_.size(); ++i) s += (i ? "," : "") + places_[i].name();
  s += ";D=" + std::to_string(D_);
  return s;
}

// ---------------------------------------------------------------------------
// Local spaces

std::size_t PlaceSlot::class_dim() const {
  switch (kind) {
    case Place::Kind::Infinity:
      return 1;
    case Place::Kind::Two:
      return 3;
    case Place::Kind::OddPrime:
      return 2;
  }
  return 0;
}

std::string PlaceSlot::name() const {
  if (kind == Place::Kind::Infinity) return "inf";
  if (prime != 0) return std::to_string(prime);
  return "p?";
}

LocalTripleSpace LocalTripleSpace::make(const PlaceSlot& slot) {
  LocalTripleSpace v;
  v.slot = slot;
  v.class_dim = slot.class_dim();
  v.dim = 2 * v.class_dim;
  for (std::size_t k = 0; k < v.class_dim; ++k) {
    const auto e = static_cast<std::uint8_t>(1u << k);
    v.basis_labels.push_back({e, 0, e});
  }
  for (std::size_t k = 0; k < v.class_dim; ++k) {
    const auto e = static_cast<std::uint8_t>(1u << k);
    v.basis_labels.push_back({0, e, e});
  }
  std::vector<BitVector> gram(v.dim, BitVector(v.dim));
  for (std::size_t a = 0; a < v.dim; ++a) {
    for (std::size_t b = 0; b < v.dim; ++b) {
      int bit = 0;
      for (int i = 0; i < 3; ++i) {
        bit ^= hilbert_bit_raw(slot.kind, slot.eps, v.basis_labels[a][i], v.basis_labels[b][i]);
      }
      gram[a].set(b, bit != 0);
    }
  }
  v.form = BilinearFormF2(std::move(gram));
  return v;
}

BitVector LocalTripleSpace::encode(std::uint8_t u1, std::uint8_t u2) const {
  BitVector out(dim);
  for (std::size_t k = 0; k < class_dim; ++k) {
    if ((u1 >> k) & 1u) out.set(k);
    if ((u2 >> k) & 1u) out.set(class_dim + k);
  }
  return out;
}

BitVector LocalTripleSpace::encode_triple(std::uint8_t u1, std::uint8_t u2, std::uint8_t u3) const {
  if ((u1 ^ u2 ^ u3) != 0) throw InvalidArgument("LocalTripleSpace: triple does not multiply to 1");
  return encode(u1, u2);
}

std::array<std::uint8_t, 3> LocalTripleSpace::decode(const BitVector& v) const {
  std::uint8_t u1 = 0, u2 = 0;
  for (std::size_t k = 0; k < class_dim; ++k) {
    if (v.get(k)) u1 |= static_cast<std::uint8_t>(1u << k);
    if (v.get(class_dim + k)) u2 |= static_cast<std::uint8_t>(1u << k);
  }
  return {u1, u2, static_cast<std::uint8_t>(u1 ^ u2)};
}

// ---------------------------------------------------------------------------
// Twist symbols

void validate_twist(const TwistFamily& family, std::int64_t b, bool require_coprime) {
  if (b == 0) throw InvalidTwist("twist b must be nonzero");
  if (b >= kMaxRoot || b <= -kMaxRoot) throw InvalidTwist("twist b out of range: " + std::to_string(b));
  const auto mag = static_cast<std::uint64_t>(b < 0 ? -b : b);
  if (!is_squarefree(mag)) throw InvalidTwist("twist b = " + std::to_string(b) + " is not squarefree");
  if (require_coprime && std::gcd(mag, family.D()) != 1) {
    throw InvalidTwist("twist b = " + std::to_string(b) + " shares a prime with D = " + std::to_string(family.D()));
  }
}

TwistSymbols symbols_for_twist(const TwistFamily& family, std::int64_t b) {
  validate_twist(family, b, false);
  TwistSymbols s;
  const auto& odd = family.odd_primes();
  s.negative = b < 0;
  s.s_exponents.assign(2 + odd.size(), 0);
  s.s_exponents[0] = s.negative ? 1 : 0;
  const auto mag = static_cast<std::uint64_t>(b < 0 ? -b : b);
  for (auto p : prime_factors(mag == 0 ? 1 : mag)) {
    if (p == 2) {
      s.s_exponents[1] = 1;
    } else if (family.in_S(p)) {
      const auto idx = std::lower_bound(odd.begin(), odd.end(), p) - odd.begin();
      s.s_exponents[2 + static_cast<std::size_t>(idx)] = 1;
    } else {
      s.primes.push_back(p);
    }
  }
  std::vector<std::int64_t> s_gens{-1, 2};
  for (auto q : odd) s_gens.push_back(static_cast<std::int64_t>(q));

  const std::size_t n = s.primes.size();
  s.eps.resize(n);
  s.s_gen_at_twist.assign(n, std::vector<std::uint8_t>(s_gens.size()));
  s.nonresidue.assign(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const Place pi = Place::odd_prime(s.primes[i]);
    s.eps[i] = epsilon(static_cast<std::int64_t>(s.primes[i]));
    for (std::size_t g = 0; g < s_gens.size(); ++g) s.s_gen_at_twist[i][g] = square_class(s_gens[g], pi).bits();
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) s.nonresidue[i][j] = jacobi(static_cast<i128>(s.primes[j]), s.primes[i]) == -1 ? 1 : 0;
    }
  }
  s.twist_at_s.assign(family.places().size(), std::vector<std::uint8_t>(n));
  for (std::size_t v = 0; v < family.places().size(); ++v) {
    for (std::size_t i = 0; i < n; ++i) {
      s.twist_at_s[v][i] = square_class(static_cast<i128>(s.primes[i]), family.places()[v]).bits();
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// GlobalSpace

GlobalSpace::GlobalSpace(const TwistFamily& family, TwistSymbols symbols)
    : family_(family), symbols_(std::move(symbols)) {
  const auto& S = family_.places();
  const std::size_t n = symbols_.n();
  const std::size_t s_gens = 2 + family_.odd_primes().size();
  if (symbols_.s_exponents.size() != s_gens || symbols_.s_gen_at_twist.size() != n ||
      symbols_.nonresidue.size() != n || symbols_.twist_at_s.size() != S.size()) {
    throw InvalidArgument("GlobalSpace: inconsistent twist symbols");
  }
  for (const auto& p : S) places_.push_back(slot_for(p));
  for (std::size_t i = 0; i < n; ++i) {
    PlaceSlot t;
    t.kind = Place::Kind::OddPrime;
    t.prime = symbols_.primes.empty() ? 0 : symbols_.primes[i];
    t.eps = symbols_.eps[i] & 1;
    t.twist = true;
    places_.push_back(t);
  }
  std::vector<BilinearFormF2> forms;
  for (const auto& slot : places_) {
    blocks_.push_back(LocalTripleSpace::make(slot));
    offsets_.push_back(dim_);
    dim_ += blocks_.back().dim;
    forms.push_back(blocks_.back().form);
  }
  form_ = BilinearFormF2::direct_sum(forms);

  const std::size_t gens = num_generators();
  std::vector<std::int64_t> s_values{-1, 2};
  for (auto q : family_.odd_primes()) s_values.push_back(static_cast<std::int64_t>(q));
  gen_class_.assign(places_.size(), std::vector<std::uint8_t>(gens, 0));
  for (std::size_t v = 0; v < S.size(); ++v) {
    for (std::size_t g = 0; g < s_gens; ++g) gen_class_[v][g] = square_class(s_values[g], S[v]).bits();
    for (std::size_t i = 0; i < n; ++i) gen_class_[v][s_gens + i] = symbols_.twist_at_s[v][i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = gen_class_[S.size() + i];
    for (std::size_t g = 0; g < s_gens; ++g) row[g] = symbols_.s_gen_at_twist[i][g];
    for (std::size_t j = 0; j < n; ++j) {
      // p_i at p_i: odd valuation, unit part 1. p_j at p_i: a unit.
      row[s_gens + j] = (i == j) ? std::uint8_t{1} : static_cast<std::uint8_t>(symbols_.nonresidue[i][j] << 1);
    }
  }
  b_exponents_ = symbols_.s_exponents;
  b_exponents_.resize(gens, 1);
}

std::uint8_t GlobalSpace::generator_class(std::size_t block, std::size_t gen) const {
  return gen_class_[block][gen];
}

std::uint8_t GlobalSpace::class_of(std::size_t block, std::span<const std::uint8_t> exponents) const {
  std::uint8_t c = 0;
  for (std::size_t g = 0; g < exponents.size(); ++g) {
    if (exponents[g] & 1u) c ^= gen_class_[block][g];
  }
  return c;
}

std::vector<std::uint8_t> GlobalSpace::s_unit_exponents(std::int64_t x) const {
  if (x == 0) throw InvalidArgument("s_unit_exponents: zero");
  std::vector<std::uint8_t> e(num_generators(), 0);
  e[0] = x < 0 ? 1 : 0;
  auto m = static_cast<std::uint64_t>(x < 0 ? -x : x);
  int v = 0;
  while (m % 2 == 0) {
    m /= 2;
    ++v;
  }
  e[1] = static_cast<std::uint8_t>(v & 1);
  const auto& odd = family_.odd_primes();
  for (std::size_t k = 0; k < odd.size(); ++k) {
    v = 0;
    while (m % odd[k] == 0) {
      m /= odd[k];
      ++v;
    }
    e[2 + k] = static_cast<std::uint8_t>(v & 1);
  }
  if (!is_perfect_square(m)) throw InvalidArgument("s_unit_exponents: not an S-unit up to squares");
  return e;
}

BitVector GlobalSpace::embed(std::span<const std::uint8_t> x1, std::span<const std::uint8_t> x2) const {
  BitVector out(dim_);
  for (std::size_t v = 0; v < blocks_.size(); ++v) {
    out.place(offsets_[v], blocks_[v].encode(class_of(v, x1), class_of(v, x2)));
  }
  return out;
}

GlobalSpace build_V(const TwistFamily& family, std::int64_t b) {
  GlobalSpace space(family, symbols_for_twist(family, b));
  space.set_b(b);
  return space;
}

// ---------------------------------------------------------------------------
// U and W

SubspaceF2 U_subspace(const GlobalSpace& space) {
  const std::size_t gens = space.num_generators();
  const std::vector<std::uint8_t> zero(gens, 0);
  std::vector<BitVector> out;
  for (std::size_t g = 0; g < gens; ++g) {
    std::vector<std::uint8_t> e(gens, 0);
    e[g] = 1;
    out.push_back(space.embed(e, e));     // (g, g, 1)
    out.push_back(space.embed(zero, e));  // (1, g, g)
  }
  return SubspaceF2(space.dim(), out);
}

std::array<BitVector, 2> W_twist_prime(const TwistFamily& family, std::int64_t b, std::uint64_t p) {
  if (p < 3 || !is_prime(p)) throw InvalidArgument("W_twist_prime: p must be an odd prime");
  if (b == 0 || b % static_cast<std::int64_t>(p) != 0) throw InvalidArgument("W_twist_prime: p does not divide b");
  if (family.D() % p == 0) throw InvalidArgument("W_twist_prime: p divides D");
  const Place place = Place::odd_prime(p);
  const auto V = LocalTripleSpace::make(slot_for(place));
  const auto& c = family.c();
  auto cls = [&](i128 x) { return square_class(x, place).bits(); };
  const i128 d12 = c[0] - c[1], d13 = c[0] - c[2], d31 = c[2] - c[0], d32 = c[2] - c[1];
  const BitVector t1 = V.encode_triple(cls(d12 * d13), cls(b * d12), cls(b * d13));
  const BitVector t3 = V.encode_triple(cls(b * d31), cls(b * d32), cls(d31 * d32));
  return {t1, t3};
}

SubspaceF2 W_local_image(const TwistFamily& family, std::int64_t b, const Place& place,
                         const LocalImageOptions& options) {
  if (b == 0) throw InvalidArgument("W_local_image: b must be nonzero");
  const auto V = LocalTripleSpace::make(slot_for(place));
  const std::size_t target = V.class_dim;
  const auto& c = family.c();
  const std::array<i128, 3> e{static_cast<i128>(b) * c[0], static_cast<i128>(b) * c[1],
                              static_cast<i128>(b) * c[2]};
  auto cls = [&](i128 x) { return square_class(x, place).bits(); };

  SubspaceF2 W(V.dim);
  std::uint64_t seen = 0;  // class pairs already offered, indexed by encode bits
  auto offer = [&](std::uint8_t u1, std::uint8_t u2) {
    const unsigned idx = u1 | (static_cast<unsigned>(u2) << V.class_dim);
    if ((seen >> idx) & 1u) return false;
    seen |= std::uint64_t{1} << idx;
    const BitVector v = V.encode(u1, u2);
    if (!W.contains(v)) W.add(v);
    return W.rank() == target;
  };

  // 2-torsion: the vanishing coordinate is replaced by the product of the others.
  for (int i = 0; i < 3; ++i) {
    std::array<std::uint8_t, 3> t{};
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    t[j] = cls(e[i] - e[j]);
    t[k] = cls(e[i] - e[k]);
    t[i] = static_cast<std::uint8_t>(t[j] ^ t[k]);
    if (offer(t[0], t[1])) return W;
  }

  const std::uint64_t base = place.is_finite() ? place.prime() : 2;
  const std::uint8_t base_class = place.is_finite() ? cls(static_cast<i128>(base)) : 0;
  constexpr i128 kScaleCap = i128{1} << 40;
  for (int k : options.schedule) {
    // radius = min(base^k, 2^(k+10))
    i128 radius = 1;
    for (int t = 0; t < k && radius <= (i128{1} << (k + 10)); ++t) radius *= base;
    radius = std::min(radius, i128{1} << std::min(k + 10, 40));
    i128 scale = 1;
    for (int j = 0; j <= k; ++j, scale *= base) {
      if (scale > kScaleCap) break;
      const std::uint8_t shift = (j & 1) ? base_class : 0;
      const std::array<i128, 4> centers{0, e[0] * scale, e[1] * scale, e[2] * scale};
      for (const i128 center : centers) {
        for (i128 a = center - radius; a <= center + radius; ++a) {
          const i128 t0 = a - e[0] * scale, t1 = a - e[1] * scale, t2 = a - e[2] * scale;
          if (t0 == 0 || t1 == 0 || t2 == 0) continue;
          // x = a / base^j; x - e_i = t_i / base^j.
          const std::uint8_t c0 = cls(t0) ^ shift;
          const std::uint8_t c1 = cls(t1) ^ shift;
          const std::uint8_t c2 = cls(t2) ^ shift;
          if ((c0 ^ c1 ^ c2) != 0) continue;  // f(x) not a local square
          if (offer(c0, c1)) return W;
        }
      }
    }
  }
  throw PrecisionExhausted("W_local_image: rank " + std::to_string(W.rank()) + " < " + std::to_string(target) +
                           " at place " + place.name() + " for b = " + std::to_string(b));
}

SubspaceF2 W_subspace(const GlobalSpace& space, LocalImageCache& cache) {
  const auto& family = space.family();
  const auto& S = family.places();
  std::vector<BitVector> gens;
  for (std::size_t v = 0; v < S.size(); ++v) {
    const std::uint8_t b_class = space.class_of(v, space.b_exponents());
    for (const auto& w : cache.get(family, S[v], b_class)) {
      BitVector g(space.dim());
      g.place(space.offset(v), w);
      gens.push_back(std::move(g));
    }
  }
  const auto& c = family.c();
  const auto& be = space.b_exponents();
  auto mul = [](std::vector<std::uint8_t> a, const std::vector<std::uint8_t>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
    return a;
  };
  const auto d12 = space.s_unit_exponents(c[0] - c[1]);
  const auto d13 = space.s_unit_exponents(c[0] - c[2]);
  const auto d31 = space.s_unit_exponents(c[2] - c[0]);
  const auto d32 = space.s_unit_exponents(c[2] - c[1]);
  const auto t1_x1 = mul(d12, d13), t1_x2 = mul(be, d12);
  const auto t3_x1 = mul(be, d31), t3_x2 = mul(be, d32);
  for (std::size_t v = S.size(); v < space.places().size(); ++v) {
    const auto& block = space.blocks()[v];
    for (const auto& [x1, x2] : {std::pair{&t1_x1, &t1_x2}, std::pair{&t3_x1, &t3_x2}}) {
      BitVector g(space.dim());
      g.place(space.offset(v), block.encode(space.class_of(v, *x1), space.class_of(v, *x2)));
      gens.push_back(std::move(g));
    }
  }
  return SubspaceF2(space.dim(), gens);
}

SubspaceF2 W_subspace(const GlobalSpace& space) { return W_subspace(space, LocalImageCache::global()); }

// ---------------------------------------------------------------------------
// LocalImageCache

LocalImageCache::LocalImageCache(std::optional<std::filesystem::path> directory) : directory_(std::move(directory)) {}

LocalImageCache& LocalImageCache::global() {
  static LocalImageCache cache([]() -> std::optional<std::filesystem::path> {
    if (const char* dir = std::getenv("TWISTRANK_CACHE"); dir && *dir) return std::filesystem::path(dir);
    return std::nullopt;
  }());
  return cache;
}

std::size_t LocalImageCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

namespace {

std::string cache_key(const TwistFamily& family, const Place& place, std::uint8_t b_class) {
  return family.key() + "|" + place.name() + "|" + std::to_string(b_class);
}

std::filesystem::path family_file(const std::filesystem::path& dir, const TwistFamily& family) {
  return dir / ("wS_" + hex64(fnv1a64(family.key())) + ".json");
}

}  // namespace

std::vector<BitVector> LocalImageCache::get(const TwistFamily& family, const Place& place, std::uint8_t b_class) {
  const std::string key = cache_key(family, place, b_class);
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  if (directory_) {
    std::unique_lock lock(mutex_);
    if (!loaded_families_[family.key()]) {
      load_family(family);
      loaded_families_[family.key()] = true;
      if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
  }
  const std::int64_t rep = class_representative(SquareClass(place, b_class));
  const auto image = W_local_image(family, rep, place);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, image.basis());
  if (inserted) {
    ++misses_;
    if (directory_) persist_family(family);
  }
  return it->second;
}

void LocalImageCache::load_family(const TwistFamily& family) {
  const auto path = family_file(*directory_, family);
  std::ifstream in(path);
  if (!in) return;
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.at("family").get<std::string>() != family.key()) return;
    for (const auto& [k, rows] : doc.at("entries").items()) {
      std::vector<BitVector> basis;
      for (const auto& r : rows) basis.push_back(BitVector::from_string(r.get<std::string>()));
      entries_.emplace(family.key() + "|" + k, std::move(basis));
    }
  } catch (const std::exception&) {
    // Unreadable cache files are ignored and rebuilt.
  }
}

void LocalImageCache::persist_family(const TwistFamily& family) {
  std::error_code ec;
  std::filesystem::create_directories(*directory_, ec);
  nlohmann::json doc;
  doc["family"] = family.key();
  doc["version"] = std::string(kCodeVersion);
  auto& entries = doc["entries"] = nlohmann::json::object();
  const std::string prefix = family.key() + "|";
  for (const auto& [k, basis] : entries_) {
    if (k.compare(0, prefix.size(), prefix) != 0) continue;
    auto rows = nlohmann::json::array();
    for (const auto& v : basis) rows.push_back(v.to_string());
    entries[k.substr(prefix.size())] = rows;
  }
  const auto path = family_file(*directory_, family);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) return;
    out << doc.dump(1) << '\n';
  }
  std::filesystem::rename(tmp, path, ec);
}

}  // namespace twistrank
