#pragma once

// Finite-dimensional commutative algebras over Q(q, z, lam, Lam) given by a
// basis and structure constants; models of H*(X) and K^0(X).

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mirrorkit/rational_function.hpp"
#include "mirrorkit/toric_model.hpp"

namespace mirrorkit {

enum class RingMode { cohomology, k_theory };

inline std::string to_string(RingMode m) { return m == RingMode::cohomology ? "cohomology" : "k_theory"; }

class RingElement;

class RingPresentation {
 public:
  struct Entry {
    std::size_t index;
    RatFunc coeff;
  };
  struct PolyEntry {
    std::size_t index;
    Poly coeff;
  };

  /// `table[a][b]` holds coordinates of basis_a * basis_b. `generators` are
  /// p_i (cohomology) or P_i (k_theory) as coordinate vectors.
  RingPresentation(RingMode mode, bool equivariant, std::vector<std::string> basis,
                   std::vector<std::vector<std::vector<RatFunc>>> table, std::vector<std::vector<RatFunc>> generators,
                   bool nilpotent_augmentation)
      : mode_(mode),
        equivariant_(equivariant),
        nilpotent_augmentation_(nilpotent_augmentation),
        basis_(std::move(basis)),
        table_(std::move(table)),
        generators_(std::move(generators)) {
    const std::size_t n = basis_.size();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "ring basis is empty");
    if (table_.size() != n) throw Error(ErrorKind::InvalidArgument, "multiplication table has wrong size");
    sparse_.assign(n, std::vector<std::vector<Entry>>(n));
    for (std::size_t a = 0; a < n; ++a) {
      if (table_[a].size() != n) throw Error(ErrorKind::InvalidArgument, "multiplication table has wrong size");
      for (std::size_t b = 0; b < n; ++b) {
        if (table_[a][b].size() != n) throw Error(ErrorKind::InvalidArgument, "table entry has wrong length");
        for (std::size_t c = 0; c < n; ++c)
          if (!table_[a][b][c].is_zero()) sparse_[a][b].push_back({c, table_[a][b][c]});
      }
    }
    std::vector<RatFunc> all;
    for (auto& row : sparse_)
      for (auto& cell : row)
        for (auto& e : cell) all.push_back(e.coeff);
    auto [nums, den] = over_common_denominator(all);
    table_den_ = std::move(den);
    poly_.assign(n, std::vector<std::vector<PolyEntry>>(n));
    std::size_t k = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (auto& e : sparse_[a][b]) poly_[a][b].push_back({e.index, std::move(nums[k++])});
    for (auto& g : generators_)
      if (g.size() != n) throw Error(ErrorKind::InvalidArgument, "generator has wrong length");
    unit_ = n;
    for (std::size_t u = 0; u < n && unit_ == n; ++u) {
      bool ok = true;
      for (std::size_t b = 0; b < n && ok; ++b)
        for (std::size_t c = 0; c < n && ok; ++c) ok = table_[u][b][c] == RatFunc(c == b ? 1 : 0);
      if (ok) unit_ = u;
    }
    if (unit_ == n) throw Error(ErrorKind::InvalidArgument, "no basis element acts as the unit");
  }

  RingMode mode() const { return mode_; }
  bool equivariant() const { return equivariant_; }
  /// True when every non-unit basis element is nilpotent, so x is a unit iff
  /// its unit coordinate is nonzero.
  bool nilpotent_augmentation() const { return nilpotent_augmentation_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<std::string>& basis() const { return basis_; }
  std::size_t unit_index() const { return unit_; }
  const std::vector<std::vector<std::vector<RatFunc>>>& table() const { return table_; }
  const std::vector<Entry>& product(std::size_t a, std::size_t b) const { return sparse_[a][b]; }
  /// Structure constants as numerators over table_denominator().
  const std::vector<PolyEntry>& product_numerators(std::size_t a, std::size_t b) const { return poly_[a][b]; }
  const Poly& table_denominator() const { return table_den_; }
  const std::vector<std::vector<RatFunc>>& generator_coordinates() const { return generators_; }
  std::size_t generator_count() const { return generators_.size(); }

 private:
  RingMode mode_;
  bool equivariant_;
  bool nilpotent_augmentation_;
  std::vector<std::string> basis_;
  std::vector<std::vector<std::vector<RatFunc>>> table_;
  std::vector<std::vector<std::vector<Entry>>> sparse_;
  std::vector<std::vector<std::vector<PolyEntry>>> poly_;
  Poly table_den_{1};
  std::vector<std::vector<RatFunc>> generators_;
  std::size_t unit_ = 0;
};

using RingPtr = std::shared_ptr<const RingPresentation>;

class RingElement {
 public:
  RingElement() = default;
  RingElement(RingPtr ring, std::vector<RatFunc> coords) : ring_(std::move(ring)), c_(std::move(coords)) {}

  static RingElement zero(const RingPtr& ring) { return RingElement(ring, std::vector<RatFunc>(ring->dim())); }
  static RingElement scalar(const RingPtr& ring, const RatFunc& s) {
    RingElement e = zero(ring);
    e.c_[ring->unit_index()] = s;
    return e;
  }
  static RingElement one(const RingPtr& ring) { return scalar(ring, RatFunc(1)); }
  static RingElement basis_element(const RingPtr& ring, std::size_t k) {
    RingElement e = zero(ring);
    e.c_[k] = RatFunc(1);
    return e;
  }
  static RingElement generator(const RingPtr& ring, std::size_t i) {
    return RingElement(ring, ring->generator_coordinates().at(i));
  }

  const RingPtr& ring() const { return ring_; }
  const std::vector<RatFunc>& coords() const { return c_; }
  const RatFunc& operator[](std::size_t k) const { return c_[k]; }
  bool is_zero() const {
    for (auto& c : c_)
      if (!c.is_zero()) return false;
    return true;
  }
  bool is_scalar() const {
    for (std::size_t k = 0; k < c_.size(); ++k)
      if (k != ring_->unit_index() && !c_[k].is_zero()) return false;
    return true;
  }
  const RatFunc& scalar_part() const { return c_[ring_->unit_index()]; }

  friend RingElement operator+(RingElement a, const RingElement& b) {
    check_same(a, b);
    for (std::size_t k = 0; k < a.c_.size(); ++k) a.c_[k] += b.c_[k];
    return a;
  }
  friend RingElement operator-(RingElement a, const RingElement& b) {
    check_same(a, b);
    for (std::size_t k = 0; k < a.c_.size(); ++k) a.c_[k] -= b.c_[k];
    return a;
  }
  friend RingElement operator-(RingElement a) {
    for (auto& c : a.c_) c = -c;
    return a;
  }
  friend RingElement operator*(const RingElement& a, const RingElement& b) {
    check_same(a, b);
    const auto& R = *a.ring_;
    if (a.is_scalar()) return b * a.scalar_part();
    if (b.is_scalar()) return a * b.scalar_part();
    // one normalization per output coordinate
    auto [A, Da] = over_common_denominator(a.c_);
    auto [B, Db] = over_common_denominator(b.c_);
    std::vector<Poly> N(a.c_.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (A[i].is_zero()) continue;
      for (std::size_t j = 0; j < B.size(); ++j) {
        if (B[j].is_zero()) continue;
        const auto& entries = R.product_numerators(i, j);
        if (entries.empty()) continue;
        Poly ab = A[i] * B[j];
        for (auto& e : entries) N[e.index] += e.coeff.is_constant() ? ab.scaled(e.coeff.constant_value()) : ab * e.coeff;
      }
    }
    Poly D = Da * Db * R.table_denominator();
    RingElement out = zero(a.ring_);
    for (std::size_t k = 0; k < N.size(); ++k)
      if (!N[k].is_zero()) out.c_[k] = RatFunc(std::move(N[k]), D);
    return out;
  }
  friend RingElement operator*(RingElement a, const RatFunc& s) {
    if (s.is_one()) return a;
    for (auto& c : a.c_) c *= s;
    return a;
  }
  friend RingElement operator*(const RatFunc& s, RingElement a) { return std::move(a) * s; }
  RingElement& operator+=(const RingElement& o) { return *this = *this + o; }
  RingElement& operator-=(const RingElement& o) { return *this = *this - o; }
  RingElement& operator*=(const RingElement& o) { return *this = *this * o; }

  friend bool operator==(const RingElement& a, const RingElement& b) { return a.ring_ == b.ring_ && a.c_ == b.c_; }
  friend bool operator!=(const RingElement& a, const RingElement& b) { return !(a == b); }

  /// Inverse of a unit. With a nilpotent augmentation, x = c(1 + n) and the
  /// inverse is the finite series c^{-1} sum_k (-n)^k; otherwise the linear
  /// system x * y = 1 is solved over the coefficient field.
  RingElement inverse() const;

  RingElement pow(int n) const {
    if (n < 0) return inverse().pow(-n);
    RingElement r = one(ring_), b = *this;
    while (n) {
      if (n & 1) r *= b;
      n >>= 1;
      if (n) b *= b;
    }
    return r;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t k = 0; k < c_.size(); ++k) {
      if (c_[k].is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += "(" + c_[k].to_string() + ")";
      if (k != ring_->unit_index()) s += "*" + ring_->basis()[k];
    }
    return s.empty() ? "0" : s;
  }

 private:
  static void check_same(const RingElement& a, const RingElement& b) {
    if (a.ring_ != b.ring_) throw Error(ErrorKind::RingMismatch, "ring elements from different presentations");
  }

  RingPtr ring_;
  std::vector<RatFunc> c_;
};

inline RingElement RingElement::inverse() const {
  const auto& R = *ring_;
  const std::size_t n = R.dim();
  if (is_scalar()) {
    if (scalar_part().is_zero()) throw Error(ErrorKind::NotAUnit, "zero is not a unit");
    return scalar(ring_, scalar_part().inverse());
  }
  if (R.nilpotent_augmentation()) {
    const RatFunc& c = scalar_part();
    if (c.is_zero()) throw Error(ErrorKind::NotAUnit, "element has zero scalar part: " + to_string());
    RatFunc cinv = c.inverse();
    RingElement nil = *this * cinv - one(ring_);
    RingElement term = one(ring_), acc = one(ring_);
    RingElement mnil = -nil;
    for (std::size_t k = 1; k <= n; ++k) {
      term *= mnil;
      if (term.is_zero()) break;
      acc += term;
    }
    return acc * cinv;
  }
  // column b of M is (*this) * basis_b
  std::vector<std::vector<RatFunc>> M(n, std::vector<RatFunc>(n + 1));
  for (std::size_t b = 0; b < n; ++b) {
    RingElement col = *this * basis_element(ring_, b);
    for (std::size_t r = 0; r < n; ++r) M[r][b] = col.c_[r];
  }
  M[R.unit_index()][n] = RatFunc(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && M[p][c].is_zero()) ++p;
    if (p == n) throw Error(ErrorKind::NotAUnit, "element is not invertible: " + to_string());
    std::swap(M[p], M[c]);
    RatFunc inv = M[c][c].inverse();
    for (std::size_t k = c; k <= n; ++k) M[c][k] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || M[r][c].is_zero()) continue;
      RatFunc f = M[r][c];
      for (std::size_t k = c; k <= n; ++k) M[r][k] -= f * M[c][k];
    }
  }
  std::vector<RatFunc> y(n);
  for (std::size_t r = 0; r < n; ++r) y[r] = M[r][n];
  return RingElement(ring_, std::move(y));
}

/// Ring together with the toric classes it carries: u_j (or U_j), V_a.
struct ToricRing {
  RingPtr ring;
  std::vector<RingElement> generators;  // p_i or P_i
  std::vector<RingElement> divisors;    // u_j = sum_i m_ij p_i - lam_j, or U_j = prod_i P_i^{m_ij}
  std::vector<RingElement> bundles;     // V_a = prod_i P_i^{l_ia} (k_theory only)
  std::vector<RatFunc> equivariant_parameters;  // lam_j or Lam_j^{-1}; 0 / 1 when non-equivariant
};

/// Attach divisor and bundle classes of `model` to a ring whose generators are
/// p_1..p_K or P_1..P_K.
inline ToricRing attach_model(const ToricModel& model, RingPtr ring) {
  if (static_cast<int>(ring->generator_count()) != model.K())
    throw Error(ErrorKind::RingMismatch, "ring has " + std::to_string(ring->generator_count()) +
                                             " generators, model has K=" + std::to_string(model.K()));
  ToricRing tr;
  tr.ring = ring;
  for (int i = 0; i < model.K(); ++i) tr.generators.push_back(RingElement::generator(ring, i));
  const bool eq = ring->equivariant();
  for (int j = 0; j < model.N(); ++j) {
    if (ring->mode() == RingMode::cohomology) {
      RatFunc lam = eq ? RatFunc::variable(var::lambda(j + 1)) : RatFunc(0);
      RingElement u = RingElement::scalar(ring, -lam);
      for (int i = 0; i < model.K(); ++i)
        if (model.m(i, j) != 0) u += tr.generators[i] * RatFunc(static_cast<long>(model.m(i, j)));
      tr.divisors.push_back(u);
      tr.equivariant_parameters.push_back(lam);
    } else {
      RingElement U = RingElement::one(ring);
      for (int i = 0; i < model.K(); ++i)
        if (model.m(i, j) != 0) U *= tr.generators[i].pow(static_cast<int>(model.m(i, j)));
      tr.divisors.push_back(U);
      tr.equivariant_parameters.push_back(eq ? RatFunc::variable(var::Lambda(j + 1)).inverse() : RatFunc(1));
    }
  }
  if (model.has_bundle() && ring->mode() == RingMode::k_theory) {
    for (int a = 0; a < model.L(); ++a) {
      RingElement V = RingElement::one(ring);
      for (int i = 0; i < model.K(); ++i)
        if (model.l(i, a) != 0) V *= tr.generators[i].pow(static_cast<int>(model.l(i, a)));
      tr.bundles.push_back(V);
    }
  }
  return tr;
}

/// One-dimensional coefficient ring with p_i = 0 or P_i = 1 and no relations:
/// the ring-free path, where only lam_j / Lam_j remain.
inline ToricRing scalar_ring(const ToricModel& model, RingMode mode, bool equivariant) {
  std::vector<std::vector<RatFunc>> gens(model.K(), std::vector<RatFunc>{RatFunc(mode == RingMode::k_theory ? 1 : 0)});
  auto ring = std::make_shared<const RingPresentation>(
      mode, equivariant, std::vector<std::string>{"1"},
      std::vector<std::vector<std::vector<RatFunc>>>{{{RatFunc(1)}}}, std::move(gens), true);
  return attach_model(model, ring);
}

namespace detail {

/// Blocks of a product of projective spaces: each column has exactly one
/// nonzero weight, equal to 1. Returns the column lists per row, or empty.
inline std::vector<std::vector<int>> projective_blocks(const ToricModel& model) {
  std::vector<std::vector<int>> blocks(model.K());
  for (int j = 0; j < model.N(); ++j) {
    int owner = -1;
    for (int i = 0; i < model.K(); ++i) {
      if (model.m(i, j) == 0) continue;
      if (model.m(i, j) != 1 || owner >= 0) return {};
      owner = i;
    }
    if (owner < 0) return {};
    blocks[owner].push_back(j);
  }
  return blocks;
}

/// Coordinates of x^k in F[x]/(x^n + c_{n-1}x^{n-1} + ... + c_0), k < 2n.
inline std::vector<std::vector<RatFunc>> power_reductions(const std::vector<RatFunc>& monic_low, int n) {
  std::vector<std::vector<RatFunc>> pw;
  for (int k = 0; k < 2 * n; ++k) {
    std::vector<RatFunc> v(n);
    if (k < n) {
      v[k] = RatFunc(1);
    } else {
      // x^k = x * x^{k-1}
      const auto& prev = pw[k - 1];
      std::vector<RatFunc> shifted(n);
      for (int t = 0; t + 1 < n; ++t) shifted[t + 1] = prev[t];
      const RatFunc& top = prev[n - 1];
      for (int t = 0; t < n; ++t) shifted[t] -= top * monic_low[t];
      v = shifted;
    }
    pw.push_back(std::move(v));
  }
  return pw;
}

}  // namespace detail

/// Presentation of H*(X) or K^0(X) for catalog-shaped models (products of
/// projective spaces, including pt) with exactly the Kirwan relations.
/// In cohomology the generator of block i is p_i with relation
/// prod_{j in block}(p_i - lam_j) = 0; in K-theory the generator is
/// e_i = 1 - P_i with relation prod_{j in block}(1 - P_i Lam_j^{-1}) = 0.
inline ToricRing catalog_ring(const ToricModel& model, RingMode mode, bool equivariant) {
  auto blocks = detail::projective_blocks(model);
  if (blocks.empty())
    throw Error(ErrorKind::UnknownModel,
                "no built-in ring for model '" + model.name() + "'; supply a ring table");
  const int K = model.K();
  std::vector<int> sizes;
  std::vector<std::vector<std::vector<RatFunc>>> reductions;
  for (int i = 0; i < K; ++i) {
    const int n = static_cast<int>(blocks[i].size());
    sizes.push_back(n);
    // relation polynomial in the block generator x, coefficients low -> high
    std::vector<RatFunc> rel{RatFunc(1)};
    for (int j : blocks[i]) {
      RatFunc a0, a1;  // factor a0 + a1 x
      if (mode == RingMode::cohomology) {
        a0 = equivariant ? -RatFunc::variable(var::lambda(j + 1)) : RatFunc(0);
        a1 = RatFunc(1);
      } else {
        RatFunc linv = equivariant ? RatFunc::variable(var::Lambda(j + 1)).inverse() : RatFunc(1);
        a0 = RatFunc(1) - linv;  // 1 - (1 - x) Lam^{-1}
        a1 = linv;
      }
      std::vector<RatFunc> next(rel.size() + 1);
      for (std::size_t t = 0; t < rel.size(); ++t) {
        next[t] += rel[t] * a0;
        next[t + 1] += rel[t] * a1;
      }
      rel = std::move(next);
    }
    RatFunc lead = rel.back().inverse();
    std::vector<RatFunc> low(n);
    for (int t = 0; t < n; ++t) low[t] = rel[t] * lead;
    reductions.push_back(detail::power_reductions(low, n));
  }
  // tensor basis: multi-index with block i exponent < sizes[i], first block slowest
  std::vector<std::vector<int>> multi{{}};
  for (int i = 0; i < K; ++i) {
    std::vector<std::vector<int>> next;
    for (auto& mi : multi)
      for (int e = 0; e < sizes[i]; ++e) {
        auto m2 = mi;
        m2.push_back(e);
        next.push_back(m2);
      }
    multi = std::move(next);
  }
  const std::size_t dim = multi.size();
  auto index_of = [&](const std::vector<int>& mi) {
    std::size_t idx = 0;
    for (int i = 0; i < K; ++i) idx = idx * sizes[i] + mi[i];
    return idx;
  };
  auto gen_name = [&](int i) {
    std::string s = std::to_string(i + 1);
    return mode == RingMode::cohomology ? "p" + s : "(1-P" + s + ")";
  };
  std::vector<std::string> names;
  for (auto& mi : multi) {
    std::string s;
    for (int i = 0; i < K; ++i) {
      if (mi[i] == 0) continue;
      if (!s.empty()) s += "*";
      s += gen_name(i);
      if (mi[i] > 1) s += "^" + std::to_string(mi[i]);
    }
    names.push_back(s.empty() ? "1" : s);
  }
  std::vector<std::vector<std::vector<RatFunc>>> table(dim, std::vector<std::vector<RatFunc>>(dim));
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) {
      // product of per-block reductions
      std::vector<std::pair<std::vector<int>, RatFunc>> acc{{{}, RatFunc(1)}};
      for (int i = 0; i < K; ++i) {
        const auto& red = reductions[i][multi[a][i] + multi[b][i]];
        std::vector<std::pair<std::vector<int>, RatFunc>> next;
        for (auto& [mi, c] : acc)
          for (int e = 0; e < sizes[i]; ++e) {
            if (red[e].is_zero()) continue;
            auto m2 = mi;
            m2.push_back(e);
            next.emplace_back(std::move(m2), c * red[e]);
          }
        acc = std::move(next);
      }
      std::vector<RatFunc> coords(dim);
      for (auto& [mi, c] : acc) coords[index_of(mi)] += c;
      table[a][b] = std::move(coords);
    }
  std::vector<std::vector<RatFunc>> gens;
  for (int i = 0; i < K; ++i) {
    // x_i from its reduction (a scalar for single-column blocks), then p = x or P = 1 - x
    std::vector<RatFunc> g(dim);
    for (int e = 0; e < sizes[i]; ++e) {
      std::vector<int> mi(K, 0);
      mi[i] = e;
      g[index_of(mi)] = reductions[i][1][e];
    }
    if (mode == RingMode::k_theory) {
      for (auto& c : g) c = -c;
      g[index_of(std::vector<int>(K, 0))] += RatFunc(1);
    }
    gens.push_back(std::move(g));
  }
  auto ring = std::make_shared<const RingPresentation>(mode, equivariant, std::move(names), std::move(table),
                                                       std::move(gens), !equivariant);
  return attach_model(model, ring);
}

}  // namespace mirrorkit
