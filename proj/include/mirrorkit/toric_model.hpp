#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mirrorkit/lattice.hpp"

namespace mirrorkit {

enum class Equivariance { none, cohomological, k_theoretic };

inline std::string to_string(Equivariance e) {
  switch (e) {
    case Equivariance::none: return "none";
    case Equivariance::cohomological: return "coh";
    case Equivariance::k_theoretic: return "k";
  }
  return "none";
}

/// Unvalidated model data as read from a file or built by hand.
struct RawModel {
  std::string name;
  int K = 0;
  int N = 0;
  IntMatrix weights;                        // K x N
  std::optional<std::vector<Rational>> chamber;
  std::optional<IntMatrix> bundle_weights;  // K x L
  Equivariance equivariance = Equivariance::none;
  bool smooth = false;
  std::optional<int> expected_cohomology_dim;
};

/// A size-K subset of divisors whose columns span a cone containing the chamber.
struct Vertex {
  std::vector<int> J;           // 0-based, ascending
  std::vector<int> complement;  // 0-based, ascending
  Rational minor;
};

/// x_j = prod_i Q_i^{section[j][i]} * prod_b t_b^{fiber[b][j]}.
struct FiberParametrization {
  RatMatrix section;   // N x K
  IntMatrix fiber;     // (N-K) x N, Hermite normal form basis of ker(weights)
  std::vector<std::int64_t> invariants;
};

/// Validated, immutable toric quotient data C^N //_omega T^K with optional
/// bundle E = sum_a V_a. Vertices and the fiber chart are computed once.
class ToricModel {
 public:
  const std::string& name() const { return raw_.name; }
  int K() const { return raw_.K; }
  int N() const { return raw_.N; }
  int L() const { return raw_.bundle_weights ? static_cast<int>((*raw_.bundle_weights)[0].size()) : 0; }
  const IntMatrix& weights() const { return raw_.weights; }
  std::int64_t m(int i, int j) const { return raw_.weights[i][j]; }
  std::int64_t l(int i, int a) const { return (*raw_.bundle_weights)[i][a]; }
  const std::optional<std::vector<Rational>>& chamber() const { return raw_.chamber; }
  bool has_bundle() const { return raw_.bundle_weights.has_value(); }
  const std::optional<IntMatrix>& bundle_weights() const { return raw_.bundle_weights; }
  Equivariance equivariance() const { return raw_.equivariance; }
  bool smooth() const { return raw_.smooth; }
  std::optional<int> expected_cohomology_dim() const { return raw_.expected_cohomology_dim; }
  int fiber_dimension() const { return raw_.N - raw_.K; }
  const RawModel& raw() const { return raw_; }

  /// D_j(d) = sum_i d_i m_ij.
  std::int64_t mori_degree(const std::vector<int>& d, int j) const {
    std::int64_t s = 0;
    for (int i = 0; i < K(); ++i) s += static_cast<std::int64_t>(d[i]) * m(i, j);
    return s;
  }

  /// Delta_a(d) = sum_i d_i l_ia.
  std::int64_t bundle_degree(const std::vector<int>& d, int a) const {
    if (!has_bundle()) throw Error(ErrorKind::MissingBundleData, "model '" + name() + "' has no bundle weights");
    std::int64_t s = 0;
    for (int i = 0; i < K(); ++i) s += static_cast<std::int64_t>(d[i]) * l(i, a);
    return s;
  }

  /// K x K minor on the columns J.
  Rational minor(const std::vector<int>& J) const {
    RatMatrix sub(K(), std::vector<Rational>(J.size()));
    for (int i = 0; i < K(); ++i)
      for (std::size_t c = 0; c < J.size(); ++c) sub[i][c] = static_cast<long>(m(i, J[c]));
    return determinant(sub);
  }

  /// Fixed points: J with nonzero minor and chamber in the open cone of columns J.
  const std::vector<Vertex>& vertices() const {
    if (!raw_.chamber) throw Error(ErrorKind::EmptyChamber, "model '" + name() + "' has no chamber");
    return vertices_;
  }

  const FiberParametrization& fiber_parametrization() const { return fiber_; }

  friend ToricModel validate_model(RawModel raw);

 private:
  RawModel raw_;
  std::vector<Vertex> vertices_;
  FiberParametrization fiber_;
};

/// All size-k subsets of {0..n-1}, lexicographic.
inline std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int j = start; j < n; ++j) {
      cur.push_back(j);
      self(self, j + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

namespace detail {

/// Coordinates of omega in the basis of columns J, or nullopt if singular.
inline std::optional<std::vector<Rational>> cone_coordinates(const RawModel& raw, const std::vector<int>& J,
                                                             const std::vector<Rational>& omega) {
  RatMatrix sub(raw.K, std::vector<Rational>(J.size()));
  for (int i = 0; i < raw.K; ++i)
    for (std::size_t c = 0; c < J.size(); ++c) sub[i][c] = static_cast<long>(raw.weights[i][J[c]]);
  return solve(sub, omega);
}

inline FiberParametrization compute_fiber(const RawModel& raw) {
  FiberParametrization fp;
  SmithForm s = smith_normal_form(raw.weights);
  fp.invariants = s.invariants;
  const int K = raw.K, N = raw.N;
  IntMatrix W(N - K, std::vector<std::int64_t>(N));
  for (int b = 0; b < N - K; ++b)
    for (int j = 0; j < N; ++j) W[b][j] = s.right[j][K + b];
  fp.fiber = hermite_normal_form(W);
  // section = right[:, :K] * diag(1/s) * left
  fp.section.assign(N, std::vector<Rational>(K, Rational(0)));
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < K; ++i) {
      Rational acc = 0;
      for (int k = 0; k < K; ++k)
        acc += Rational(static_cast<long>(s.right[j][k])) * Rational(static_cast<long>(s.left[k][i])) /
               Rational(static_cast<long>(s.invariants[k]));
      fp.section[j][i] = acc;
    }
  // canonical representative: reduce modulo the fiber lattice at pivot columns
  for (const auto& row : fp.fiber) {
    std::size_t c = 0;
    while (c < row.size() && row[c] == 0) ++c;
    if (c == row.size()) continue;
    Rational h = static_cast<long>(row[c]);
    for (int i = 0; i < K; ++i) {
      Rational ratio = fp.section[c][i] / h;
      Integer fl;
      mpz_fdiv_q(fl.get_mpz_t(), ratio.get_num().get_mpz_t(), ratio.get_den().get_mpz_t());
      if (fl == 0) continue;
      for (int j = 0; j < N; ++j) fp.section[j][i] -= Rational(fl) * Rational(static_cast<long>(row[j]));
    }
  }
  return fp;
}

}  // namespace detail

inline ToricModel validate_model(RawModel raw) {
  if (raw.K <= 0 || raw.N <= 0) throw Error(ErrorKind::InvalidArgument, "K and N must be positive");
  if (static_cast<int>(raw.weights.size()) != raw.K)
    throw Error(ErrorKind::InvalidArgument, "weights must have K rows");
  for (auto& row : raw.weights)
    if (static_cast<int>(row.size()) != raw.N) throw Error(ErrorKind::InvalidArgument, "weights rows must have N entries");
  if (raw.chamber && static_cast<int>(raw.chamber->size()) != raw.K)
    throw Error(ErrorKind::InvalidArgument, "chamber must have K entries");
  if (raw.bundle_weights) {
    if (static_cast<int>(raw.bundle_weights->size()) != raw.K)
      throw Error(ErrorKind::InvalidArgument, "bundle_weights must have K rows");
    std::size_t L = (*raw.bundle_weights)[0].size();
    if (L == 0) throw Error(ErrorKind::InvalidArgument, "bundle_weights must have at least one column");
    for (auto& row : *raw.bundle_weights)
      if (row.size() != L) throw Error(ErrorKind::InvalidArgument, "bundle_weights rows must have equal length");
  }
  if (rank(to_rational(raw.weights)) < static_cast<std::size_t>(raw.K))
    throw Error(ErrorKind::RankDeficient, "weight matrix has rank below K");
  for (int j = 0; j < raw.N; ++j) {
    bool zero = true;
    for (int i = 0; i < raw.K; ++i) zero = zero && raw.weights[i][j] == 0;
    if (zero) throw Error(ErrorKind::ZeroColumn, "column " + std::to_string(j + 1) + " of the weight matrix is zero");
  }

  ToricModel model;
  if (raw.chamber) {
    bool representable = false;
    for (auto& J : subsets(raw.N, raw.K)) {
      auto x = detail::cone_coordinates(raw, J, *raw.chamber);
      if (!x) continue;
      bool nonneg = true, positive = true;
      for (auto& v : *x) {
        nonneg = nonneg && v >= 0;
        positive = positive && v > 0;
      }
      representable = representable || nonneg;
      if (positive) {
        Vertex vx;
        vx.J = J;
        for (int j = 0; j < raw.N; ++j)
          if (std::find(J.begin(), J.end(), j) == J.end()) vx.complement.push_back(j);
        model.vertices_.push_back(std::move(vx));
      }
    }
    if (!representable) throw Error(ErrorKind::EmptyChamber, "chamber is not in the cone of the weight columns");
  }
  model.raw_ = std::move(raw);
  for (auto& v : model.vertices_) {
    v.minor = model.minor(v.J);
    if (model.raw_.smooth && abs(v.minor) != 1)
      throw Error(ErrorKind::InvalidArgument, "model flagged smooth but a vertex minor is not +-1");
  }
  model.fiber_ = detail::compute_fiber(model.raw_);
  return model;
}

/// Built-in catalog: "pt", "P1", "P2", "P1xP1", "P1_O(-1)+O(-1)".
inline std::vector<std::string> catalog_names() { return {"pt", "P1", "P2", "P1xP1", "P1_O(-1)+O(-1)"}; }

inline RawModel catalog_raw(const std::string& name) {
  RawModel r;
  r.name = name;
  r.smooth = true;
  if (name == "pt") {
    r.K = 1, r.N = 1, r.weights = {{1}}, r.chamber = std::vector<Rational>{1}, r.expected_cohomology_dim = 1;
  } else if (name == "P1") {
    r.K = 1, r.N = 2, r.weights = {{1, 1}}, r.chamber = std::vector<Rational>{1}, r.expected_cohomology_dim = 2;
  } else if (name == "P2") {
    r.K = 1, r.N = 3, r.weights = {{1, 1, 1}}, r.chamber = std::vector<Rational>{1}, r.expected_cohomology_dim = 3;
  } else if (name == "P1xP1") {
    r.K = 2, r.N = 4, r.weights = {{1, 1, 0, 0}, {0, 0, 1, 1}};
    r.chamber = std::vector<Rational>{1, 1};
    r.expected_cohomology_dim = 4;
  } else if (name == "P1_O(-1)+O(-1)") {
    r.K = 1, r.N = 2, r.weights = {{1, 1}}, r.chamber = std::vector<Rational>{1};
    r.bundle_weights = IntMatrix{{1, 1}};
    r.expected_cohomology_dim = 2;
  } else {
    throw Error(ErrorKind::UnknownModel, "no catalog model named '" + name + "'");
  }
  return r;
}

inline ToricModel catalog_model(const std::string& name) { return validate_model(catalog_raw(name)); }

}  // namespace mirrorkit
