#pragma once

// Critical points of the mirror phase functions: Batyrev relations (L),
// their root-of-unity analogues L_m, Adams self-similarity, Hessians, the
// residue pairing and its classical (localization) limit.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mirrorkit/expression.hpp"
#include "mirrorkit/parallel.hpp"
#include "mirrorkit/toric_model.hpp"

namespace mirrorkit {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

struct SolverConfig {
  int seeds = 64;
  int max_iterations = 80;
  double tol = 1e-10;          // relative residual of the defining relations
  double dedupe_tol = 1e-7;    // relative distance
  double degenerate_tol = 1e-10;
  double branch_tol = 1e-6;    // product test for X-branches
  std::uint64_t rng_seed = 0x6d69'7272'6f72'6b69ULL;
};

enum class CriticalMode { cohomological, k_theoretic };

inline std::string to_string(CriticalMode m) { return m == CriticalMode::cohomological ? "cohomological" : "k_theoretic"; }

struct CriticalPoint {
  CriticalMode mode = CriticalMode::cohomological;
  int root_order = 1;
  std::vector<cplx> p;          // p (cohomological) or P (k-theoretic)
  std::vector<cplx> x;          // u_j(p), or X_j with X_j^m = 1 - U_j^m
  std::vector<int> branch;      // X_j = (principal m-th root) * exp(2 pi i branch_j / m)
  std::vector<cplx> Q;
  std::optional<cplx> value;    // sum_j u_j(p)
  std::optional<cplx> hessian;  // hessian_formula
  bool degenerate = false;
  double residual = 0;
  int iterations = 0;
};

struct LagrangianSample {
  CriticalMode mode = CriticalMode::cohomological;
  int root_order = 1;
  std::vector<cplx> Q;
  std::vector<cplx> lambda;
  std::vector<CriticalPoint> points;
  int seeds = 0;
  int no_convergence = 0;         // seeds that did not land on a valid root
  int no_consistent_branch = 0;   // P-solutions without a matching X-branch
};

namespace detail {

inline cplx ipow(cplx b, std::int64_t e) {
  if (e < 0) return 1.0 / ipow(b, -e);
  cplx r = 1;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

/// Uniform double in [0,1) from the raw 64-bit stream (portable, unlike
/// std::uniform_real_distribution).
inline double unit_uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

struct NewtonResult {
  CVec x;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton. System provides residual(x) and jacobian(x).
template <class System>
NewtonResult newton(const System& sys, CVec x, int max_iter, double step_tol = 1e-14) {
  CVec F = sys.residual(x);
  double fn = F.norm();
  NewtonResult res;
  for (int it = 1; it <= max_iter; ++it) {
    res.iterations = it;
    if (!std::isfinite(fn)) break;
    CMat J = sys.jacobian(x);
    Eigen::PartialPivLU<CMat> lu(J);
    CVec dx = lu.solve(-F);
    if (!dx.allFinite()) break;
    double lambda = 1;
    CVec xn = x + dx;
    CVec Fn = sys.residual(xn);
    for (int k = 0; k < 10 && !(Fn.allFinite() && Fn.norm() < fn); ++k) {
      lambda *= 0.5;
      xn = x + lambda * dx;
      Fn = sys.residual(xn);
    }
    if (!Fn.allFinite()) break;
    x = xn;
    F = Fn;
    fn = F.norm();
    if (fn == 0 || lambda * dx.norm() <= step_tol * (1 + x.norm())) {
      res.converged = true;
      break;
    }
  }
  res.x = x;
  return res;
}

/// value and gradient of prod_j A_j^{e_j} (e_j >= 0) given dA_j/dy_k.
inline std::pair<cplx, CVec> product_gradient(const std::vector<cplx>& A, const std::vector<std::int64_t>& e,
                                              const CMat& dA) {
  const int n = static_cast<int>(A.size());
  cplx value = 1;
  for (int j = 0; j < n; ++j) value *= ipow(A[j], e[j]);
  CVec grad = CVec::Zero(dA.cols());
  for (int j = 0; j < n; ++j) {
    if (e[j] == 0) continue;
    cplx rest = static_cast<double>(e[j]) * ipow(A[j], e[j] - 1);
    for (int l = 0; l < n; ++l)
      if (l != j) rest *= ipow(A[l], e[l]);
    grad += rest * dA.row(j).transpose();
  }
  return {value, grad};
}

/// Q_i prod_{m_ij<0} u_j^{-m_ij} - prod_{m_ij>0} u_j^{m_ij} with u_j = sum_i p_i m_ij - lambda_j.
struct BatyrevSystem {
  const ToricModel& model;
  std::vector<cplx> Q;
  std::vector<cplx> lambda;

  std::vector<cplx> u(const CVec& p) const {
    std::vector<cplx> out(model.N());
    for (int j = 0; j < model.N(); ++j) {
      cplx s = -lambda[j];
      for (int i = 0; i < model.K(); ++i) s += p[i] * static_cast<double>(model.m(i, j));
      out[j] = s;
    }
    return out;
  }
  CMat du() const {
    CMat d(model.N(), model.K());
    for (int j = 0; j < model.N(); ++j)
      for (int k = 0; k < model.K(); ++k) d(j, k) = static_cast<double>(model.m(k, j));
    return d;
  }
  std::pair<CVec, CMat> eval(const CVec& p) const {
    const int K = model.K(), N = model.N();
    auto U = u(p);
    CMat dU = du();
    CVec F(K);
    CMat J(K, K);
    for (int i = 0; i < K; ++i) {
      std::vector<std::int64_t> pos(N), neg(N);
      for (int j = 0; j < N; ++j) {
        pos[j] = std::max<std::int64_t>(model.m(i, j), 0);
        neg[j] = std::max<std::int64_t>(-model.m(i, j), 0);
      }
      auto [a, ga] = product_gradient(U, neg, dU);
      auto [b, gb] = product_gradient(U, pos, dU);
      F[i] = Q[i] * a - b;
      J.row(i) = (Q[i] * ga - gb).transpose();
    }
    return {F, J};
  }
  CVec residual(const CVec& p) const { return eval(p).first; }
  CMat jacobian(const CVec& p) const { return eval(p).second; }

  double relative_residual(const CVec& p) const {
    auto U = u(p);
    double r = 0;
    for (int i = 0; i < model.K(); ++i) {
      cplx prod = 1;
      for (int j = 0; j < model.N(); ++j) prod *= ipow(U[j], model.m(i, j));
      r = std::max(r, std::abs(Q[i] - prod) / std::abs(Q[i]));
    }
    return r;
  }
};

/// Q_i^m prod_{m_ij<0} A_j^{-m_ij} - prod_{m_ij>0} A_j^{m_ij}, A_j = 1 - U_j(P)^m.
struct LmSystem {
  const ToricModel& model;
  std::vector<cplx> Q;
  int m;

  std::vector<cplx> U(const CVec& P) const {
    std::vector<cplx> out(model.N());
    for (int j = 0; j < model.N(); ++j) {
      cplx s = 1;
      for (int i = 0; i < model.K(); ++i) s *= ipow(P[i], model.m(i, j));
      out[j] = s;
    }
    return out;
  }
  std::pair<CVec, CMat> eval(const CVec& P) const {
    const int K = model.K(), N = model.N();
    auto Uj = U(P);
    std::vector<cplx> A(N);
    CMat dA(N, K);
    for (int j = 0; j < N; ++j) {
      cplx Um = ipow(Uj[j], m);
      A[j] = 1.0 - Um;
      for (int k = 0; k < K; ++k) dA(j, k) = -static_cast<double>(m) * static_cast<double>(model.m(k, j)) * Um / P[k];
    }
    CVec F(K);
    CMat J(K, K);
    for (int i = 0; i < K; ++i) {
      std::vector<std::int64_t> pos(N), neg(N);
      for (int j = 0; j < N; ++j) {
        pos[j] = std::max<std::int64_t>(model.m(i, j), 0);
        neg[j] = std::max<std::int64_t>(-model.m(i, j), 0);
      }
      auto [a, ga] = product_gradient(A, neg, dA);
      auto [b, gb] = product_gradient(A, pos, dA);
      cplx Qm = ipow(Q[i], m);
      F[i] = Qm * a - b;
      J.row(i) = (Qm * ga - gb).transpose();
    }
    return {F, J};
  }
  CVec residual(const CVec& P) const { return eval(P).first; }
  CMat jacobian(const CVec& P) const { return eval(P).second; }
};

/// Near-tie tolerant lexicographic order on complex vectors.
inline bool canonical_less(const std::vector<cplx>& a, const std::vector<cplx>& b, double eps) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    double s = eps * (1 + std::abs(a[k]) + std::abs(b[k]));
    if (std::abs(a[k].real() - b[k].real()) > s) return a[k].real() < b[k].real();
    if (std::abs(a[k].imag() - b[k].imag()) > s) return a[k].imag() < b[k].imag();
  }
  return false;
}

inline double distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::norm(a[k] - b[k]);
  return std::sqrt(s);
}

inline double norm(const std::vector<cplx>& a) { return distance(a, std::vector<cplx>(a.size())); }

inline std::vector<cplx> to_std(const CVec& v) { return std::vector<cplx>(v.data(), v.data() + v.size()); }

inline CVec to_eigen(const std::vector<cplx>& v) {
  CVec out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k];
  return out;
}

/// Sorts canonically, then keeps the first of every cluster.
inline std::vector<std::vector<cplx>> dedupe(std::vector<std::vector<cplx>> pts, double tol) {
  std::sort(pts.begin(), pts.end(), [&](auto& a, auto& b) { return canonical_less(a, b, 1e-9); });
  std::vector<std::vector<cplx>> out;
  for (auto& p : pts) {
    bool dup = false;
    for (auto& k : out) dup = dup || distance(p, k) <= tol * std::max(1.0, norm(p));
    if (!dup) out.push_back(p);
  }
  return out;
}

/// (complement of J, |m_J|^2) over all K-subsets with nonzero minor.
inline std::vector<std::pair<std::vector<int>, double>> hessian_terms(const ToricModel& model) {
  std::vector<std::pair<std::vector<int>, double>> out;
  for (auto& J : subsets(model.N(), model.K())) {
    Rational mj = model.minor(J);
    if (mj == 0) continue;
    std::vector<int> comp;
    for (int j = 0; j < model.N(); ++j)
      if (!std::binary_search(J.begin(), J.end(), j)) comp.push_back(j);
    out.emplace_back(comp, Rational(mj * mj).get_d());
  }
  return out;
}

inline std::vector<cplx> zeros_if_empty(std::vector<cplx> v, std::size_t n) {
  if (v.empty()) v.assign(n, cplx(0));
  if (v.size() != n) throw Error(ErrorKind::InvalidArgument, "expected " + std::to_string(n) + " values");
  return v;
}

inline void check_Q(const std::vector<cplx>& Q, int K) {
  if (static_cast<int>(Q.size()) != K) throw Error(ErrorKind::InvalidArgument, "Q must have K entries");
  for (auto& q : Q)
    if (q == cplx(0)) throw Error(ErrorKind::InvalidArgument, "Q_i must be nonzero");
}

}  // namespace detail

/// u_j(p) = sum_i p_i m_ij - lambda_j.
inline std::vector<cplx> divisor_values(const ToricModel& model, const std::vector<cplx>& p,
                                        const std::vector<cplx>& lambda = {}) {
  auto lam = detail::zeros_if_empty(lambda, model.N());
  return detail::BatyrevSystem{model, {}, lam}.u(detail::to_eigen(p));
}

/// Delta = sum_{|J|=K} |m_J|^2 prod_{j not in J} u_j(p).
inline cplx hessian_formula(const ToricModel& model, const std::vector<cplx>& p, const std::vector<cplx>& lambda = {}) {
  auto u = divisor_values(model, p, lambda);
  cplx s = 0;
  for (auto& [comp, w] : detail::hessian_terms(model)) {
    cplx t = w;
    for (int j : comp) t *= u[j];
    s += t;
  }
  return s;
}

/// Scale for the degeneracy test: the same sum with absolute values.
inline double hessian_scale(const ToricModel& model, const std::vector<cplx>& p, const std::vector<cplx>& lambda = {}) {
  auto u = divisor_values(model, p, lambda);
  double s = 0;
  for (auto& [comp, w] : detail::hessian_terms(model)) {
    double t = w;
    for (int j : comp) t *= std::abs(u[j]);
    s += t;
  }
  return s;
}

inline LagrangianSample critical_points_H(const ToricModel& model, const std::vector<cplx>& Q,
                                          const std::vector<cplx>& lambda = {}, const SolverConfig& cfg = {}) {
  const int K = model.K(), N = model.N();
  detail::check_Q(Q, K);
  LagrangianSample sample;
  sample.Q = Q;
  sample.lambda = detail::zeros_if_empty(lambda, N);
  sample.seeds = cfg.seeds;
  detail::BatyrevSystem sys{model, Q, sample.lambda};

  double lam_scale = 0;
  for (auto& l : sample.lambda) lam_scale = std::max(lam_scale, std::abs(l));
  std::vector<double> scale(K);
  for (int i = 0; i < K; ++i) {
    std::int64_t deg = 0;
    for (int j = 0; j < N; ++j) deg += std::abs(model.m(i, j));
    scale[i] = std::pow(std::abs(Q[i]), 1.0 / static_cast<double>(std::max<std::int64_t>(deg, 1))) + lam_scale;
  }
  std::vector<CVec> seeds(cfg.seeds, CVec(K));
  std::mt19937_64 gen(cfg.rng_seed);
  for (auto& s : seeds)
    for (int i = 0; i < K; ++i) {
      double rho = 0.5 + detail::unit_uniform(gen), theta = 2 * kPi * detail::unit_uniform(gen);
      s[i] = scale[i] * std::polar(rho, theta);
    }

  std::vector<std::optional<std::pair<CVec, int>>> found(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) {
    auto r = detail::newton(sys, seeds[k], cfg.max_iterations);
    if (!r.x.allFinite()) return;
    // spurious roots of the cleared system have some u_j = 0
    auto u = sys.u(r.x);
    for (auto& v : u)
      if (std::abs(v) < 1e-8 * (1 + r.x.norm())) return;
    if (sys.relative_residual(r.x) > cfg.tol) return;
    found[k] = std::make_pair(r.x, r.iterations);
  });
  std::vector<std::vector<cplx>> roots;
  for (auto& f : found) {
    if (f) roots.push_back(detail::to_std(f->first));
    else ++sample.no_convergence;
  }
  for (auto& p : detail::dedupe(roots, cfg.dedupe_tol)) {
    CriticalPoint cp;
    cp.mode = CriticalMode::cohomological;
    cp.p = p;
    cp.x = sys.u(detail::to_eigen(p));
    cp.Q = Q;
    cplx f = 0;
    for (auto& v : cp.x) f += v;
    cp.value = f;
    cp.hessian = hessian_formula(model, p, sample.lambda);
    cp.degenerate = std::abs(*cp.hessian) < cfg.degenerate_tol * hessian_scale(model, p, sample.lambda);
    cp.residual = sys.relative_residual(detail::to_eigen(p));
    for (auto& fd : found)
      if (fd && detail::distance(detail::to_std(fd->first), p) <= cfg.dedupe_tol * std::max(1.0, detail::norm(p))) {
        cp.iterations = fd->second;
        break;
      }
    sample.points.push_back(std::move(cp));
  }
  return sample;
}

/// |Q_i^m - prod_j (1 - U_j(P)^m)^{m_ij}| / |Q_i^m|, maximized over i.
inline double lm_residual(const ToricModel& model, const std::vector<cplx>& P, const std::vector<cplx>& Q, int m) {
  detail::LmSystem sys{model, Q, m};
  auto U = sys.U(detail::to_eigen(P));
  double r = 0;
  for (int i = 0; i < model.K(); ++i) {
    cplx prod = 1;
    for (int j = 0; j < model.N(); ++j) prod *= detail::ipow(1.0 - detail::ipow(U[j], m), model.m(i, j));
    cplx Qm = detail::ipow(Q[i], m);
    r = std::max(r, std::abs(Qm - prod) / std::abs(Qm));
  }
  return r;
}

inline LagrangianSample critical_points_K(const ToricModel& model, const std::vector<cplx>& Q, int m,
                                          const SolverConfig& cfg = {}) {
  const int K = model.K(), N = model.N();
  detail::check_Q(Q, K);
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "root order must be positive");
  LagrangianSample sample;
  sample.mode = CriticalMode::k_theoretic;
  sample.root_order = m;
  sample.Q = Q;
  detail::LmSystem sys{model, Q, m};

  // more roots as m grows: m^K times the L_1 count
  int nseeds = cfg.seeds;
  for (int i = 0; i < K; ++i) nseeds *= m;
  sample.seeds = nseeds;
  std::vector<CVec> seeds(nseeds, CVec(K));
  std::mt19937_64 gen(cfg.rng_seed);
  for (auto& s : seeds)
    for (int i = 0; i < K; ++i) {
      double rho = std::exp(3.0 * (detail::unit_uniform(gen) - 0.5));
      double theta = 2 * kPi * detail::unit_uniform(gen);
      s[i] = std::polar(rho, theta);
    }
  std::vector<std::optional<CVec>> found(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) {
    auto r = detail::newton(sys, seeds[k], cfg.max_iterations);
    if (!r.x.allFinite()) return;
    for (int i = 0; i < K; ++i)
      if (std::abs(r.x[i]) < 1e-8) return;
    auto P = detail::to_std(r.x);
    if (lm_residual(model, P, Q, m) > cfg.tol) return;
    found[k] = r.x;
  });
  std::vector<std::vector<cplx>> roots;
  for (auto& f : found) {
    if (f) roots.push_back(detail::to_std(*f));
    else ++sample.no_convergence;
  }
  const cplx zeta = std::polar(1.0, 2 * kPi / m);
  for (auto& P : detail::dedupe(roots, cfg.dedupe_tol)) {
    auto U = sys.U(detail::to_eigen(P));
    std::vector<cplx> base(N);
    for (int j = 0; j < N; ++j) base[j] = std::pow(1.0 - detail::ipow(U[j], m), 1.0 / m);
    bool any = false;
    std::vector<int> br(N, 0);
    while (true) {
      std::vector<cplx> X(N);
      for (int j = 0; j < N; ++j) X[j] = base[j] * detail::ipow(zeta, br[j]);
      bool ok = true;
      for (int i = 0; i < K && ok; ++i) {
        cplx prod = 1;
        for (int j = 0; j < N; ++j) prod *= detail::ipow(X[j], model.m(i, j));
        ok = std::abs(prod - Q[i]) <= cfg.branch_tol * std::abs(Q[i]);
      }
      if (ok) {
        any = true;
        CriticalPoint cp;
        cp.mode = CriticalMode::k_theoretic;
        cp.root_order = m;
        cp.p = P;
        cp.x = X;
        cp.branch = br;
        cp.Q = Q;
        cp.residual = lm_residual(model, P, Q, m);
        sample.points.push_back(std::move(cp));
      }
      int j = N - 1;
      while (j >= 0 && br[j] == m - 1) br[j--] = 0;
      if (j < 0) break;
      ++br[j];
    }
    if (!any) ++sample.no_consistent_branch;
  }
  return sample;
}

struct AdamsEntry {
  std::vector<cplx> P, Q;    // point on L_m
  std::vector<cplx> Pm, Qm;  // image under Psi^m
  double residual;           // L_1 residual of the image
  bool pass;
};

struct AdamsReport {
  int root_order;
  double tol;
  std::vector<AdamsEntry> entries;
  bool pass() const {
    return std::all_of(entries.begin(), entries.end(), [](auto& e) { return e.pass; });
  }
};

/// Psi^m: (P, Q) -> (P^m, Q^m), image tested against L_1.
inline AdamsEntry adams_image(const ToricModel& model, const std::vector<cplx>& P, const std::vector<cplx>& Q, int m,
                              double tol) {
  AdamsEntry e{P, Q, {}, {}, 0, false};
  for (auto& v : P) e.Pm.push_back(detail::ipow(v, m));
  for (auto& v : Q) e.Qm.push_back(detail::ipow(v, m));
  e.residual = lm_residual(model, e.Pm, e.Qm, 1);
  e.pass = e.residual < tol;
  return e;
}

inline AdamsReport adams_check(const ToricModel& model, const LagrangianSample& sample, double tol = 1e-9) {
  if (sample.mode != CriticalMode::k_theoretic)
    throw Error(ErrorKind::InvalidArgument, "adams_check needs a k-theoretic sample");
  AdamsReport rep{sample.root_order, tol, {}};
  std::vector<std::vector<cplx>> seen;
  for (auto& pt : sample.points) {
    // branches share P; check each P once
    if (std::find(seen.begin(), seen.end(), pt.p) != seen.end()) continue;
    seen.push_back(pt.p);
    rep.entries.push_back(adams_image(model, pt.p, pt.Q, sample.root_order, tol));
  }
  return rep;
}

/// Hessian of f(tau) = sum_j x_j exp((W^T tau)_j) at tau = 0 in the fiber
/// chart, by Richardson-extrapolated central differences, divided by
/// det[S | W^T]^2 so that it is taken with respect to dln x / dln Q.
/// The equivariant term sum_j lambda_j ln x_j is linear in tau and drops out.
inline cplx hessian_direct(const ToricModel& model, const CriticalPoint& pt, double h = 0.02,
                           double degenerate_tol = 1e-10) {
  if (pt.mode != CriticalMode::cohomological) throw Error(ErrorKind::InvalidArgument, "hessian_direct is cohomological");
  const auto& fp = model.fiber_parametrization();
  const int N = model.N(), K = model.K(), n = N - K;
  RatMatrix chart(N, std::vector<Rational>(N));
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < K; ++i) chart[j][i] = fp.section[j][i];
    for (int b = 0; b < n; ++b) chart[j][K + b] = static_cast<long>(fp.fiber[b][j]);
  }
  double vol = determinant(chart).get_d();
  if (n == 0) return 1.0 / (vol * vol);

  auto f = [&](const std::vector<double>& tau) {
    cplx s = 0;
    for (int j = 0; j < N; ++j) {
      double e = 0;
      for (int b = 0; b < n; ++b) e += static_cast<double>(fp.fiber[b][j]) * tau[b];
      s += pt.x[j] * std::exp(e);
    }
    return s;
  };
  auto second = [&](double step) {
    CMat H(n, n);
    std::vector<double> t(n, 0.0);
    cplx f0 = f(t);
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        if (b == c) {
          t[b] = step;
          cplx fp1 = f(t);
          t[b] = -step;
          cplx fm1 = f(t);
          t[b] = 0;
          H(b, b) = (fp1 - 2.0 * f0 + fm1) / (step * step);
        } else {
          cplx acc = 0;
          for (int sb : {1, -1})
            for (int sc : {1, -1}) {
              t[b] = sb * step;
              t[c] = sc * step;
              acc += static_cast<double>(sb * sc) * f(t);
            }
          t[b] = t[c] = 0;
          H(b, c) = H(c, b) = acc / (4 * step * step);
        }
      }
    return H;
  };
  CMat D0 = second(h), D1 = second(h / 2), D2 = second(h / 4);
  CMat R0 = (4.0 * D1 - D0) / 3.0, R1 = (4.0 * D2 - D1) / 3.0;
  CMat H = (16.0 * R1 - R0) / 15.0;
  cplx det = H.determinant() / (vol * vol);

  double scale = 0;
  for (int j = 0; j < N; ++j) {
    double w = 0;
    for (int b = 0; b < n; ++b) w += static_cast<double>(fp.fiber[b][j] * fp.fiber[b][j]);
    scale += std::abs(pt.x[j]) * w;
  }
  if (std::abs(det) < degenerate_tol * std::pow(scale, n) / (vol * vol))
    throw Error(ErrorKind::DegenerateCritical, "Hessian vanishes at the critical point");
  return det;
}

/// phi, psi are rational functions in p1..pK (and lam_j); values at a point.
inline cplx evaluate_test_function(const RatFunc& phi, const std::vector<cplx>& p, const std::vector<cplx>& lambda) {
  std::map<int, cplx> vals;
  for (std::size_t i = 0; i < p.size(); ++i) vals[var::p(static_cast<int>(i) + 1)] = p[i];
  for (std::size_t j = 0; j < lambda.size(); ++j) vals[var::lambda(static_cast<int>(j) + 1)] = lambda[j];
  return phi.evaluate(vals);
}

struct PairingResult {
  cplx value;
  int points;
  std::optional<int> expected;
  bool complete;
};

/// (phi, psi)_Q = sum over critical points of phi psi / Delta.
inline PairingResult residue_pairing(const ToricModel& model, const LagrangianSample& sample, const RatFunc& phi,
                                     const RatFunc& psi, std::optional<int> expected = std::nullopt) {
  if (sample.mode != CriticalMode::cohomological)
    throw Error(ErrorKind::InvalidArgument, "residue pairing needs a cohomological sample");
  if (!expected) expected = model.expected_cohomology_dim();
  PairingResult r{0, static_cast<int>(sample.points.size()), expected, true};
  for (auto& pt : sample.points) {
    cplx d = pt.hessian ? *pt.hessian : hessian_formula(model, pt.p, sample.lambda);
    r.value += evaluate_test_function(phi, pt.p, sample.lambda) * evaluate_test_function(psi, pt.p, sample.lambda) / d;
  }
  if (expected && r.points < *expected) r.complete = false;
  return r;
}

// ---- continuation ----------------------------------------------------------

struct PathResult {
  std::vector<cplx> p;
  bool ok = false;
  double reached = 0;  // ln t reached
  int steps = 0;
};

/// Follows a root of the Batyrev system along Q(t) = t^c Q0 from t = 1 to t_min.
inline PathResult continue_branch(const ToricModel& model, const std::vector<cplx>& Q0, const std::vector<double>& c,
                                  const std::vector<cplx>& lambda, const std::vector<cplx>& p0, double t_min,
                                  int steps) {
  PathResult res;
  const double s_end = std::log(t_min);
  double ds = s_end / steps, s = 0;
  CVec x = detail::to_eigen(p0), prev = x;
  double prev_ds = 0;
  auto Q_at = [&](double sv) {
    std::vector<cplx> Q(Q0.size());
    for (std::size_t i = 0; i < Q.size(); ++i) Q[i] = Q0[i] * std::exp(c[i] * sv);
    return Q;
  };
  while (s > s_end) {
    double step = std::max(ds, s_end - s);  // both negative
    CVec guess = x;
    if (prev_ds != 0) guess = x + (x - prev) * (step / prev_ds);
    detail::BatyrevSystem sys{model, Q_at(s + step), lambda};
    auto r = detail::newton(sys, guess, 40);
    // u_j near 0 comes from cancellation, so the relative residual is only a sanity gate
    bool accept = r.converged && r.x.allFinite() && sys.relative_residual(r.x) < 1e-6 &&
                  (r.x - x).norm() <= 0.3 * (x.norm() + 1e-300) + 1e-12;
    if (!accept) {
      ds *= 0.5;
      if (std::abs(ds) < 1e-7 * std::abs(s_end)) {
        res.p = detail::to_std(x);
        res.reached = s;
        return res;
      }
      continue;
    }
    prev = x;
    prev_ds = step;
    x = r.x;
    s += step;
    ++res.steps;
    if (r.iterations <= 4) ds = std::max(1.5 * ds, s_end / steps * 4);
  }
  res.p = detail::to_std(x);
  res.ok = true;
  res.reached = s_end;
  return res;
}

struct BranchTrack {
  std::vector<cplx> start, end;
  bool bounded;
  bool path_ok;
};

struct MoriPartition {
  std::vector<double> direction;
  std::vector<BranchTrack> branches;
  int bounded = 0;
  int escaping = 0;
  std::optional<int> expected;
  bool matches_expected() const { return expected && bounded == *expected; }
};

/// Tracks each point of a cohomological sample along Q(t) = t^c Q0, t -> 0
/// (c defaults to the chamber), and splits into bounded and escaping points.
inline MoriPartition mori_limit_filter(const ToricModel& model, const LagrangianSample& sample,
                                       std::vector<double> c = {}, double t_min = 1e-8, int steps = 160) {
  if (sample.mode != CriticalMode::cohomological)
    throw Error(ErrorKind::InvalidArgument, "mori_limit_filter needs a cohomological sample");
  if (c.empty()) {
    if (!model.chamber()) throw Error(ErrorKind::EmptyChamber, "no chamber to orient the limit");
    for (auto& w : *model.chamber()) c.push_back(w.get_d());
  }
  MoriPartition part;
  part.direction = c;
  part.expected = model.expected_cohomology_dim();
  double lam_scale = 0;
  for (auto& l : sample.lambda) lam_scale = std::max(lam_scale, std::abs(l));
  std::vector<BranchTrack> tracks(sample.points.size());
  parallel_for(sample.points.size(), [&](std::size_t k) {
    const auto& pt = sample.points[k];
    auto path = continue_branch(model, sample.Q, c, sample.lambda, pt.p, t_min, steps);
    double bound = 1e3 * (1 + lam_scale + detail::norm(pt.p));
    tracks[k] = BranchTrack{pt.p, path.p, path.ok && detail::norm(path.p) <= bound, path.ok};
  });
  for (auto& t : tracks) (t.bounded ? part.bounded : part.escaping)++;
  part.branches = std::move(tracks);
  return part;
}

struct ClassicalPoint {
  std::vector<int> J;
  std::vector<cplx> p;
  cplx hessian;  // |m_J|^2 prod_{j not in J} u_j(p)
};

/// Solves u_j(p) = 0, j in J, for each vertex.
inline std::vector<ClassicalPoint> classical_points(const ToricModel& model, const std::vector<cplx>& lambda) {
  const int K = model.K();
  std::vector<ClassicalPoint> out;
  for (auto& v : model.vertices()) {
    CMat A(K, K);
    CVec b(K);
    for (int r = 0; r < K; ++r) {
      for (int i = 0; i < K; ++i) A(r, i) = static_cast<double>(model.m(i, v.J[r]));
      b[r] = lambda[v.J[r]];
    }
    CVec p = A.fullPivLu().solve(b);
    auto pv = detail::to_std(p);
    auto u = divisor_values(model, pv, lambda);
    cplx h = Rational(v.minor * v.minor).get_d();
    for (int j : v.complement) h *= u[j];
    out.push_back({v.J, pv, h});
  }
  return out;
}

struct LocalizationBranch {
  std::vector<cplx> start, end;
  std::optional<std::size_t> vertex;  // index into classical points
  cplx hessian_end;
  double hessian_error = 0;
  bool escaped = false;
};

struct PairingCheck {
  std::string phi, psi;
  cplx residue;
  cplx localization;
  double error;
};

struct LocalizationReport {
  std::vector<cplx> lambda;
  double t_min;
  std::vector<ClassicalPoint> classical;
  std::vector<LocalizationBranch> branches;
  std::vector<PairingCheck> pairings;
  double tol;
  bool pass() const {
    for (auto& b : branches)
      if (b.escaped || !b.vertex || b.hessian_error > tol) return false;
    for (auto& p : pairings)
      if (p.error > tol) return false;
    return true;
  }
};

/// Continues critical points along Q = t Q0 to t_min and compares Hessians and
/// pairings with the fixed-point data of the chamber.
inline LocalizationReport localization_check(const ToricModel& model, const std::vector<cplx>& lambda,
                                             std::vector<cplx> Q0 = {}, double t_min = 1e-8, int steps = 160,
                                             const std::vector<std::pair<std::string, std::string>>& pairs =
                                                 {{"1", "1"}, {"p1", "1"}},
                                             double tol = 1e-6, const SolverConfig& cfg = {}) {
  if (Q0.empty()) Q0.assign(model.K(), cplx(1));
  LocalizationReport rep;
  rep.lambda = detail::zeros_if_empty(lambda, model.N());
  rep.t_min = t_min;
  rep.tol = tol;
  rep.classical = classical_points(model, rep.lambda);
  auto sample = critical_points_H(model, Q0, rep.lambda, cfg);
  std::vector<double> c(model.K(), 1.0);
  double lam_scale = 1;
  for (auto& l : rep.lambda) lam_scale = std::max(lam_scale, std::abs(l));

  rep.branches.resize(sample.points.size());
  parallel_for(sample.points.size(), [&](std::size_t k) {
    const auto& pt = sample.points[k];
    auto path = continue_branch(model, Q0, c, rep.lambda, pt.p, t_min, steps);
    LocalizationBranch b;
    b.start = pt.p;
    b.end = path.p;
    b.hessian_end = hessian_formula(model, path.p, rep.lambda);
    double best = 1e-4 * lam_scale;
    for (std::size_t a = 0; a < rep.classical.size(); ++a) {
      double d = detail::distance(path.p, rep.classical[a].p);
      if (d < best) best = d, b.vertex = a;
    }
    b.escaped = !path.ok || !b.vertex;
    if (b.vertex) b.hessian_error = std::abs(b.hessian_end - rep.classical[*b.vertex].hessian);
    rep.branches[k] = std::move(b);
  });

  LagrangianSample end_sample = sample;
  for (std::size_t k = 0; k < end_sample.points.size(); ++k) {
    auto& pt = end_sample.points[k];
    pt.p = rep.branches[k].end;
    pt.hessian = rep.branches[k].hessian_end;
    for (auto& q : pt.Q) q *= t_min;
  }
  for (auto& [a, b] : pairs) {
    RatFunc phi = parse_ratfunc(a), psi = parse_ratfunc(b);
    PairingCheck pc{a, b, residue_pairing(model, end_sample, phi, psi).value, 0, 0};
    for (auto& cp : rep.classical) {
      pc.localization += evaluate_test_function(phi, cp.p, rep.lambda) * evaluate_test_function(psi, cp.p, rep.lambda) /
                         cp.hessian;
    }
    pc.error = std::abs(pc.residue - pc.localization);
    rep.pairings.push_back(pc);
  }
  return rep;
}

}  // namespace mirrorkit
