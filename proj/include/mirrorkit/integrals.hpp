#pragma once

// Mirror oscillating integrals with a one-dimensional fiber: the
// cohomological integral over the positive ray and the K-theoretic one over a
// circle, numeric checks of their equations, and stationary-phase ratios.

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mirrorkit/critical.hpp"
#include "mirrorkit/operators.hpp"

namespace mirrorkit {

enum class IntegralKind { cohomological, k_theoretic };

inline std::string to_string(IntegralKind k) { return k == IntegralKind::cohomological ? "h" : "k"; }

struct QuadratureConfig {
  int initial_nodes = 64;
  int max_doublings = 14;
  double target = 1e-13;  // stop once successive values agree to this
  double accept = 1e-9;   // QuadratureFailure above this
  double range_drop = 45;  // truncate where log|integrand| < max - range_drop
};

struct IntegralSpec {
  IntegralKind kind = IntegralKind::cohomological;
  std::vector<cplx> Q;
  cplx z = 0.1;        // cohomological
  cplx q = 0.5;        // k-theoretic, |q| < 1
  double radius = 0.5;  // k-theoretic circle |t| = radius
  QuadratureConfig quad;
};

struct IntegralValue {
  cplx value;
  double error;   // change under the last node doubling
  int nodes;
  double volume;  // |dln x / dln Q| in the fiber chart
  std::string normalization;
};

namespace detail {

struct FiberChart {
  std::vector<cplx> c;  // x_j = c_j t^{w_j}
  std::vector<std::int64_t> w;
  double volume;
};

inline FiberChart fiber_chart(const ToricModel& model, const std::vector<cplx>& Q) {
  const int N = model.N(), K = model.K();
  if (static_cast<int>(Q.size()) != K) throw Error(ErrorKind::InvalidArgument, "Q must have K entries");
  const auto& fp = model.fiber_parametrization();
  if (N - K > 1)
    throw Error(ErrorKind::UnsupportedDimension,
                "integrals are implemented for fiber dimension <= 1, model has " + std::to_string(N - K));
  FiberChart ch;
  RatMatrix chart(N, std::vector<Rational>(N));
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < K; ++i) chart[j][i] = fp.section[j][i];
    if (N > K) chart[j][K] = static_cast<long>(fp.fiber[0][j]);
  }
  ch.volume = std::abs(determinant(chart).get_d());
  for (int j = 0; j < N; ++j) {
    cplx c = 1;
    for (int i = 0; i < K; ++i) {
      const Rational& e = fp.section[j][i];
      if (e == 0) continue;
      if (Q[i] == cplx(0)) {
        c = 0;
        continue;
      }
      c *= std::pow(Q[i], e.get_d());
    }
    ch.c.push_back(c);
    ch.w.push_back(N > K ? fp.fiber[0][j] : 0);
  }
  return ch;
}

/// Trapezoid with node doubling; f is sampled at n equispaced nodes by sum(n).
template <class Sum>
IntegralValue refine(const Sum& sum, const QuadratureConfig& cfg) {
  int n = cfg.initial_nodes;
  cplx prev = sum(n);
  double change = INFINITY;
  for (int k = 0; k < cfg.max_doublings; ++k) {
    n *= 2;
    cplx cur = sum(n);
    change = std::abs(cur - prev);
    prev = cur;
    if (change <= cfg.target * std::abs(cur)) break;
  }
  if (!(change <= cfg.accept * std::abs(prev)))
    throw Error(ErrorKind::QuadratureFailure, "quadrature did not settle under node doubling");
  return IntegralValue{prev, change, n, 1, ""};
}

/// 1 / (X; q)_infinity.
inline cplx inverse_pochhammer(cplx X, cplx q) {
  cplx acc = 1, term = X;
  for (int r = 0; r < 100000 && std::abs(term) > 1e-18; ++r) {
    acc /= 1.0 - term;
    term *= q;
  }
  return acc;
}

}  // namespace detail

/// Integral of exp(-sum_j x_j / z) d ln t over t in (0, infinity).
inline IntegralValue eval_integral_H(const ToricModel& model, const IntegralSpec& spec) {
  if (!(spec.z.real() > 0)) throw Error(ErrorKind::InvalidArgument, "z needs a positive real part");
  auto ch = detail::fiber_chart(model, spec.Q);
  const int N = model.N();
  if (model.fiber_dimension() == 0) {
    cplx s = 0;
    for (auto& c : ch.c) s += c;
    return IntegralValue{std::exp(-s / spec.z) * ch.volume, 0, 1, ch.volume, "point evaluation"};
  }
  // decay at both ends from the dominant exponents
  for (int side : {1, -1}) {
    std::int64_t top = 0;
    for (int j = 0; j < N; ++j)
      if (ch.c[j] != cplx(0)) top = std::max(top, side * ch.w[j]);
    cplx lead = 0;
    for (int j = 0; j < N; ++j)
      if (ch.c[j] != cplx(0) && side * ch.w[j] == top) lead += ch.c[j];
    if (top <= 0 || !((lead / spec.z).real() > 0))
      throw Error(ErrorKind::ContourDivergence,
                  std::string("integrand does not decay as t -> ") + (side > 0 ? "infinity" : "0"));
  }
  auto exponent = [&](double s) {
    cplx e = 0;
    for (int j = 0; j < N; ++j)
      if (ch.c[j] != cplx(0)) e -= ch.c[j] * std::exp(static_cast<double>(ch.w[j]) * s) / spec.z;
    return e;
  };
  // truncation window around the peak of |integrand|
  double smax = 0, gmax = -INFINITY;
  for (double s = -60; s <= 60; s += 0.05) {
    double g = exponent(s).real();
    if (g > gmax) gmax = g, smax = s;
  }
  auto edge = [&](double dir) {
    double s = smax;
    int below = 0;
    while (below < 4) {
      s += dir * 0.05;
      if (std::abs(s) > 400) throw Error(ErrorKind::QuadratureFailure, "integrand window too wide");
      below = exponent(s).real() < gmax - spec.quad.range_drop ? below + 1 : 0;
    }
    return s;
  };
  const double lo = edge(-1), hi = edge(1);
  auto sum = [&](int n) {
    double h = (hi - lo) / n;
    cplx acc = 0;
    for (int k = 0; k <= n; ++k) acc += std::exp(exponent(lo + k * h));
    return acc * h;
  };
  auto v = detail::refine(sum, spec.quad);
  v.value *= ch.volume;
  v.error *= ch.volume;
  v.volume = ch.volume;
  v.normalization = "integral of exp(-sum x/z) dln x/dln Q over the positive ray, no 2pi factors";
  return v;
}

/// Whether a pole circle |X_j(t) q^r| = 1 meets |t| = radius.
inline void check_poles(const detail::FiberChart& ch, cplx q, double radius) {
  const double lq = std::log(std::abs(q));
  for (std::size_t j = 0; j < ch.c.size(); ++j) {
    if (ch.c[j] == cplx(0)) continue;
    double lx = std::log(std::abs(ch.c[j])) + static_cast<double>(ch.w[j]) * std::log(radius);
    // poles need lx + r lq = 0 for some r >= 0
    if (lx < -1e-9) continue;
    double r = -lx / lq;
    double nearest = std::round(r);
    if (std::abs(lx + nearest * lq) < 1e-6)
      throw Error(ErrorKind::PoleOnContour, "the circle passes through a pole of the amplitude");
  }
}

/// (1/2 pi i) contour integral of prod_j 1/(X_j(t); q)_infinity dt/t over |t| = radius.
inline IntegralValue eval_integral_K(const ToricModel& model, const IntegralSpec& spec) {
  if (!(std::abs(spec.q) < 1)) throw Error(ErrorKind::InvalidArgument, "|q| must be below 1");
  if (!(spec.radius > 0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
  auto ch = detail::fiber_chart(model, spec.Q);
  const int N = model.N();
  if (model.fiber_dimension() == 0) {
    cplx a = 1;
    for (auto& c : ch.c) a *= detail::inverse_pochhammer(c, spec.q);
    return IntegralValue{a * ch.volume, 0, 1, ch.volume, "point evaluation"};
  }
  check_poles(ch, spec.q, spec.radius);
  auto sum = [&](int n) {
    cplx acc = 0;
    for (int k = 0; k < n; ++k) {
      cplx t = std::polar(spec.radius, 2 * kPi * k / n);
      cplx a = 1;
      for (int j = 0; j < N; ++j) a *= detail::inverse_pochhammer(ch.c[j] * detail::ipow(t, ch.w[j]), spec.q);
      acc += a;
    }
    return acc / static_cast<double>(n);
  };
  auto v = detail::refine(sum, spec.quad);
  v.value *= ch.volume;
  v.error *= ch.volume;
  v.volume = ch.volume;
  v.normalization = "(1/2 pi i) times the contour integral against dt/t";
  return v;
}

inline IntegralValue eval_integral(const ToricModel& model, const IntegralSpec& spec) {
  return spec.kind == IntegralKind::cohomological ? eval_integral_H(model, spec) : eval_integral_K(model, spec);
}

// ---- equation residuals ------------------------------------------------------

/// Fornberg weights for the k-th derivative at 0 on the nodes x.
inline std::vector<double> fd_weights(const std::vector<double>& x, int k) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(k + 1, 0.0));
  double c1 = 1, c4 = x[0];
  c[0][0] = 1;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, k);
    double c2 = 1, c5 = c4;
    c4 = x[i];
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int s = mn; s >= 1; --s) c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int s = mn; s >= 1; --s) c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][k];
  return w;
}

struct EquationResidual {
  IntegralKind kind;
  cplx lhs, rhs, value;
  double residual;  // |lhs - rhs| / |value|
  std::vector<std::pair<std::string, cplx>> evaluations;  // shifted arguments used
};

namespace detail {

/// Expands a product of diagonal scalar factors into sum coeff * T^v * prod(forms).
inline ShiftOperator expand(const std::vector<ShiftOperator>& factors, int K) {
  ShiftOperator acc = ShiftOperator::identity(K);
  for (auto& f : factors) acc = acc.compose(f);
  return acc;
}

inline std::string vec_string(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

}  // namespace detail

/// q-case: T^v I(Q) = I(q^v Q), residual of the scalar equation `equation`.
/// z-case (K = 1): theta = Q dQ by Richardson-extrapolated central differences in ln Q.
inline EquationResidual check_equation_numeric(const ToricModel& model, const IntegralSpec& spec, int equation = 0,
                                               double h = 1e-3) {
  const int K = model.K();
  if (equation < 0 || equation >= K) throw Error(ErrorKind::InvalidArgument, "equation index out of range");
  EquationResidual res;
  res.kind = spec.kind;
  if (spec.kind == IntegralKind::k_theoretic) {
    auto sys = build_system_K(model, Representation::scalar);
    const auto& eq = sys.equations[equation];
    std::map<std::vector<int>, cplx> cache;
    auto I_at = [&](const std::vector<int>& v) {
      auto it = cache.find(v);
      if (it != cache.end()) return it->second;
      IntegralSpec s = spec;
      for (int i = 0; i < K; ++i) s.Q[i] *= detail::ipow(spec.q, v[i]);
      cplx val = eval_integral_K(model, s).value;
      cache.emplace(v, val);
      res.evaluations.emplace_back("I(q^" + detail::vec_string(v) + " Q)", val);
      return val;
    };
    auto side = [&](const std::vector<ShiftOperator>& f) {
      cplx acc = 0;
      const ShiftOperator op = detail::expand(f, K);
      for (auto& t : op.terms()) {
        cplx c = t.coeff.evaluate({{var::q, spec.q}});
        acc += c * I_at(t.qshift);
      }
      return acc;
    };
    res.value = I_at(std::vector<int>(K, 0));
    res.lhs = side(eq.lhs);
    res.rhs = spec.Q[equation] * side(eq.rhs);
  } else {
    if (K != 1) throw Error(ErrorKind::UnsupportedDimension, "the differential check is implemented for K = 1");
    auto sys = build_system_H(model, Representation::scalar);
    const auto& eq = sys.equations[0];
    // theta^k I at ln Q, Richardson over h and h/2 (order 4 for central stencils)
    const cplx lnQ = std::log(spec.Q[0]);
    std::map<long, cplx> samples;  // keyed by multiples of h/2
    auto I_shift = [&](long k) {
      auto it = samples.find(k);
      if (it != samples.end()) return it->second;
      IntegralSpec s = spec;
      s.Q[0] = std::exp(lnQ + 0.5 * h * static_cast<double>(k));
      cplx v = eval_integral_H(model, s).value;
      samples.emplace(k, v);
      return v;
    };
    auto theta_pow = [&](int k) -> cplx {
      if (k == 0) return I_shift(0);
      int half = (k + 1) / 2;
      auto at_step = [&](int scale) {  // scale 2: step h, 1: step h/2
        std::vector<double> x;
        for (int i = -half; i <= half; ++i) x.push_back(i);
        auto w = fd_weights(x, k);
        cplx acc = 0;
        for (int i = -half; i <= half; ++i) acc += w[i + half] * I_shift(static_cast<long>(i) * scale);
        return acc / std::pow(0.5 * h * scale, k);
      };
      return (4.0 * at_step(1) - at_step(2)) / 3.0;
    };
    auto side = [&](const std::vector<ShiftOperator>& f) {
      cplx acc = 0;
      const ShiftOperator op = detail::expand(f, 1);
      for (auto& t : op.terms()) {
        // prod_k (w_k theta + c_k) as a polynomial in theta
        std::vector<cplx> poly{1};
        for (auto& form : t.forms) {
          std::vector<cplx> next(poly.size() + 1, 0);
          for (std::size_t a = 0; a < poly.size(); ++a) {
            next[a] += poly[a] * static_cast<double>(form.c);
            next[a + 1] += poly[a] * static_cast<double>(form.w[0]);
          }
          poly = next;
        }
        cplx c = t.coeff.evaluate({{var::z, spec.z}});
        for (std::size_t a = 0; a < poly.size(); ++a)
          if (poly[a] != cplx(0)) acc += c * poly[a] * theta_pow(static_cast<int>(a));
      }
      return acc;
    };
    res.value = I_shift(0);
    res.lhs = side(eq.lhs);
    res.rhs = spec.Q[0] * side(eq.rhs);
    for (auto& [k, v] : samples) res.evaluations.emplace_back("I(exp(" + std::to_string(0.5 * h * k) + ") Q)", v);
  }
  res.residual = std::abs(res.lhs - res.rhs) / std::abs(res.value);
  return res;
}

// ---- stationary phase ----------------------------------------------------------

/// sqrt(2 pi): numeric integral of exp(-t^2 / 2z) over the real line divided by sqrt(z).
struct GaussianCalibration {
  double z;
  double numeric;
  double constant;  // numeric / sqrt(z)
};

inline GaussianCalibration gaussian_calibration(double z, const QuadratureConfig& cfg = {}) {
  double half = std::sqrt(2 * z * cfg.range_drop) * 1.2;
  auto sum = [&](int n) {
    double h = 2 * half / n;
    cplx acc = 0;
    for (int k = 0; k <= n; ++k) {
      double t = -half + k * h;
      acc += std::exp(-t * t / (2 * z));
    }
    return acc * h;
  };
  auto v = detail::refine(sum, cfg);
  return {z, v.value.real(), v.value.real() / std::sqrt(z)};
}

struct PhaseRow {
  double z;
  cplx numeric;
  cplx leading;
  cplx ratio;
  double deviation;  // |ratio - 1|
};

struct StationaryPhaseTable {
  CriticalPoint dominant;
  cplx phase_value;  // F = -sum_j x_j at the dominant point
  double constant;   // sqrt(2 pi), from the Gaussian calibration
  std::vector<PhaseRow> rows;
};

/// Ratios numeric / [sqrt(2 pi z) e^{F/z} / sqrt(Delta)] at the critical point
/// on the positive ray with the largest Re F.
inline StationaryPhaseTable stationary_phase_compare(const ToricModel& model, const std::vector<cplx>& Q,
                                                     const std::vector<double>& zs, const SolverConfig& cfg = {},
                                                     const QuadratureConfig& quad = {}) {
  if (model.fiber_dimension() != 1)
    throw Error(ErrorKind::UnsupportedDimension, "stationary phase comparison needs fiber dimension 1");
  auto sample = critical_points_H(model, Q, {}, cfg);
  std::vector<const CriticalPoint*> on_ray;
  for (auto& pt : sample.points) {
    bool real_positive = true;
    for (auto& x : pt.x) real_positive = real_positive && x.real() > 0 && std::abs(x.imag()) <= 1e-9 * std::abs(x);
    if (real_positive) on_ray.push_back(&pt);
  }
  if (on_ray.empty()) throw Error(ErrorKind::DominantCriticalAmbiguous, "no critical point on the integration ray");
  std::sort(on_ray.begin(), on_ray.end(), [](auto* a, auto* b) { return (-*a->value).real() > (-*b->value).real(); });
  if (on_ray.size() > 1 &&
      std::abs((*on_ray[0]->value).real() - (*on_ray[1]->value).real()) <= 1e-12 * std::abs(*on_ray[0]->value))
    throw Error(ErrorKind::DominantCriticalAmbiguous, "two critical values share the largest real part");
  StationaryPhaseTable table;
  table.dominant = *on_ray[0];
  table.phase_value = -*table.dominant.value;
  table.constant = gaussian_calibration(1.0, quad).constant;
  const cplx delta = *table.dominant.hessian;
  for (double z : zs) {
    IntegralSpec spec;
    spec.Q = Q;
    spec.z = z;
    spec.quad = quad;
    cplx num = eval_integral_H(model, spec).value;
    cplx lead = table.constant * std::sqrt(z) * std::exp(table.phase_value / z) / std::sqrt(delta);
    cplx ratio = num / lead;
    table.rows.push_back({z, num, lead, ratio, std::abs(ratio - 1.0)});
  }
  return table;
}

// ---- amplitude identity ----------------------------------------------------------

struct AmplitudeIdentityReport {
  int order;
  std::vector<bool> matches;  // per power of X
  bool pass() const {
    for (bool b : matches)
      if (!b) return false;
    return true;
  }
};

/// exp(sum_k X^k / (k (1 - q^k))) against sum_n X^n / (q; q)_n, exactly to X^order.
/// Uses n g_n = sum_{k=1}^n k f_k g_{n-k} for g = exp(f).
inline AmplitudeIdentityReport amplitude_identity_check(int order) {
  AmplitudeIdentityReport rep{order, {}};
  const RatFunc q = RatFunc::q();
  std::vector<RatFunc> kf(order + 1), g(order + 1);
  for (int k = 1; k <= order; ++k) kf[k] = (RatFunc(1) - q.pow(k)).inverse();  // k f_k
  g[0] = RatFunc(1);
  RatFunc poch(1);
  for (int n = 0; n <= order; ++n) {
    if (n > 0) {
      RatFunc acc;
      for (int k = 1; k <= n; ++k) acc += kf[k] * g[n - k];
      g[n] = acc / RatFunc(static_cast<long>(n));
      poch *= RatFunc(1) - q.pow(n);
    }
    rep.matches.push_back(g[n] == poch.inverse());
  }
  return rep;
}

}  // namespace mirrorkit
