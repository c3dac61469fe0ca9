#pragma once

// Shift operators on Novikov-graded series and the differential /
// q-difference systems they form.
//
// A term acts on the coefficient map as
//   (term s)_d = coeff * ring * q^{<v, d-e>} * prod_k (<w_k, d-e> + c_k) * s_{d-e},
// i.e. it is Q^e composed after a diagonal multiplier. q^{<v,d>} is the action of
// the translation T^v = q^{sum_i v_i Q_i dQ_i} and <w,d> that of sum_i w_i Q_i dQ_i.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mirrorkit/series.hpp"

namespace mirrorkit {

enum class Representation { scalar, vector };

inline std::string to_string(Representation r) { return r == Representation::scalar ? "scalar" : "vector"; }

struct AffineForm {
  std::vector<int> w;
  std::int64_t c = 0;

  std::int64_t at(const Degree& d) const {
    std::int64_t s = c;
    for (std::size_t i = 0; i < w.size(); ++i) s += static_cast<std::int64_t>(w[i]) * d[i];
    return s;
  }
};

inline std::int64_t dot(const std::vector<int>& a, const Degree& d) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<std::int64_t>(a[i]) * d[i];
  return s;
}

struct ShiftTerm {
  RatFunc coeff{1};
  std::optional<RingElement> ring;  // absent in the scalar representation
  std::string ring_label;           // for printing, e.g. "U2"
  std::vector<int> qshift;          // v
  std::vector<AffineForm> forms;    // w_k, c_k
  std::vector<int> novikov;         // e

  /// Diagonal multiplier at degree d (before the Novikov shift).
  RatFunc scalar_multiplier(const Degree& d) const {
    RatFunc m = coeff;
    std::int64_t k = dot(qshift, d);
    if (k != 0) m *= RatFunc::q().pow(static_cast<int>(k));
    for (auto& f : forms) {
      std::int64_t v = f.at(d);
      if (v == 0) return RatFunc();
      m *= RatFunc(static_cast<long>(v));
    }
    return m;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "(" << coeff.to_string() << ")";
    if (ring) os << "*" << (ring_label.empty() ? "[" + ring->to_string() + "]" : ring_label);
    auto vec = [](const std::vector<int>& v) {
      std::string s = "[";
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
      return s + "]";
    };
    bool nonzero_shift = false;
    for (int x : qshift) nonzero_shift = nonzero_shift || x != 0;
    if (nonzero_shift) os << "*T" << vec(qshift);
    for (auto& f : forms) {
      os << "*(th" << vec(f.w);
      if (f.c) os << (f.c > 0 ? "+" : "") << f.c;
      os << ")";
    }
    bool nonzero_e = false;
    for (int x : novikov) nonzero_e = nonzero_e || x != 0;
    if (nonzero_e) os << "*Q" << vec(novikov) << "o";
    return os.str();
  }
};

/// Finite sum of terms.
class ShiftOperator {
 public:
  ShiftOperator() = default;
  explicit ShiftOperator(std::vector<ShiftTerm> terms) : terms_(std::move(terms)) {}

  static ShiftOperator identity(int K) {
    ShiftTerm t;
    t.qshift.assign(K, 0);
    t.novikov.assign(K, 0);
    return ShiftOperator({t});
  }
  static ShiftOperator translation(const std::vector<int>& v, const RatFunc& coeff = RatFunc(1)) {
    ShiftTerm t;
    t.coeff = coeff;
    t.qshift = v;
    t.novikov.assign(v.size(), 0);
    return ShiftOperator({t});
  }
  static ShiftOperator novikov_monomial(const std::vector<int>& e) {
    ShiftTerm t;
    t.qshift.assign(e.size(), 0);
    t.novikov = e;
    return ShiftOperator({t});
  }

  const std::vector<ShiftTerm>& terms() const { return terms_; }
  void add(ShiftTerm t) { terms_.push_back(std::move(t)); }

  int max_novikov_shift() const {
    int m = 0;
    for (auto& t : terms_)
      for (int e : t.novikov) m = std::max(m, std::abs(e));
    return m;
  }
  bool diagonal() const { return max_novikov_shift() == 0; }

  /// (*this) o other. Moving a multiplier past Q^e evaluates it at d + e:
  /// T^v Q^e = q^{<v,e>} Q^e T^v, and forms pick up <w,e>.
  ShiftOperator compose(const ShiftOperator& other) const {
    ShiftOperator out;
    for (auto& a : terms_)
      for (auto& b : other.terms_) {
        ShiftTerm t;
        const std::vector<int>& e2 = b.novikov;
        std::int64_t k = 0;
        for (std::size_t i = 0; i < a.qshift.size(); ++i) k += static_cast<std::int64_t>(a.qshift[i]) * e2[i];
        t.coeff = a.coeff * b.coeff * RatFunc::q().pow(static_cast<int>(k));
        if (a.ring && b.ring) t.ring = *a.ring * *b.ring;
        else if (a.ring) t.ring = a.ring;
        else if (b.ring) t.ring = b.ring;
        t.ring_label = a.ring_label.empty() ? b.ring_label
                       : b.ring_label.empty() ? a.ring_label
                                              : a.ring_label + "*" + b.ring_label;
        t.qshift.resize(std::max(a.qshift.size(), b.qshift.size()), 0);
        for (std::size_t i = 0; i < a.qshift.size(); ++i) t.qshift[i] += a.qshift[i];
        for (std::size_t i = 0; i < b.qshift.size(); ++i) t.qshift[i] += b.qshift[i];
        for (auto f : a.forms) {
          for (std::size_t i = 0; i < f.w.size(); ++i) f.c += static_cast<std::int64_t>(f.w[i]) * e2[i];
          t.forms.push_back(f);
        }
        for (auto& f : b.forms) t.forms.push_back(f);
        t.novikov.resize(std::max(a.novikov.size(), e2.size()), 0);
        for (std::size_t i = 0; i < a.novikov.size(); ++i) t.novikov[i] += a.novikov[i];
        for (std::size_t i = 0; i < e2.size(); ++i) t.novikov[i] += e2[i];
        out.terms_.push_back(std::move(t));
      }
    return out;
  }

  /// Coefficient of the result at degree d.
  RingElement apply_at(const TruncatedSeries& s, const Degree& d) const {
    RingElement acc = RingElement::zero(s.ring());
    for (auto& t : terms_) {
      Degree src = d;
      for (std::size_t i = 0; i < src.size(); ++i) src[i] -= t.novikov[i];
      RatFunc m = t.scalar_multiplier(src);
      if (m.is_zero()) continue;
      RingElement c = s.at(src);
      if (c.is_zero()) continue;
      if (t.ring) {
        if (t.ring->ring() != s.ring()) throw Error(ErrorKind::RingMismatch, "operator and series rings differ");
        c = *t.ring * c;
      }
      acc += c * m;
    }
    return acc;
  }

  /// Output box shrinks by the largest Novikov shift.
  TruncatedSeries apply(const TruncatedSeries& s) const {
    int r = s.dmax() - max_novikov_shift();
    if (r < 0) throw Error(ErrorKind::InvalidArgument, "operator shift exceeds the truncation box");
    for (auto& t : terms_)
      if (t.ring && t.ring->ring() != s.ring())
        throw Error(ErrorKind::RingMismatch, "operator and series rings differ");
    auto degrees = box_degrees(s.K(), r);
    std::vector<RingElement> vals(degrees.size());
    parallel_for(degrees.size(), [&](std::size_t k) { vals[k] = apply_at(s, degrees[k]); });
    TruncatedSeries out(s.kind(), s.toric_ring(), s.K(), r);
    for (std::size_t k = 0; k < degrees.size(); ++k)
      if (!vals[k].is_zero()) out.set(degrees[k], std::move(vals[k]));
    return out;
  }

  std::string to_string() const {
    std::string s;
    for (auto& t : terms_) s += (s.empty() ? "" : " + ") + t.to_string();
    return s.empty() ? "0" : s;
  }

 private:
  std::vector<ShiftTerm> terms_;
};

/// lhs_1 ... lhs_m I = Q^{shift} rhs_1 ... rhs_n I. All factors are diagonal.
struct Equation {
  std::vector<ShiftOperator> lhs;
  std::vector<int> rhs_shift;
  std::vector<ShiftOperator> rhs;
  std::vector<std::string> moves;  // normalization metadata

  std::string to_string() const {
    auto side = [](const std::vector<ShiftOperator>& f) {
      std::string s;
      for (auto& op : f) s += "[" + op.to_string() + "]";
      return s.empty() ? std::string("1") : s;
    };
    std::string e = "Q[";
    for (std::size_t i = 0; i < rhs_shift.size(); ++i) e += (i ? "," : "") + std::to_string(rhs_shift[i]);
    return side(lhs) + " I = " + e + "] " + side(rhs) + " I";
  }
};

struct OperatorSystem {
  SeriesKind kind;
  Representation representation;
  std::vector<Equation> equations;
  std::vector<std::string> notes;

  int max_shift() const {
    int m = 0;
    for (auto& eq : equations) {
      for (int e : eq.rhs_shift) m = std::max(m, std::abs(e));
      for (auto& f : eq.lhs) m = std::max(m, f.max_novikov_shift());
      for (auto& f : eq.rhs) m = std::max(m, f.max_novikov_shift());
    }
    return m;
  }
};

namespace detail {

inline std::vector<int> column(const ToricModel& model, int j) {
  std::vector<int> v(model.K());
  for (int i = 0; i < model.K(); ++i) v[i] = static_cast<int>(model.m(i, j));
  return v;
}

inline std::vector<int> bundle_column(const ToricModel& model, int a) {
  std::vector<int> v(model.K());
  for (int i = 0; i < model.K(); ++i) v[i] = static_cast<int>(model.l(i, a));
  return v;
}

inline std::vector<int> unit_vector(int K, int i) {
  std::vector<int> e(K, 0);
  e[i] = 1;
  return e;
}

inline ShiftTerm plain_term(int K, RatFunc coeff) {
  ShiftTerm t;
  t.coeff = std::move(coeff);
  t.qshift.assign(K, 0);
  t.novikov.assign(K, 0);
  return t;
}

/// u_j + rz - z sum_i m_ij Q_i dQ_i (vector) or rz - z sum_i m_ij Q_i dQ_i (scalar).
inline ShiftOperator h_factor(const ToricModel& model, const ToricRing* tr, int j, std::int64_t r) {
  const int K = model.K();
  ShiftOperator op;
  if (tr) {
    ShiftTerm u = plain_term(K, RatFunc(1));
    u.ring = tr->divisors[j];
    u.ring_label = "u" + std::to_string(j + 1);
    op.add(u);
  }
  if (r != 0) op.add(plain_term(K, RatFunc::z() * RatFunc(static_cast<long>(r))));
  ShiftTerm d = plain_term(K, -RatFunc::z());
  d.forms.push_back(AffineForm{column(model, j), 0});
  op.add(d);
  return op;
}

/// 1 - c * M * T^v, with M the vector-representation multiplier (absent for scalar).
inline ShiftOperator q_factor(int K, const RatFunc& c, const std::optional<RingElement>& M, const std::string& label,
                              const std::vector<int>& v) {
  ShiftOperator op;
  op.add(plain_term(K, RatFunc(1)));
  ShiftTerm t = plain_term(K, -c);
  t.ring = M;
  if (M) t.ring_label = label;
  t.qshift = v;
  op.add(t);
  return op;
}

inline RatFunc qpow(std::int64_t k) { return RatFunc::q().pow(static_cast<int>(k)); }

}  // namespace detail

/// Equation i: prod_{j: m_ij>0} prod_{r=0}^{m_ij-1} (D_j + rz) I
///           = Q_i prod_{j: m_ij<0} prod_{r=0}^{-m_ij-1} (D_j + rz) I,
/// where D_j acts at degree d by u_j - z D_j(d) (vector) or -z D_j(d) (scalar).
inline OperatorSystem build_system_H(const ToricModel& model, Representation rep, const ToricRing* ring = nullptr) {
  if (rep == Representation::vector && (!ring || ring->ring->mode() != RingMode::cohomology))
    throw Error(ErrorKind::RingMismatch, "vector representation needs the cohomology ring");
  OperatorSystem sys{SeriesKind::H, rep, {}, {}};
  const ToricRing* tr = rep == Representation::vector ? ring : nullptr;
  for (int i = 0; i < model.K(); ++i) {
    Equation eq;
    eq.rhs_shift = detail::unit_vector(model.K(), i);
    for (int j = 0; j < model.N(); ++j) {
      std::int64_t mij = model.m(i, j);
      if (mij > 0)
        for (std::int64_t r = 0; r < mij; ++r) eq.lhs.push_back(detail::h_factor(model, tr, j, r));
      if (mij < 0)
        for (std::int64_t r = 0; r < -mij; ++r) eq.rhs.push_back(detail::h_factor(model, tr, j, r));
    }
    sys.equations.push_back(std::move(eq));
  }
  if (rep == Representation::vector) sys.notes.push_back("vector representation: -z Q_i dQ_i acts as p_i - z Q_i dQ_i");
  return sys;
}

/// Equation i: prod_{j: m_ij>0} prod_{r=0}^{m_ij-1} (1 - q^{-r} T^{m_j}) I
///           = Q_i prod_{j: m_ij<0} prod_{r=0}^{-m_ij-1} (1 - q^{-r} T^{m_j}) I,
/// with T^{m_j} acting as Lam_j^{-1} U_j q^{D_j(d)} in the vector representation.
inline OperatorSystem build_system_K(const ToricModel& model, Representation rep, const ToricRing* ring = nullptr) {
  if (rep == Representation::vector && (!ring || ring->ring->mode() != RingMode::k_theory))
    throw Error(ErrorKind::RingMismatch, "vector representation needs the K-theory ring");
  OperatorSystem sys{SeriesKind::K, rep, {}, {}};
  const int K = model.K();
  for (int i = 0; i < K; ++i) {
    Equation eq;
    eq.rhs_shift = detail::unit_vector(K, i);
    for (int j = 0; j < model.N(); ++j) {
      std::int64_t mij = model.m(i, j);
      if (mij == 0) continue;
      std::optional<RingElement> M;
      RatFunc c(1);
      if (rep == Representation::vector) {
        M = ring->divisors[j];
        c = ring->equivariant_parameters[j];
      }
      auto& side = mij > 0 ? eq.lhs : eq.rhs;
      for (std::int64_t r = 0; r < std::abs(mij); ++r)
        side.push_back(detail::q_factor(K, c * detail::qpow(-r), M, "U" + std::to_string(j + 1), detail::column(model, j)));
    }
    sys.equations.push_back(std::move(eq));
  }
  if (rep == Representation::vector) sys.notes.push_back("vector representation: q^{Q_i dQ_i} acts as P_i q^{Q_i dQ_i}");
  return sys;
}

/// Which sign of r to use in the bundle factors of the E and Pi E* systems.
/// `series_consistent` is the reading annihilated by I_E and I_{Pi E*};
/// `as_displayed` keeps the printed exponents (q^{r} T^{-l_a} for E,
/// q^{-r} T^{l_a} for Pi E*, with multipliers P^{-l_a} and P^{l_a}).
enum class BundleReading { series_consistent, as_displayed };

namespace detail {

/// Shared builder: the base product over all j uses the reindexing convention
/// prod_{r=0}^{m-1} = prod_{-inf}^{m-1} / prod_{-inf}^{-1}; a negative m gives
/// inverse factors, which are moved to the other side across Q_i.
inline OperatorSystem build_bundle_system(const ToricModel& model, const ToricRing& ring, bool pi, BundleReading reading) {
  if (!model.has_bundle() || ring.bundles.empty())
    throw Error(ErrorKind::MissingBundleData, "model '" + model.name() + "' has no bundle weights");
  if (ring.ring->mode() != RingMode::k_theory)
    throw Error(ErrorKind::RingMismatch, "bundle systems need the K-theory ring");
  OperatorSystem sys{pi ? SeriesKind::PiE : SeriesKind::E, Representation::vector, {}, {}};
  const int K = model.K();
  for (int i = 0; i < K; ++i) {
    Equation eq;
    eq.rhs_shift = unit_vector(K, i);
    for (int j = 0; j < model.N(); ++j) {
      std::int64_t mij = model.m(i, j);
      auto v = column(model, j);
      std::string label = "U" + std::to_string(j + 1);
      if (mij > 0) {
        for (std::int64_t r = 0; r < mij; ++r)
          eq.lhs.push_back(q_factor(K, ring.equivariant_parameters[j] * qpow(-r), ring.divisors[j], label, v));
      } else if (mij < 0) {
        // inverse factors r = m..-1 move right, evaluated one Q_i-step later: q^{<v,e_i>} = q^{m_ij}
        for (std::int64_t r = mij; r <= -1; ++r)
          eq.rhs.push_back(q_factor(K, ring.equivariant_parameters[j] * qpow(-r + mij), ring.divisors[j], label, v));
        eq.moves.push_back("divisor " + std::to_string(j + 1) + ": " + std::to_string(-mij) +
                           " inverse factor(s) moved to the right with prefactor q^" + std::to_string(mij));
      }
    }
    for (int a = 0; a < model.L(); ++a) {
      std::int64_t lia = model.l(i, a);
      if (lia == 0) continue;
      auto l = bundle_column(model, a);
      std::string label = "V" + std::to_string(a + 1);
      std::vector<int> shift = l;
      std::optional<RingElement> M = ring.bundles[a];
      std::int64_t lo = pi ? 1 : 0, hi = pi ? lia : lia - 1;  // prod_{r=lo}^{hi}
      int sign = pi ? 1 : -1;                                // q^{sign * r}
      if (!pi) {
        for (auto& x : shift) x = -x;
      }
      if (reading == BundleReading::as_displayed) {
        sign = -sign;
        RingElement P = RingElement::one(ring.ring);
        for (int k = 0; k < K; ++k)
          if (shift[k] != 0) P *= ring.generators[k].pow(shift[k]);
        M = P;
        label = pi ? label : label + "^-1";
      }
      std::int64_t ei = shift[i];  // <shift, e_i>
      if (hi >= lo - 1) {
        for (std::int64_t r = lo; r <= hi; ++r) eq.rhs.push_back(q_factor(K, qpow(sign * r), M, label, shift));
      } else {
        // inverse of prod_{r=hi+1}^{lo-1}: move left, evaluated one Q_i-step earlier
        for (std::int64_t r = hi + 1; r <= lo - 1; ++r)
          eq.lhs.push_back(q_factor(K, qpow(sign * r - ei), M, label, shift));
        eq.moves.push_back("bundle " + std::to_string(a + 1) + ": " + std::to_string(lo - 1 - hi) +
                           " inverse factor(s) moved to the left with prefactor q^" + std::to_string(-ei));
      }
    }
    sys.equations.push_back(std::move(eq));
  }
  sys.notes.push_back("vector representation: translations in Q carry their line bundle multipliers");
  if (reading == BundleReading::series_consistent)
    sys.notes.push_back(pi ? "Pi E* factors read as (1 - q^{r} V_a q^{sum l Q dQ}), r = 1..l_ia"
                           : "E factors read as (1 - q^{-r} V_a q^{-sum l Q dQ}), r = 0..l_ia-1");
  return sys;
}

}  // namespace detail

inline OperatorSystem build_system_E(const ToricModel& model, const ToricRing& ring,
                                     BundleReading reading = BundleReading::series_consistent) {
  return detail::build_bundle_system(model, ring, false, reading);
}

inline OperatorSystem build_system_PiE(const ToricModel& model, const ToricRing& ring,
                                       BundleReading reading = BundleReading::series_consistent) {
  return detail::build_bundle_system(model, ring, true, reading);
}

struct DegreeCheck {
  Degree d;
  bool pass;
  std::string residual;  // empty on pass
};

struct EquationReport {
  std::vector<DegreeCheck> degrees;
  bool pass() const {
    for (auto& c : degrees)
      if (!c.pass) return false;
    return true;
  }
};

struct VerificationReport {
  SeriesKind kind;
  int dmax;
  int window;
  std::vector<EquationReport> equations;

  bool pass() const {
    for (auto& e : equations)
      if (!e.pass()) return false;
    return true;
  }
  std::size_t checked() const {
    std::size_t n = 0;
    for (auto& e : equations) n += e.degrees.size();
    return n;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (auto& e : equations)
      for (auto& c : e.degrees) n += c.pass ? 0 : 1;
    return n;
  }
};

/// Applies a product of diagonal factors at degree d.
inline RingElement apply_factors(const std::vector<ShiftOperator>& factors, const TruncatedSeries& s, const Degree& d) {
  RingElement c = s.at(d);
  for (auto it = factors.rbegin(); it != factors.rend() && !c.is_zero(); ++it) {
    RingElement next = RingElement::zero(s.ring());
    for (auto& t : it->terms()) {
      RatFunc m = t.scalar_multiplier(d);
      if (m.is_zero()) continue;
      if (t.ring) {
        if (t.ring->ring() != s.ring()) throw Error(ErrorKind::RingMismatch, "operator and series rings differ");
        next += (*t.ring * c) * m;
      } else {
        next += c * m;
      }
    }
    c = std::move(next);
  }
  return c;
}

/// Exact check of every equation at every degree of the safe window
/// |d|_inf <= dmax - max_shift.
inline VerificationReport verify(const OperatorSystem& sys, const TruncatedSeries& s) {
  for (auto& eq : sys.equations)
    for (const auto* side : {&eq.lhs, &eq.rhs})
      for (auto& f : *side)
        if (!f.diagonal()) throw Error(ErrorKind::InvalidArgument, "equation factors must be diagonal");
  VerificationReport rep{sys.kind, s.dmax(), s.dmax() - sys.max_shift(), {}};
  auto degrees = box_degrees(s.K(), rep.window);
  const std::size_t n = degrees.size();
  rep.equations.resize(sys.equations.size());
  for (auto& e : rep.equations) e.degrees.resize(n);
  parallel_for(sys.equations.size() * n, [&](std::size_t idx) {
    std::size_t ei = idx / n, k = idx % n;
    const Equation& eq = sys.equations[ei];
    const Degree& d = degrees[k];
    Degree src = d;
    for (std::size_t i = 0; i < src.size(); ++i) src[i] -= eq.rhs_shift[i];
    RingElement residual = apply_factors(eq.lhs, s, d) - apply_factors(eq.rhs, s, src);
    DegreeCheck c{d, residual.is_zero(), residual.is_zero() ? "" : residual.to_string()};
    rep.equations[ei].degrees[k] = std::move(c);
  });
  return rep;
}

}  // namespace mirrorkit
