#pragma once

// Sparse multivariate polynomials over Q with exact GMP coefficients, plus
// the gcd machinery that keeps rational functions reduced.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mirrorkit/errors.hpp"

namespace mirrorkit {

using Rational = mpq_class;
using Integer = mpz_class;

/// Formal variables of the coefficient field. Ids are fixed so that the
/// monomial order (and hence every printed value) is reproducible:
/// q = 0, z = 1, lambda_j = 2j, Lambda_j = 2j + 1 (j is 1-based).
namespace var {
inline constexpr int q = 0;
inline constexpr int z = 1;
inline constexpr int lambda(int j) { return 2 * j; }
inline constexpr int Lambda(int j) { return 2 * j + 1; }
// ring generators p_i as formal variables, used only for test functions on critical sets
inline constexpr int p(int i) { return -i; }

inline std::string name(int id) {
  if (id < 0) return "p" + std::to_string(-id);
  if (id == q) return "q";
  if (id == z) return "z";
  if (id % 2 == 0) return "lam" + std::to_string(id / 2);
  return "Lam" + std::to_string(id / 2);
}

/// nullopt when the name is not a variable.
inline std::optional<int> parse(const std::string& s) {
  if (s == "q") return q;
  if (s == "z") return z;
  auto indexed = [&](const std::string& prefix) -> int {
    if (s.size() <= prefix.size() || s.compare(0, prefix.size(), prefix) != 0) return -1;
    int v = 0;
    for (std::size_t i = prefix.size(); i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return -1;
      v = v * 10 + (s[i] - '0');
    }
    return v >= 1 ? v : -1;
  };
  if (int j = indexed("lam"); j > 0) return lambda(j);
  if (int j = indexed("Lam"); j > 0) return Lambda(j);
  if (int i = indexed("p"); i > 0) return p(i);
  return std::nullopt;
}
}  // namespace var

inline std::string rational_to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline Rational parse_rational(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw Error(ErrorKind::ParseError, "bad rational '" + s + "'");
  if (r.get_den() == 0) throw Error(ErrorKind::DivisionByZero, "zero denominator in '" + s + "'");
  r.canonicalize();
  return r;
}

/// Sparse exponent vector: (variable id, exponent > 0), sorted by id.
using Monomial = std::vector<std::pair<int, int>>;

inline int total_degree(const Monomial& m) {
  int d = 0;
  for (auto& [v, e] : m) d += e;
  return d;
}

/// Graded-lex, descending: the first key in a map is the leading monomial.
struct GrlexDescending {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      int va = i < a.size() ? a[i].first : INT32_MAX;
      int vb = j < b.size() ? b[j].first : INT32_MAX;
      int v = std::min(va, vb);
      int ea = va == v ? a[i].second : 0;
      int eb = vb == v ? b[j].second : 0;
      if (ea != eb) return ea > eb;
      if (va == v) ++i;
      if (vb == v) ++j;
    }
    return false;
  }
};

inline Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

/// a / b if b divides a.
inline bool monomial_div(const Monomial& a, const Monomial& b, Monomial& out) {
  out.clear();
  std::size_t i = 0;
  for (auto& [v, e] : b) {
    while (i < a.size() && a[i].first < v) out.push_back(a[i++]);
    if (i == a.size() || a[i].first != v || a[i].second < e) return false;
    if (a[i].second > e) out.emplace_back(v, a[i].second - e);
    ++i;
  }
  while (i < a.size()) out.push_back(a[i++]);
  return true;
}

inline int degree_of(const Monomial& m, int v) {
  for (auto& [w, e] : m)
    if (w == v) return e;
  return 0;
}

class Poly {
 public:
  using Terms = std::map<Monomial, Rational, GrlexDescending>;

  Poly() = default;
  Poly(long c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) terms_[{}] = c;
  }
  Poly(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) terms_[{}] = c;
  }

  static Poly variable(int id, int exponent = 1) {
    Poly p;
    if (exponent == 0) return Poly(1);
    p.terms_[{{id, exponent}}] = 1;
    return p;
  }
  static Poly monomial(const Monomial& m, const Rational& c) {
    Poly p;
    if (c != 0) p.terms_[m] = c;
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }
  Rational constant_value() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
  }
  const Monomial& leading_monomial() const { return terms_.begin()->first; }
  const Rational& leading_coefficient() const { return terms_.begin()->second; }

  int total_deg() const { return terms_.empty() ? -1 : total_degree(terms_.begin()->first); }

  int degree_in(int v) const {
    int d = terms_.empty() ? -1 : 0;
    for (auto& [m, c] : terms_) d = std::max(d, degree_of(m, v));
    return d;
  }

  std::set<int> variables() const {
    std::set<int> vs;
    for (auto& [m, c] : terms_)
      for (auto& [v, e] : m) vs.insert(v);
    return vs;
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }
  Poly& operator+=(const Poly& o) {
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    if (a.is_zero() || b.is_zero()) return r;
    for (auto& [ma, ca] : a.terms_)
      for (auto& [mb, cb] : b.terms_) r.add_term(monomial_mul(ma, mb), ca * cb);
    return r;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  Poly scaled(const Rational& s) const {
    if (s == 0) return Poly();
    Poly r = *this;
    for (auto& [m, c] : r.terms_) c *= s;
    return r;
  }

  Poly pow(unsigned n) const {
    Poly r(1), b = *this;
    while (n) {
      if (n & 1u) r *= b;
      n >>= 1u;
      if (n) b *= b;
    }
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// Exact quotient; throws if `d` does not divide `*this`.
  /// Quotient when d divides *this exactly, else nullopt.
  std::optional<Poly> try_div(const Poly& d) const {
    if (d.is_zero()) throw Error(ErrorKind::DivisionByZero, "polynomial division by zero");
    if (d.is_constant()) return scaled(1 / d.constant_value());
    Poly rem = *this, quo;
    const Monomial& lm = d.leading_monomial();
    const Rational& lc = d.leading_coefficient();
    Monomial qm;
    while (!rem.is_zero()) {
      if (!monomial_div(rem.leading_monomial(), lm, qm)) return std::nullopt;
      Rational qc = rem.leading_coefficient() / lc;
      quo.add_term(qm, qc);
      rem -= monomial(qm, qc) * d;
    }
    return quo;
  }

  Poly exact_div(const Poly& d) const {
    if (d.is_zero()) throw Error(ErrorKind::DivisionByZero, "polynomial division by zero");
    if (d.is_constant()) return scaled(1 / d.constant_value());
    Poly rem = *this, quo;
    const Monomial& lm = d.leading_monomial();
    const Rational& lc = d.leading_coefficient();
    Monomial qm;
    while (!rem.is_zero()) {
      if (!monomial_div(rem.leading_monomial(), lm, qm))
        throw Error(ErrorKind::InvalidArgument, "inexact polynomial division");
      Rational qc = rem.leading_coefficient() / lc;
      Poly t = monomial(qm, qc);
      quo.add_term(qm, qc);
      rem -= t * d;
    }
    return quo;
  }

  /// View as a polynomial in `v` with coefficients in the other variables.
  std::map<int, Poly> coefficients_in(int v) const {
    std::map<int, Poly> out;
    for (auto& [m, c] : terms_) {
      Monomial rest;
      int e = 0;
      for (auto& [w, k] : m) {
        if (w == v) e = k;
        else rest.emplace_back(w, k);
      }
      out[e].add_term(rest, c);
    }
    return out;
  }

  Rational content_q() const {
    // gcd of numerators over lcm of denominators, sign of leading coefficient
    if (is_zero()) return 0;
    Integer g = 0, l = 1;
    for (auto& [m, c] : terms_) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
    }
    Rational r(g, l);
    r.canonicalize();
    if (leading_coefficient() < 0) r = -r;
    return r;
  }

  /// Integer-coefficient primitive associate with positive leading coefficient.
  Poly primitive_integer() const {
    if (is_zero()) return *this;
    return scaled(1 / content_q());
  }

  template <class Num>
  Num evaluate(const std::map<int, Num>& values) const {
    Num acc{};
    for (auto& [m, c] : terms_) {
      Num t = Num(c.get_d());
      for (auto& [v, e] : m) {
        auto it = values.find(v);
        if (it == values.end()) throw Error(ErrorKind::InvalidArgument, "unbound variable " + var::name(v));
        for (int k = 0; k < e; ++k) t *= it->second;
      }
      acc += t;
    }
    return acc;
  }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, c] : terms_) {
      Rational a = abs(c);
      bool neg = c < 0;
      if (first) {
        if (neg) os << "-";
      } else {
        os << (neg ? " - " : " + ");
      }
      first = false;
      bool unit = a == 1;
      if (!unit || m.empty()) {
        os << rational_to_string(a);
        if (!m.empty()) os << "*";
      }
      bool firstv = true;
      for (auto& [v, e] : m) {
        if (!firstv) os << "*";
        firstv = false;
        os << var::name(v);
        if (e != 1) os << "^" << e;
      }
    }
    return os.str();
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

 private:
  Terms terms_;
};

namespace detail {

inline Poly from_coefficients(const std::map<int, Poly>& cs, int v) {
  Poly out;
  for (auto& [e, c] : cs) out += c * Poly::variable(v, e);
  return out;
}

inline int smallest_variable(const Poly& a, const Poly& b) {
  int best = INT32_MAX;
  for (const Poly* p : {&a, &b})
    for (auto& [m, c] : p->terms())
      if (!m.empty()) best = std::min(best, m.front().first);
  return best;
}

inline Poly gcd_integer(const Poly& a, const Poly& b);

inline Poly content_in(const Poly& a, int v) {
  Poly g;
  for (auto& [e, c] : a.coefficients_in(v)) {
    g = gcd_integer(g, c);
    if (g.is_constant()) break;
  }
  return g;
}

/// Pseudo-remainder of a by b as polynomials in v.
inline Poly pseudo_remainder(Poly a, const Poly& b, int v) {
  auto bc = b.coefficients_in(v);
  int db = bc.rbegin()->first;
  Poly lcb = bc.rbegin()->second;
  int da = a.degree_in(v);
  int delta = da - db + 1;
  while (!a.is_zero() && a.degree_in(v) >= db) {
    auto ac = a.coefficients_in(v);
    int d = ac.rbegin()->first;
    Poly t = ac.rbegin()->second * Poly::variable(v, d - db);
    a = lcb * a - t * b;
    --delta;
  }
  if (delta > 0) a *= lcb.pow(static_cast<unsigned>(delta));
  return a;
}

inline Integer height(const Poly& p) {
  Integer h = 0;
  for (auto& [m, c] : p.terms())
    if (abs(c.get_num()) > h) h = abs(c.get_num());
  return h;
}

inline Integer integer_content(const Poly& p) {
  Integer g = 0;
  for (auto& [m, c] : p.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
  return g;
}

/// p with variable v replaced by the integer x.
inline Poly substitute(const Poly& p, int v, const Integer& x) {
  Poly out;
  for (auto& [m, c] : p.terms()) {
    Monomial rest;
    Integer f = 1;
    for (auto& [w, e] : m) {
      if (w == v) mpz_pow_ui(f.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(e));
      else rest.emplace_back(w, e);
    }
    out.add_term(rest, c * Rational(f));
  }
  return out;
}

/// Inverse of substitute: digits of the balanced base-x expansion become coefficients of v.
inline Poly x_adic(Poly g, int v, const Integer& x, int max_degree) {
  Poly out;
  const Integer half = x / 2;
  for (int i = 0; !g.is_zero(); ++i) {
    if (i > max_degree) return Poly();
    Poly digit;
    for (auto& [m, c] : g.terms()) {
      Integer r;
      mpz_fdiv_r(r.get_mpz_t(), c.get_num().get_mpz_t(), x.get_mpz_t());
      if (r > half) r -= x;
      if (r != 0) digit.add_term(m, Rational(r));
    }
    g -= digit;
    g = g.scaled(Rational(1) / Rational(x));
    for (auto& [m, c] : digit.terms()) out.add_term(i == 0 ? m : monomial_mul(m, {{v, i}}), c);
  }
  return out;
}

/// Heuristic gcd over Z[vars]: evaluate at a large integer, recurse, rebuild
/// x-adically and confirm by trial division. Keeps the integer content;
/// nullopt when it gives up.
inline std::optional<Poly> gcd_heuristic(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return std::nullopt;
  Integer ca = integer_content(a), cb = integer_content(b), g;
  mpz_gcd(g.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
  if (a.is_constant() || b.is_constant()) return Poly(Rational(g));
  Poly A = a.scaled(Rational(1) / Rational(ca)), B = b.scaled(Rational(1) / Rational(cb));
  int v = smallest_variable(A, B);
  const int da = A.degree_in(v), db = B.degree_in(v);
  Integer x = 2 * std::min(height(A), height(B)) + 29;
  for (int attempt = 0; attempt < 6; ++attempt) {
    if (mpz_sizeinbase(x.get_mpz_t(), 2) * static_cast<std::size_t>(std::max(da, db) + 1) > 200000) break;
    auto gam = gcd_heuristic(substitute(A, v, x), substitute(B, v, x));
    if (gam) {
      Poly G = x_adic(*gam, v, x, std::min(da, db));
      if (!G.is_zero()) {
        G = G.scaled(Rational(1) / Rational(integer_content(G)));
        if (G.leading_coefficient() < 0) G = -G;
        if (A.try_div(G) && B.try_div(G)) return G.scaled(Rational(g));
      }
    }
    x = x * 73794 / 27011;
  }
  return std::nullopt;
}

inline Poly gcd_prs(const Poly& a, const Poly& b);

/// gcd over Z[vars] of integer-coefficient inputs: the heuristic, then PRS.
inline Poly gcd_integer(const Poly& a, const Poly& b) {
  if (!a.is_constant() && !b.is_constant())
    if (auto h = gcd_heuristic(a, b)) return h->primitive_integer();
  return gcd_prs(a, b);
}

/// Recursive primitive PRS.
inline Poly gcd_prs(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.primitive_integer();
  if (b.is_zero()) return a.primitive_integer();
  if (a.is_constant() || b.is_constant()) {
    if (a.is_constant() && b.is_constant()) {
      Rational ca = a.content_q(), cb = b.content_q();
      Integer g;
      mpz_gcd(g.get_mpz_t(), ca.get_num().get_mpz_t(), cb.get_num().get_mpz_t());
      return Poly(Rational(g));
    }
    const Poly& nc = a.is_constant() ? b : a;
    const Poly& c = a.is_constant() ? a : b;
    Integer g = abs(c.content_q().get_num());
    for (auto& [m, k] : nc.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), k.get_num().get_mpz_t());
    return Poly(Rational(g));
  }
  int v = smallest_variable(a, b);
  int dega = a.degree_in(v), degb = b.degree_in(v);
  if (dega == 0) return gcd_integer(a, content_in(b, v));
  if (degb == 0) return gcd_integer(content_in(a, v), b);
  Poly ca = content_in(a, v), cb = content_in(b, v);
  Poly pa = a.exact_div(ca), pb = b.exact_div(cb);
  Poly c = gcd_integer(ca, cb);
  if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
  Poly g;
  while (true) {
    Poly r = pseudo_remainder(pa, pb, v);
    if (r.is_zero()) {
      g = pb;
      break;
    }
    if (r.degree_in(v) == 0) {
      g = Poly(1);
      break;
    }
    pa = std::move(pb);
    pb = r.exact_div(content_in(r, v)).primitive_integer();
  }
  if (!g.is_constant()) g = g.exact_div(content_in(g, v));
  return (c * g).primitive_integer();
}

}  // namespace detail

/// gcd over Q[vars], normalized to a primitive integer polynomial with
/// positive leading coefficient.
inline Poly gcd(const Poly& a, const Poly& b) {
  return detail::gcd_integer(a.primitive_integer(), b.primitive_integer());
}

}  // namespace mirrorkit
