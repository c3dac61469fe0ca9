#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mirrorkit/polynomial.hpp"

namespace mirrorkit {

/// Element of Q(q, z, lam_j, Lam_j): a reduced fraction whose denominator is
/// monic in graded-lex order. Two equal values therefore have identical
/// representations, which keeps printed output byte-stable.
class RatFunc {
 public:
  RatFunc() : den_(1) {}
  RatFunc(long c) : num_(c), den_(1) {}                 // NOLINT(google-explicit-constructor)
  RatFunc(const Rational& c) : num_(c), den_(1) {}      // NOLINT(google-explicit-constructor)
  RatFunc(Poly p) : num_(std::move(p)), den_(1) {}      // NOLINT(google-explicit-constructor)
  RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw Error(ErrorKind::DivisionByZero, "rational function with zero denominator");
    normalize();
  }

  static RatFunc variable(int id) { return RatFunc(Poly::variable(id)); }
  static RatFunc q() { return variable(var::q); }
  static RatFunc z() { return variable(var::z); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return den_.is_constant() && num_.is_constant() && num_.constant_value() == 1; }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
    if (b.den_.is_constant()) return RatFunc(a.num_ + b.num_ * a.den_, a.den_);
    if (a.den_.is_constant()) return RatFunc(a.num_ * b.den_ + b.num_, b.den_);
    Poly g = gcd(a.den_, b.den_);
    Poly bg = b.den_.exact_div(g), ag = a.den_.exact_div(g);
    return RatFunc(a.num_ * bg + b.num_ * ag, a.den_ * bg);
  }
  friend RatFunc operator-(const RatFunc& a) {
    RatFunc r = a;
    r.num_ = -r.num_;
    return r;
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }

  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero() || b.is_zero()) return RatFunc();
    if (a.is_constant()) return b.scaled(a.constant_value());
    if (b.is_constant()) return a.scaled(b.constant_value());
    Poly g1 = gcd(a.num_, b.den_), g2 = gcd(b.num_, a.den_);
    RatFunc r;
    r.num_ = a.num_.exact_div(g1) * b.num_.exact_div(g2);
    r.den_ = a.den_.exact_div(g2) * b.den_.exact_div(g1);
    r.make_monic();
    return r;
  }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) { return a * b.inverse(); }

  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
  RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

  RatFunc inverse() const {
    if (is_zero()) throw Error(ErrorKind::DivisionByZero, "inverse of zero");
    RatFunc r;
    r.num_ = den_;
    r.den_ = num_;
    r.make_monic();
    return r;
  }

  RatFunc scaled(const Rational& s) const {
    if (s == 0) return RatFunc();
    RatFunc r = *this;
    r.num_ = r.num_.scaled(s);
    return r;
  }

  RatFunc pow(int n) const {
    if (n < 0) return inverse().pow(-n);
    RatFunc r;
    r.num_ = num_.pow(static_cast<unsigned>(n));
    r.den_ = den_.pow(static_cast<unsigned>(n));
    return r;
  }

  friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

  std::complex<double> evaluate(const std::map<int, std::complex<double>>& values) const {
    return num_.evaluate(values) / den_.evaluate(values);
  }

  std::string to_string() const {
    if (den_.is_constant()) return num_.to_string();
    auto wrap = [](const Poly& p) {
      std::string s = p.to_string();
      return p.terms().size() == 1 && p.leading_coefficient() > 0 ? s : "(" + s + ")";
    };
    return wrap(num_) + "/" + wrap(den_);
  }

 private:
  void normalize() {
    if (num_.is_zero()) {
      den_ = Poly(1);
      return;
    }
    if (!den_.is_constant()) {
      Poly g = gcd(num_, den_);
      if (!g.is_constant()) {
        num_ = num_.exact_div(g);
        den_ = den_.exact_div(g);
      }
    }
    make_monic();
  }

  void make_monic() {
    if (num_.is_zero()) {
      den_ = Poly(1);
      return;
    }
    Rational lc = den_.leading_coefficient();
    if (lc != 1) {
      num_ = num_.scaled(1 / lc);
      den_ = den_.scaled(1 / lc);
    }
  }

  Poly num_;
  Poly den_;
};

/// Numerators over the lcm of the denominators.
inline std::pair<std::vector<Poly>, Poly> over_common_denominator(const std::vector<RatFunc>& v) {
  Poly D(1);
  for (auto& x : v) {
    if (x.den().is_constant() || x.den() == D || D.try_div(x.den())) continue;
    Poly g = gcd(D, x.den());
    D = D * x.den().exact_div(g);
  }
  std::vector<Poly> nums;
  nums.reserve(v.size());
  for (auto& x : v) nums.push_back(x.den() == D ? x.num() : x.num() * D.exact_div(x.den()));
  return {std::move(nums), std::move(D)};
}

}  // namespace mirrorkit
