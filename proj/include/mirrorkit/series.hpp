#pragma once

// Truncated hypergeometric (I^H_X) and q-hypergeometric (I^K_X, I_E, I_{Pi E*})
// series with exact ring-valued coefficients.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mirrorkit/parallel.hpp"
#include "mirrorkit/ring.hpp"

namespace mirrorkit {

enum class SeriesKind { H, K, E, PiE };

inline std::string to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::H: return "H";
    case SeriesKind::K: return "K";
    case SeriesKind::E: return "E";
    case SeriesKind::PiE: return "PiE";
  }
  return "?";
}

using Degree = std::vector<int>;

/// Coefficients Q^d -> ring element on the box |d|_inf <= dmax. Degrees in
/// the box without a stored coefficient are zero (bundle series only store
/// d with D_j(d) >= 0 for all j).
class TruncatedSeries {
 public:
  TruncatedSeries(SeriesKind kind, ToricRing ring, int K, int dmax)
      : kind_(kind), ring_(std::move(ring)), K_(K), dmax_(dmax) {}

  SeriesKind kind() const { return kind_; }
  const ToricRing& toric_ring() const { return ring_; }
  const RingPtr& ring() const { return ring_.ring; }
  int K() const { return K_; }
  int dmax() const { return dmax_; }
  const std::map<Degree, RingElement>& coefficients() const { return coeffs_; }

  bool in_box(const Degree& d) const {
    for (int x : d)
      if (x > dmax_ || x < -dmax_) return false;
    return true;
  }

  RingElement at(const Degree& d) const {
    if (!in_box(d)) throw Error(ErrorKind::InvalidArgument, "degree outside truncation box");
    auto it = coeffs_.find(d);
    return it == coeffs_.end() ? RingElement::zero(ring_.ring) : it->second;
  }

  void set(const Degree& d, RingElement c) { coeffs_.insert_or_assign(d, std::move(c)); }

 private:
  SeriesKind kind_;
  ToricRing ring_;
  int K_;
  int dmax_;
  std::map<Degree, RingElement> coeffs_;
};

/// Every d with |d|_inf <= r, lexicographic.
inline std::vector<Degree> box_degrees(int K, int r) {
  std::vector<Degree> out;
  if (r < 0) return out;
  Degree d(K, -r);
  while (true) {
    out.push_back(d);
    int i = K - 1;
    while (i >= 0 && d[i] == r) d[i--] = -r;
    if (i < 0) break;
    ++d[i];
  }
  return out;
}

/// prod_{r=start}^{upper} f(r) read as prod_{-inf}^{upper} / prod_{-inf}^{start-1}:
/// when upper < start - 1 this is the inverse of prod_{r=upper+1}^{start-1} f(r).
inline RingElement telescoped_product(const RingPtr& ring, std::int64_t start, std::int64_t upper,
                                      const std::function<RingElement(std::int64_t)>& f) {
  RingElement acc = RingElement::one(ring);
  if (upper >= start - 1) {
    for (std::int64_t r = start; r <= upper; ++r) {
      acc *= f(r);
      if (acc.is_zero()) break;
    }
    return acc;
  }
  for (std::int64_t r = upper + 1; r <= start - 1; ++r) acc *= f(r);
  return acc.inverse();
}

namespace detail {

inline RatFunc q_power(std::int64_t k) { return RatFunc::q().pow(static_cast<int>(k)); }

/// prod_{r=-inf}^0 F(r) / prod_{r=-inf}^D F(r): the inverse of prod_{r=1}^D F(r)
/// for D >= 0, and the plain product prod_{r=D+1}^0 F(r) for D < 0 (its r = 0
/// factor is a multiplier, which is how nilpotence kills negative degrees).
inline RingElement pochhammer_ratio(const RingPtr& ring, std::int64_t D,
                                    const std::function<RingElement(std::int64_t)>& F) {
  if (D >= 0) return telescoped_product(ring, 1, D, F).inverse();
  RingElement acc = RingElement::one(ring);
  for (std::int64_t r = D + 1; r <= 0; ++r) {
    acc *= F(r);
    if (acc.is_zero()) break;
  }
  return acc;
}

inline std::function<RingElement(std::int64_t)> divisor_pochhammer(const ToricRing& tr, int j) {
  const RingPtr& ring = tr.ring;
  if (ring->mode() == RingMode::cohomology)
    return [&tr, j](std::int64_t r) {
      return tr.divisors[j] - RingElement::scalar(tr.ring, RatFunc::z() * RatFunc(static_cast<long>(r)));
    };
  return [&tr, j](std::int64_t r) {
    return RingElement::one(tr.ring) - tr.divisors[j] * (tr.equivariant_parameters[j] * q_power(r));
  };
}

/// Bundle factor of I_E: prod_{r=0}^{Delta-1} (1 - q^{-r} V_a).
inline RingElement bundle_factor_E(const ToricRing& tr, int a, std::int64_t Delta) {
  return telescoped_product(tr.ring, 0, Delta - 1, [&](std::int64_t r) {
    return RingElement::one(tr.ring) - tr.bundles[a] * q_power(-r);
  });
}

/// Bundle factor of I_{Pi E*}: prod_{r=1}^{Delta} (1 - q^r V_a).
inline RingElement bundle_factor_PiE(const ToricRing& tr, int a, std::int64_t Delta) {
  return telescoped_product(tr.ring, 1, Delta, [&](std::int64_t r) {
    return RingElement::one(tr.ring) - tr.bundles[a] * q_power(r);
  });
}

inline TruncatedSeries generate(const ToricModel& model, const ToricRing& tr, SeriesKind kind, int dmax) {
  if (dmax < 0) throw Error(ErrorKind::InvalidArgument, "dmax must be non-negative");
  const bool bundle = kind == SeriesKind::E || kind == SeriesKind::PiE;
  if (kind == SeriesKind::H && tr.ring->mode() != RingMode::cohomology)
    throw Error(ErrorKind::RingMismatch, "series_H needs a cohomology ring");
  if (kind != SeriesKind::H && tr.ring->mode() != RingMode::k_theory)
    throw Error(ErrorKind::RingMismatch, "q-hypergeometric series need a K-theory ring");
  if (bundle && (!model.has_bundle() || tr.bundles.empty()))
    throw Error(ErrorKind::MissingBundleData, "model '" + model.name() + "' has no bundle weights");
  if (static_cast<int>(tr.divisors.size()) != model.N())
    throw Error(ErrorKind::RingMismatch, "ring divisor classes do not match the model");

  std::vector<Degree> degrees;
  for (auto& d : box_degrees(model.K(), dmax)) {
    bool keep = true;
    if (bundle)
      for (int j = 0; j < model.N() && keep; ++j) keep = model.mori_degree(d, j) >= 0;
    if (keep) degrees.push_back(d);
  }

  // memoize per (j, D_j) and (a, Delta_a)
  std::vector<std::pair<int, std::int64_t>> div_keys, bun_keys;
  {
    std::set<std::pair<int, std::int64_t>> dk, bk;
    for (auto& d : degrees) {
      for (int j = 0; j < model.N(); ++j) dk.emplace(j, model.mori_degree(d, j));
      if (bundle)
        for (int a = 0; a < model.L(); ++a) bk.emplace(a, model.bundle_degree(d, a));
    }
    div_keys.assign(dk.begin(), dk.end());
    bun_keys.assign(bk.begin(), bk.end());
  }
  std::vector<RingElement> div_vals(div_keys.size()), bun_vals(bun_keys.size());
  parallel_for(div_keys.size(), [&](std::size_t k) {
    auto [j, D] = div_keys[k];
    div_vals[k] = pochhammer_ratio(tr.ring, D, divisor_pochhammer(tr, j));
  });
  parallel_for(bun_keys.size(), [&](std::size_t k) {
    auto [a, D] = bun_keys[k];
    bun_vals[k] = kind == SeriesKind::E ? bundle_factor_E(tr, a, D) : bundle_factor_PiE(tr, a, D);
  });
  std::map<std::pair<int, std::int64_t>, std::size_t> div_index, bun_index;
  for (std::size_t k = 0; k < div_keys.size(); ++k) div_index[div_keys[k]] = k;
  for (std::size_t k = 0; k < bun_keys.size(); ++k) bun_index[bun_keys[k]] = k;

  std::vector<RingElement> values(degrees.size());
  parallel_for(degrees.size(), [&](std::size_t k) {
    const Degree& d = degrees[k];
    RingElement c = RingElement::one(tr.ring);
    for (int j = 0; j < model.N() && !c.is_zero(); ++j) c *= div_vals[div_index.at({j, model.mori_degree(d, j)})];
    if (bundle)
      for (int a = 0; a < model.L() && !c.is_zero(); ++a) c *= bun_vals[bun_index.at({a, model.bundle_degree(d, a)})];
    values[k] = std::move(c);
  });

  TruncatedSeries s(kind, tr, model.K(), dmax);
  for (std::size_t k = 0; k < degrees.size(); ++k) s.set(degrees[k], std::move(values[k]));
  return s;
}

}  // namespace detail

/// I^H_X: coefficient prod_j prod_{r=-inf}^0 (u_j - rz) / prod_{r=-inf}^{D_j(d)} (u_j - rz).
inline TruncatedSeries series_H(const ToricModel& model, const ToricRing& ring, int dmax) {
  return detail::generate(model, ring, SeriesKind::H, dmax);
}

/// I^K_X: coefficient prod_j prod_{r=-inf}^0 (1 - U_j Lam_j^{-1} q^r) / prod_{r=-inf}^{D_j(d)} (...).
inline TruncatedSeries series_K(const ToricModel& model, const ToricRing& ring, int dmax) {
  return detail::generate(model, ring, SeriesKind::K, dmax);
}

inline TruncatedSeries series_E(const ToricModel& model, const ToricRing& ring, int dmax) {
  return detail::generate(model, ring, SeriesKind::E, dmax);
}

inline TruncatedSeries series_PiE(const ToricModel& model, const ToricRing& ring, int dmax) {
  return detail::generate(model, ring, SeriesKind::PiE, dmax);
}

}  // namespace mirrorkit
