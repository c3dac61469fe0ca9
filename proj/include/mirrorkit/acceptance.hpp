#pragma once

// The acceptance suite: twelve pass/fail criteria with pinned tolerances.

#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mirrorkit/io.hpp"

namespace mirrorkit {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  Json detail;
};

namespace acceptance {

inline const std::vector<std::string>& projective_models() {
  static const std::vector<std::string> names{"pt", "P1", "P2", "P1xP1"};
  return names;
}

inline CriterionResult annihilation(int id, RingMode mode, int dmax) {
  const bool coh = mode == RingMode::cohomology;
  CriterionResult r{id, coh ? "exact annihilation, cohomology" : "exact annihilation, K-theory", true, "", Json::object()};
  std::size_t total = 0;
  for (auto& name : projective_models()) {
    auto m = catalog_model(name);
    auto ring = catalog_ring(m, mode, false);
    auto rep = coh ? verify(build_system_H(m, Representation::vector, &ring), series_H(m, ring, dmax))
                   : verify(build_system_K(m, Representation::vector, &ring), series_K(m, ring, dmax));
    r.detail[name] = Json{{"checked", rep.checked()}, {"failures", rep.failures()}};
    r.pass = r.pass && rep.pass() && rep.checked() > 0;
    total += rep.checked();
  }
  r.summary = std::to_string(total) + " degree checks, Dmax=" + std::to_string(dmax);
  return r;
}

inline CriterionResult bundles() {
  CriterionResult r{3, "bundle systems E and Pi E*", true, "", Json::object()};
  auto m = catalog_model("P1_O(-1)+O(-1)");
  auto ring = catalog_ring(m, RingMode::k_theory, false);
  auto e = verify(build_system_E(m, ring), series_E(m, ring, 5));
  auto pi = verify(build_system_PiE(m, ring), series_PiE(m, ring, 5));
  auto pi_displayed = verify(build_system_PiE(m, ring, BundleReading::as_displayed), series_PiE(m, ring, 5));
  r.detail["E"] = Json{{"checked", e.checked()}, {"failures", e.failures()}};
  r.detail["PiE"] = Json{{"checked", pi.checked()}, {"failures", pi.failures()}};
  r.detail["PiE_as_displayed_failures"] = pi_displayed.failures();
  r.pass = e.pass() && pi.pass() && e.checked() > 0 && pi.checked() > 0;
  r.summary = std::to_string(e.checked() + pi.checked()) + " degree checks, Dmax=5";
  return r;
}

/// (1 - q^{-r} q^{X dX}) X^r I = X^{r+1} I for the one-variable point series.
inline CriterionResult proof_identity() {
  CriterionResult r{4, "proof identity on the point series", true, "", Json::array()};
  const int order = 8;
  auto m = catalog_model("pt");
  auto ring = catalog_ring(m, RingMode::k_theory, false);
  for (int k = 0; k <= 4; ++k) {
    auto s = series_K(m, ring, order + k + 1);
    ShiftOperator lhs = ShiftOperator::identity(1);
    lhs.add(ShiftOperator::translation({1}, -RatFunc::q().pow(-k)).terms()[0]);
    auto left = lhs.compose(ShiftOperator::novikov_monomial({k})).apply(s);
    auto right = ShiftOperator::novikov_monomial({k + 1}).apply(s);
    bool ok = true;
    for (int d = 0; d <= order; ++d) ok = ok && left.at({d}) == right.at({d});
    r.detail.push_back(Json{{"r", k}, {"pass", ok}});
    r.pass = r.pass && ok;
  }
  r.summary = "r = 0..4, degrees 0..8";
  return r;
}

inline CriterionResult batyrev() {
  CriterionResult r{5, "Batyrev critical points in closed form", true, "", Json::object()};
  auto p2 = critical_points_H(catalog_model("P2"), {1});
  const cplx w = std::polar(1.0, 2 * kPi / 3);
  double cube = 0, val = 0;
  std::vector<bool> hit(3, false);
  for (auto& pt : p2.points) {
    cube = std::max(cube, std::abs(std::pow(pt.p[0], 3) - 1.0));
    double best = INFINITY;
    std::size_t which = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      double dist = std::abs(*pt.value - 3.0 * std::pow(w, static_cast<double>(k)));
      if (dist < best) best = dist, which = k;
    }
    val = std::max(val, best);
    hit[which] = true;
  }
  bool p2ok = p2.points.size() == 3 && cube < 1e-10 && val < 1e-9 && hit[0] && hit[1] && hit[2];
  auto p1 = critical_points_H(catalog_model("P1"), {4});
  double perr = 0, herr = 0;
  std::vector<bool> sign(2, false);
  for (auto& pt : p1.points) {
    int s = pt.p[0].real() > 0 ? 0 : 1;
    double target = s == 0 ? 2 : -2;
    sign[s] = true;
    perr = std::max(perr, std::abs(pt.p[0] - target));
    herr = std::max(herr, std::abs(*pt.hessian - 2 * target));
  }
  bool p1ok = p1.points.size() == 2 && sign[0] && sign[1] && perr < 1e-10 && herr < 1e-10;
  r.detail["P2"] = Json{{"count", p2.points.size()}, {"max_cube_residual", cube}, {"max_value_error", val}};
  r.detail["P1"] = Json{{"count", p1.points.size()}, {"max_p_error", perr}, {"max_hessian_error", herr}};
  r.pass = p2ok && p1ok;
  r.summary = "P2: " + std::to_string(p2.points.size()) + " points; P1: " + std::to_string(p1.points.size()) + " points";
  return r;
}

inline CriterionResult hessians() {
  CriterionResult r{6, "Hessian formula against finite differences", true, "", Json::object()};
  std::mt19937_64 gen(20240601);
  double worst = 0;
  int compared = 0;
  for (auto& name : catalog_names()) {
    auto m = catalog_model(name);
    double model_worst = 0;
    for (int k = 0; k < 20; ++k) {
      std::vector<cplx> Q;
      for (int i = 0; i < m.K(); ++i) {
        double rho = std::exp(2.0 * (detail::unit_uniform(gen) - 0.5));
        double theta = kPi * (detail::unit_uniform(gen) - 0.5);
        Q.push_back(std::polar(rho, theta));
      }
      auto sample = critical_points_H(m, Q);
      for (auto& pt : sample.points) {
        cplx f = hessian_formula(m, pt.p), d = hessian_direct(m, pt);
        model_worst = std::max(model_worst, std::abs(f - d) / std::abs(f));
        ++compared;
      }
    }
    r.detail[name] = model_worst;
    worst = std::max(worst, model_worst);
  }
  r.pass = worst < 1e-8 && compared > 0;
  r.summary = std::to_string(compared) + " points, worst relative difference " + format_double(worst);
  return r;
}

inline CriterionResult adams() {
  CriterionResult r{7, "Adams self-similarity", true, "", Json::object()};
  double worst = 0;
  std::size_t images = 0;
  for (std::string name : {"P1", "P2"}) {
    auto m = catalog_model(name);
    for (int order : {2, 3})
      for (cplx Q : {cplx(0.25), cplx(0.3, 0.2)}) {
        auto sample = critical_points_K(m, {Q}, order);
        auto rep = adams_check(m, sample);
        for (auto& e : rep.entries) worst = std::max(worst, e.residual);
        images += rep.entries.size();
        r.pass = r.pass && rep.pass() && !rep.entries.empty() && sample.no_consistent_branch == 0;
        r.detail[name + " m=" + std::to_string(order) + " Q=" + format_complex(Q)] =
            Json{{"points", sample.points.size()}, {"P_solutions", rep.entries.size()}, {"pass", rep.pass()}};
      }
  }
  auto p1 = catalog_model("P1");
  double on_l2 = lm_residual(p1, {3}, {8}, 2);
  auto img = adams_image(p1, {3}, {8}, 2, 1e-9);
  bool instance = on_l2 < 1e-12 && img.pass && img.Pm[0] == cplx(9) && img.Qm[0] == cplx(64);
  r.detail["instance (3,8)"] = Json{{"L2_residual", on_l2}, {"image", Json{format_complex(img.Pm[0]), format_complex(img.Qm[0])}},
                                    {"L1_residual", img.residual}};
  r.pass = r.pass && instance;
  r.summary = std::to_string(images) + " images, worst L1 residual " + format_double(worst);
  return r;
}

inline CriterionResult localization() {
  CriterionResult r{8, "localization limit of the residue pairing", true, "", Json::object()};
  auto m = catalog_model("P1");
  const std::vector<cplx> lambda{0.3, cplx(0, -0.7)};
  auto rep = localization_check(m, lambda, {1}, 1e-8);
  double e11 = INFINITY, ep1 = INFINITY;
  for (auto& p : rep.pairings) {
    if (p.phi == "1" && p.psi == "1") e11 = std::abs(p.residue);
    if (p.phi == "p1" && p.psi == "1") ep1 = std::abs(p.residue - 1.0);
  }
  const cplx diff = lambda[0] - lambda[1];
  double herr = 0;
  std::vector<bool> seen(2, false);
  for (auto& b : rep.branches) {
    if (b.escaped || !b.vertex) {
      herr = INFINITY;
      continue;
    }
    double e = std::min(std::abs(b.hessian_end - diff), std::abs(b.hessian_end + diff));
    seen[std::abs(b.hessian_end - diff) < std::abs(b.hessian_end + diff) ? 0 : 1] = true;
    herr = std::max(herr, e);
  }
  r.pass = rep.pass() && rep.branches.size() == 2 && seen[0] && seen[1] && e11 < 1e-6 && ep1 < 1e-6 && herr < 1e-6;
  r.detail = Json{{"branches", rep.branches.size()}, {"pairing_11_error", e11}, {"pairing_p1_error", ep1}, {"hessian_error", herr}};
  r.summary = "(1,1) error " + format_double(e11) + ", (p,1) error " + format_double(ep1) + ", Hessian error " + format_double(herr);
  return r;
}

inline CriterionResult q_difference_residual() {
  CriterionResult r{9, "numeric q-difference residual", true, "", Json::object()};
  IntegralSpec spec;
  spec.kind = IntegralKind::k_theoretic;
  spec.Q = {0.1};
  spec.q = 0.5;
  spec.radius = 0.5;
  auto res = check_equation_numeric(catalog_model("P1"), spec);
  r.pass = res.residual < 1e-8;
  r.detail = Json{{"value", format_complex(res.value)}, {"residual", res.residual}};
  r.summary = "relative residual " + format_double(res.residual);
  return r;
}

inline CriterionResult stationary_phase() {
  CriterionResult r{10, "stationary phase leading term", true, "", Json::array()};
  const std::vector<double> zs{0.2, 0.1, 0.05}, bounds{0.05, 0.025, 0.013};
  auto table = stationary_phase_compare(catalog_model("P1"), {1}, zs);
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const auto& row = table.rows[k];
    bool ok = row.deviation < bounds[k];
    double halving = k ? row.deviation / table.rows[k - 1].deviation : 0;
    if (k) ok = ok && halving > 0.4 && halving < 0.6;
    r.detail.push_back(Json{{"z", row.z}, {"deviation", row.deviation}, {"bound", bounds[k]}, {"halving_ratio", halving}});
    r.pass = r.pass && ok;
  }
  r.summary = "deviations " + format_double(table.rows[0].deviation) + ", " + format_double(table.rows[1].deviation) +
              ", " + format_double(table.rows[2].deviation);
  return r;
}

inline CriterionResult mori_filter() {
  CriterionResult r{11, "Mori-limit filter counts", true, "", Json::object()};
  std::string counts;
  for (auto& name : projective_models()) {
    auto m = catalog_model(name);
    auto part = mori_limit_filter(m, critical_points_H(m, std::vector<cplx>(m.K(), 1.0)));
    r.pass = r.pass && part.matches_expected();
    r.detail[name] = Json{{"bounded", part.bounded}, {"escaping", part.escaping}, {"expected", *part.expected}};
    counts += (counts.empty() ? "" : ", ") + name + " " + std::to_string(part.bounded);
  }
  r.summary = "bounded: " + counts;
  return r;
}

inline std::vector<std::function<CriterionResult()>> deterministic_criteria() {
  return {
      [] { return annihilation(1, RingMode::cohomology, 6); },
      [] { return annihilation(2, RingMode::k_theory, 5); },
      bundles,
      proof_identity,
      batyrev,
      hessians,
      adams,
      localization,
      q_difference_residual,
      stationary_phase,
      mori_filter,
  };
}

/// Runs a criterion; a library error fails it with the error recorded.
inline CriterionResult guarded(int id, const std::function<CriterionResult()>& f) {
  try {
    return f();
  } catch (const Error& e) {
    return CriterionResult{id, "criterion " + std::to_string(id), false, e.what(), error_entry(e)};
  }
}

inline Json criteria_json(const std::vector<CriterionResult>& rs) {
  Json a = Json::array();
  for (auto& c : rs)
    a.push_back(Json{{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"summary", c.summary}, {"detail", c.detail}});
  return a;
}

class ScopedEnv {
 public:
  ScopedEnv(const char* key, const char* value) : key_(key) {
    if (const char* old = std::getenv(key)) old_ = old;
    ::setenv(key, value, 1);
  }
  ~ScopedEnv() {
    if (old_) ::setenv(key_, old_->c_str(), 1);
    else ::unsetenv(key_);
  }

 private:
  const char* key_;
  std::optional<std::string> old_;
};

}  // namespace acceptance

/// Criteria 1-11 followed by the determinism criterion, which reruns 1-11 on
/// a single worker and compares the serialized results byte for byte.
inline std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& progress = {}) {
  std::vector<CriterionResult> out;
  auto fs = acceptance::deterministic_criteria();
  for (std::size_t k = 0; k < fs.size(); ++k) {
    out.push_back(acceptance::guarded(static_cast<int>(k + 1), fs[k]));
    if (progress) progress(out.back());
  }
  std::string first = acceptance::criteria_json(out).dump();
  std::vector<CriterionResult> again;
  {
    acceptance::ScopedEnv single("MIRRORKIT_THREADS", "1");
    for (std::size_t k = 0; k < fs.size(); ++k) again.push_back(acceptance::guarded(static_cast<int>(k + 1), fs[k]));
  }
  std::string second = acceptance::criteria_json(again).dump();
  CriterionResult det{12, "determinism", first == second, "", Json::object()};
  det.detail = Json{{"bytes", first.size()}, {"identical", first == second}};
  det.summary = first == second ? "criteria 1-11 reproduce byte for byte on a single worker"
                                : "criteria 1-11 differ between runs";
  out.push_back(det);
  if (progress) progress(out.back());
  return out;
}

inline Json acceptance_report(const std::vector<CriterionResult>& rs) {
  Json j = report_envelope("selftest", std::nullopt);
  bool all = true;
  for (auto& c : rs) all = all && c.pass;
  j["criteria"] = acceptance::criteria_json(rs);
  j["pass"] = all;
  return j;
}

inline std::string criterion_line(const CriterionResult& c) {
  return std::string(c.pass ? "PASS" : "FAIL") + "  " + std::to_string(c.id) + ". " + c.name + ": " + c.summary;
}

}  // namespace mirrorkit
