#pragma once

// JSON model/ring/series formats, flag parsing and report serialization.

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mirrorkit/critical.hpp"
#include "mirrorkit/expression.hpp"
#include "mirrorkit/integrals.hpp"
#include "mirrorkit/operators.hpp"
#include "mirrorkit/series.hpp"

namespace mirrorkit {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "mirrorkit/1";
inline constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------- numbers

inline std::string format_double(double v) {
  if (v == 0) return "0";  // folds -0
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  return std::string(buf, res.ptr);
}

inline std::string format_complex(cplx v) {
  std::string s = format_double(v.real());
  double im = v.imag();
  if (im == 0) return s;
  std::string is = format_double(std::abs(im));
  return s + (im < 0 ? "-" : "+") + is + "i";
}

inline Json complex_list(const std::vector<cplx>& v) {
  Json a = Json::array();
  for (auto& x : v) a.push_back(format_complex(x));
  return a;
}

namespace detail {

inline double parse_real(const std::string& s) {
  if (s.empty()) throw Error(ErrorKind::ParseError, "empty number");
  if (s.find('/') != std::string::npos) {
    try {
      std::string t = s[0] == '+' ? s.substr(1) : s;
      Rational r(t);
      if (r.get_den() == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + s + "'");
      r.canonicalize();
      return r.get_d();
    } catch (const std::invalid_argument&) {
      throw Error(ErrorKind::ParseError, "not a rational: '" + s + "'");
    }
  }
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw Error(ErrorKind::ParseError, "not a number: '" + s + "'");
  return v;
}

}  // namespace detail

/// "a+bi", "a-bi", "bi", "-i", "a" with rational ("p/q") or decimal parts.
inline cplx parse_complex(std::string s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw Error(ErrorKind::ParseError, "empty complex number");
  if (t.back() != 'i') return {detail::parse_real(t), 0};
  t.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;)
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  std::string re = split == std::string::npos ? "" : t.substr(0, split);
  std::string im = split == std::string::npos ? t : t.substr(split);
  double imv;
  if (im.empty() || im == "+") imv = 1;
  else if (im == "-") imv = -1;
  else imv = detail::parse_real(im);
  return {re.empty() ? 0.0 : detail::parse_real(re), imv};
}

inline std::vector<cplx> parse_complex_list(const std::string& s) {
  std::vector<cplx> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
  return out;
}

inline std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(detail::parse_real(item));
  return out;
}

// ---------------------------------------------------------------- models

namespace detail {

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, what + " must be a JSON object");
  for (auto& [k, v] : j.items())
    if (!allowed.count(k)) throw Error(ErrorKind::ParseError, "unknown key '" + k + "' in " + what);
}

inline IntMatrix int_matrix(const Json& j, const std::string& key) {
  if (!j.is_array()) throw Error(ErrorKind::ParseError, key + " must be an array of rows");
  IntMatrix m;
  for (auto& row : j) {
    if (!row.is_array()) throw Error(ErrorKind::ParseError, key + " must be an array of rows");
    std::vector<std::int64_t> r;
    for (auto& x : row) {
      if (!x.is_number_integer()) throw Error(ErrorKind::ParseError, key + " entries must be integers");
      r.push_back(x.get<std::int64_t>());
    }
    m.push_back(std::move(r));
  }
  return m;
}

inline Rational parse_rational(const Json& x) {
  if (x.is_number_integer()) return Rational(x.get<long>());
  if (!x.is_string()) throw Error(ErrorKind::ParseError, "rationals must be \"p/q\" strings or integers");
  try {
    Rational r(x.get<std::string>());
    if (r.get_den() == 0) throw Error(ErrorKind::ParseError, "zero denominator");
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::ParseError, "not a rational: " + x.dump());
  }
}

inline std::string rational_string(const Rational& r) { return r.get_str(); }

}  // namespace detail

inline RawModel raw_model_from_json(const Json& j, const std::string& fallback_name = "model") {
  detail::reject_unknown_keys(
      j, {"name", "K", "N", "weights", "chamber", "bundle_weights", "equivariance", "smooth", "expected_cohomology_dim"},
      "model");
  for (const char* k : {"K", "N", "weights"})
    if (!j.contains(k)) throw Error(ErrorKind::ParseError, std::string("model is missing '") + k + "'");
  RawModel r;
  r.name = j.contains("name") ? j.at("name").get<std::string>() : fallback_name;
  if (!j.at("K").is_number_integer() || !j.at("N").is_number_integer())
    throw Error(ErrorKind::ParseError, "K and N must be integers");
  r.K = j.at("K").get<int>();
  r.N = j.at("N").get<int>();
  r.weights = detail::int_matrix(j.at("weights"), "weights");
  if (j.contains("chamber")) {
    std::vector<Rational> c;
    for (auto& x : j.at("chamber")) c.push_back(detail::parse_rational(x));
    r.chamber = c;
  }
  if (j.contains("bundle_weights")) r.bundle_weights = detail::int_matrix(j.at("bundle_weights"), "bundle_weights");
  if (j.contains("equivariance")) {
    std::string e = j.at("equivariance").get<std::string>();
    if (e == "none") r.equivariance = Equivariance::none;
    else if (e == "coh") r.equivariance = Equivariance::cohomological;
    else if (e == "k") r.equivariance = Equivariance::k_theoretic;
    else throw Error(ErrorKind::ParseError, "equivariance must be none, coh or k");
  }
  if (j.contains("smooth")) r.smooth = j.at("smooth").get<bool>();
  if (j.contains("expected_cohomology_dim")) r.expected_cohomology_dim = j.at("expected_cohomology_dim").get<int>();
  return r;
}

inline Json model_to_json(const ToricModel& m) {
  Json j;
  j["name"] = m.name();
  j["K"] = m.K();
  j["N"] = m.N();
  j["weights"] = m.weights();
  if (m.chamber()) {
    Json c = Json::array();
    for (auto& w : *m.chamber()) c.push_back(detail::rational_string(w));
    j["chamber"] = c;
  }
  if (m.bundle_weights()) j["bundle_weights"] = *m.bundle_weights();
  j["equivariance"] = to_string(m.equivariance());
  j["smooth"] = m.smooth();
  if (m.expected_cohomology_dim()) j["expected_cohomology_dim"] = *m.expected_cohomology_dim();
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, "invalid JSON in '" + path + "': " + e.what());
  }
}

/// A catalog name or a path to a model file.
inline ToricModel load_model(const std::string& source) {
  for (auto& n : catalog_names())
    if (n == source) return catalog_model(source);
  std::ifstream probe(source);
  if (!probe) throw Error(ErrorKind::UnknownModel, "'" + source + "' is neither a catalog model nor a readable file");
  try {
    return validate_model(raw_model_from_json(read_json_file(source), source));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad model file: ") + e.what());
  }
}

// ---------------------------------------------------------------- rings

/// {"mode":"cohomology"|"k_theory","equivariant":bool,"basis":[...],
///  "table":{"a*b":[coords]},"generators":{"p1":[coords]} or {"P1":...}}.
/// Products with the basis element "1" and the mirrored order may be omitted.
inline RingPtr ring_from_json(const Json& j) {
  try {
    detail::reject_unknown_keys(j, {"mode", "equivariant", "basis", "table", "generators"}, "ring table");
    RingMode mode = RingMode::cohomology;
    if (j.contains("mode")) {
      std::string m = j.at("mode").get<std::string>();
      if (m == "k_theory") mode = RingMode::k_theory;
      else if (m != "cohomology") throw Error(ErrorKind::ParseError, "ring mode must be cohomology or k_theory");
    }
    const bool eq = j.value("equivariant", false);
    auto basis = j.at("basis").get<std::vector<std::string>>();
    const std::size_t n = basis.size();
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < n; ++k)
      if (!index.emplace(basis[k], k).second) throw Error(ErrorKind::ParseError, "duplicate basis name " + basis[k]);
    auto coords = [&](const Json& v, const std::string& what) {
      if (!v.is_array() || v.size() != n) throw Error(ErrorKind::ParseError, what + " needs " + std::to_string(n) + " coordinates");
      std::vector<RatFunc> c;
      for (auto& x : v) c.push_back(x.is_number_integer() ? RatFunc(x.get<long>()) : parse_ratfunc(x.get<std::string>()));
      return c;
    };
    std::vector<std::vector<std::optional<std::vector<RatFunc>>>> t(n, std::vector<std::optional<std::vector<RatFunc>>>(n));
    for (auto& [key, v] : j.at("table").items()) {
      // basis names may contain '*': take the split where both halves are names
      bool found = false;
      for (std::size_t star = key.find('*'); star != std::string::npos && !found; star = key.find('*', star + 1)) {
        auto a = index.find(key.substr(0, star)), b = index.find(key.substr(star + 1));
        if (a == index.end() || b == index.end()) continue;
        t[a->second][b->second] = coords(v, "table entry " + key);
        found = true;
      }
      if (!found) throw Error(ErrorKind::ParseError, "table key '" + key + "' is not a product a*b of basis names");
    }
    auto unit = index.find("1");
    std::vector<std::vector<std::vector<RatFunc>>> table(n, std::vector<std::vector<RatFunc>>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (t[a][b]) table[a][b] = *t[a][b];
        else if (t[b][a]) table[a][b] = *t[b][a];
        else if (unit != index.end() && (a == unit->second || b == unit->second)) {
          std::vector<RatFunc> e(n);
          e[a == unit->second ? b : a] = RatFunc(1);
          table[a][b] = e;
        } else {
          throw Error(ErrorKind::ParseError, "table is missing " + basis[a] + "*" + basis[b]);
        }
      }
    const std::string prefix = mode == RingMode::cohomology ? "p" : "P";
    const Json& g = j.at("generators");
    std::vector<std::vector<RatFunc>> gens;
    for (std::size_t i = 1; i <= g.size(); ++i) {
      std::string key = prefix + std::to_string(i);
      if (!g.contains(key)) throw Error(ErrorKind::ParseError, "generators must be named " + prefix + "1.." + prefix + std::to_string(g.size()));
      gens.push_back(coords(g.at(key), "generator " + key));
    }
    // nilpotent augmentation: every non-unit basis element has a vanishing power
    auto trial = std::make_shared<const RingPresentation>(mode, eq, basis, table, gens, false);
    bool nil = true;
    for (std::size_t k = 0; k < n && nil; ++k) {
      if (k == trial->unit_index()) continue;
      RingElement b = RingElement::basis_element(trial, k), pw = b;
      for (std::size_t e = 1; e <= n && !pw.is_zero(); ++e) pw *= b;
      nil = pw.is_zero();
    }
    return std::make_shared<const RingPresentation>(mode, eq, std::move(basis), std::move(table), std::move(gens), nil);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad ring table: ") + e.what());
  }
}

inline ToricRing load_ring(const std::string& path, const ToricModel& model) {
  return attach_model(model, ring_from_json(read_json_file(path)));
}

inline Json ring_to_json(const RingPresentation& R) {
  Json j;
  j["mode"] = to_string(R.mode());
  j["equivariant"] = R.equivariant();
  j["basis"] = R.basis();
  Json t = Json::object();
  for (std::size_t a = 0; a < R.dim(); ++a)
    for (std::size_t b = a; b < R.dim(); ++b) {
      Json c = Json::array();
      for (auto& x : R.table()[a][b]) c.push_back(x.to_string());
      t[R.basis()[a] + "*" + R.basis()[b]] = c;
    }
  j["table"] = t;
  Json g = Json::object();
  const std::string prefix = R.mode() == RingMode::cohomology ? "p" : "P";
  for (std::size_t i = 0; i < R.generator_count(); ++i) {
    Json c = Json::array();
    for (auto& x : R.generator_coordinates()[i]) c.push_back(x.to_string());
    g[prefix + std::to_string(i + 1)] = c;
  }
  j["generators"] = g;
  return j;
}

// ---------------------------------------------------------------- series

inline Json element_to_json(const RingElement& e) {
  Json c = Json::object();
  const auto& basis = e.ring()->basis();
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (!e[k].is_zero()) c[basis[k]] = e[k].to_string();
  return c;
}

inline Json series_to_json(const TruncatedSeries& s) {
  Json a = Json::array();
  for (auto& [d, c] : s.coefficients()) a.push_back(Json{{"d", d}, {"coeff", element_to_json(c)}});
  return a;
}

// ---------------------------------------------------------------- reports

inline Json system_to_json(const OperatorSystem& sys) {
  Json j;
  j["kind"] = to_string(sys.kind);
  j["representation"] = to_string(sys.representation);
  Json eqs = Json::array();
  for (auto& e : sys.equations) {
    Json x{{"equation", e.to_string()}};
    if (!e.moves.empty()) x["moves"] = e.moves;
    eqs.push_back(x);
  }
  j["equations"] = eqs;
  j["notes"] = sys.notes;
  return j;
}

inline Json verification_to_json(const VerificationReport& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["dmax"] = r.dmax;
  j["window"] = r.window;
  j["checked"] = r.checked();
  j["failures"] = r.failures();
  j["pass"] = r.pass();
  Json eqs = Json::array();
  for (auto& e : r.equations) {
    Json degs = Json::array();
    for (auto& c : e.degrees) {
      Json x{{"d", c.d}, {"pass", c.pass}};
      if (!c.pass) x["residual"] = c.residual;
      degs.push_back(x);
    }
    eqs.push_back(Json{{"pass", e.pass()}, {"degrees", degs}});
  }
  j["equations"] = eqs;
  return j;
}

inline Json critical_point_to_json(const CriticalPoint& p) {
  Json j;
  j[p.mode == CriticalMode::cohomological ? "p" : "P"] = complex_list(p.p);
  j[p.mode == CriticalMode::cohomological ? "u" : "X"] = complex_list(p.x);
  if (p.mode == CriticalMode::k_theoretic) j["branch"] = p.branch;
  if (p.value) j["f"] = format_complex(*p.value);
  if (p.hessian) j["hessian"] = format_complex(*p.hessian);
  j["degenerate"] = p.degenerate;
  j["residual"] = p.residual;
  j["iterations"] = p.iterations;
  return j;
}

inline Json sample_to_json(const LagrangianSample& s) {
  Json j;
  j["mode"] = to_string(s.mode);
  j["root_order"] = s.root_order;
  j["Q"] = complex_list(s.Q);
  if (s.mode == CriticalMode::cohomological) j["lambda"] = complex_list(s.lambda);
  j["seeds"] = s.seeds;
  j["no_convergence"] = s.no_convergence;
  if (s.mode == CriticalMode::k_theoretic) j["no_consistent_branch"] = s.no_consistent_branch;
  j["count"] = s.points.size();
  Json pts = Json::array();
  for (auto& p : s.points) pts.push_back(critical_point_to_json(p));
  j["points"] = pts;
  return j;
}

inline Json adams_to_json(const AdamsReport& r) {
  Json j;
  j["root_order"] = r.root_order;
  j["tol"] = r.tol;
  j["pass"] = r.pass();
  Json e = Json::array();
  for (auto& x : r.entries)
    e.push_back(Json{{"P", complex_list(x.P)},
                     {"Q", complex_list(x.Q)},
                     {"P^m", complex_list(x.Pm)},
                     {"Q^m", complex_list(x.Qm)},
                     {"residual", x.residual},
                     {"pass", x.pass}});
  j["entries"] = e;
  return j;
}

inline Json mori_to_json(const MoriPartition& m) {
  Json j;
  j["direction"] = m.direction;
  j["bounded"] = m.bounded;
  j["escaping"] = m.escaping;
  if (m.expected) j["expected"] = *m.expected;
  j["matches_expected"] = m.matches_expected();
  Json b = Json::array();
  for (auto& t : m.branches)
    b.push_back(Json{{"start", complex_list(t.start)}, {"end", complex_list(t.end)}, {"bounded", t.bounded}, {"path_ok", t.path_ok}});
  j["branches"] = b;
  return j;
}

inline Json pairing_to_json(const PairingResult& r) {
  Json j{{"value", format_complex(r.value)}, {"points", r.points}, {"complete", r.complete}};
  if (r.expected) j["expected"] = *r.expected;
  return j;
}

inline Json localization_to_json(const LocalizationReport& r) {
  Json j;
  j["lambda"] = complex_list(r.lambda);
  j["t_min"] = r.t_min;
  j["tol"] = r.tol;
  j["pass"] = r.pass();
  Json c = Json::array();
  for (auto& p : r.classical) {
    std::vector<int> J1;
    for (int x : p.J) J1.push_back(x + 1);
    c.push_back(Json{{"J", J1}, {"p", complex_list(p.p)}, {"hessian", format_complex(p.hessian)}});
  }
  j["classical_points"] = c;
  Json b = Json::array();
  for (auto& x : r.branches) {
    Json e{{"start", complex_list(x.start)}, {"end", complex_list(x.end)}, {"escaped", x.escaped}};
    if (x.vertex) e["vertex"] = *x.vertex;
    e["hessian_end"] = format_complex(x.hessian_end);
    e["hessian_error"] = x.hessian_error;
    b.push_back(e);
  }
  j["branches"] = b;
  Json p = Json::array();
  for (auto& x : r.pairings)
    p.push_back(Json{{"phi", x.phi},
                     {"psi", x.psi},
                     {"residue", format_complex(x.residue)},
                     {"localization", format_complex(x.localization)},
                     {"error", x.error}});
  j["pairings"] = p;
  return j;
}

inline Json integral_to_json(const IntegralValue& v) {
  return Json{{"value", format_complex(v.value)},
              {"error", v.error},
              {"nodes", v.nodes},
              {"volume", v.volume},
              {"normalization", v.normalization}};
}

inline Json residual_to_json(const EquationResidual& r) {
  Json ev = Json::array();
  for (auto& [k, v] : r.evaluations) ev.push_back(Json{{"argument", k}, {"value", format_complex(v)}});
  return Json{{"kind", to_string(r.kind)},
              {"value", format_complex(r.value)},
              {"lhs", format_complex(r.lhs)},
              {"rhs", format_complex(r.rhs)},
              {"residual", r.residual},
              {"evaluations", ev}};
}

inline Json phase_table_to_json(const StationaryPhaseTable& t) {
  Json rows = Json::array();
  for (auto& r : t.rows)
    rows.push_back(Json{{"z", r.z},
                        {"numeric", format_complex(r.numeric)},
                        {"leading", format_complex(r.leading)},
                        {"ratio", format_complex(r.ratio)},
                        {"deviation", r.deviation}});
  return Json{{"dominant", critical_point_to_json(t.dominant)},
              {"phase_value", format_complex(t.phase_value)},
              {"constant", t.constant},
              {"rows", rows}};
}

// ---------------------------------------------------------------- envelope

/// Conventions the library commits to where the source formulas leave room.
inline std::vector<std::string> interpretation_notes() {
  return {
      "products written with upper index +infinity in the q-hypergeometric series are read with lower limit "
      "r = -infinity",
      "prod_{-inf}^0 / prod_{-inf}^{D} telescopes to prod_{r=D+1}^{0} for D < 0, so the r = 0 factor is a "
      "multiplier",
      "bundle series range over d with D_j(d) >= 0 for every j",
      "bundle systems use the factor signs that annihilate the bundle series: (1 - q^{-r} V_a T^{-l_a}), "
      "r = 0..l-1, for E and (1 - q^{r} V_a T^{l_a}), r = 1..l, for Pi E*",
      "Batyrev relations read Q_i = prod_j u_j(p)^{m_ij}",
      "root-of-unity branches use U_j^m = 1 - X_j^m",
      "integral normalization: the Gaussian calibration fixes the stationary-phase constant sqrt(2 pi); the "
      "circle integral is divided by 2 pi i",
      "equivariant K-theory uses the built-in projective-space rings with relations prod (1 - P Lam_j^{-1}) = 0, "
      "a supplied ring table, or the one-dimensional ring-free path",
  };
}

inline Json report_envelope(const std::string& command, const std::optional<ToricModel>& model) {
  Json j;
  j["schema"] = kSchema;
  j["tool"] = "mirrorkit";
  j["version"] = kVersion;
  j["command"] = command;
  if (model) j["model"] = model_to_json(*model);
  j["notes"] = interpretation_notes();
  return j;
}

inline Json error_entry(const Error& e) { return Json{{"kind", std::string(to_string(e.kind()))}, {"message", e.message()}}; }

}  // namespace mirrorkit
