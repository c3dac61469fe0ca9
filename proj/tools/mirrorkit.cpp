#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mirrorkit/acceptance.hpp"

using namespace mirrorkit;

namespace {

struct Common {
  std::string model = "";
  std::string output;
};

struct SeriesOpts {
  std::string kind = "h";
  int dmax = 5;
  std::string ring_file;
  bool scalar = false;
  std::string reading = "series_consistent";
  bool print_system = false;
};

struct CriticalOpts {
  std::string Q, lambda;
  int root_order = 0;
  int seeds = 64;
  double tol = 1e-10;
  bool mori = false;
  double t_min = 1e-8;
};

struct AdamsOpts {
  std::string Q;
  int m = 2;
  double tol = 1e-9;
  int seeds = 64;
};

struct PairingOpts {
  std::string Q, lambda, phi = "1", psi = "1";
  std::optional<int> expected;
};

struct LocalizeOpts {
  std::string lambda, Q0;
  double t_min = 1e-8;
  int steps = 160;
  double tol = 1e-6;
};

struct IntegrateOpts {
  std::string kind = "h";
  std::string Q;
  std::string z = "0.1", q = "0.5";
  double radius = 0.5;
  int nodes = 64;
  bool check_equation = false;
  int equation = 0;
  std::string stationary_phase;
  std::string plot_data;
};

RingMode mode_of(const std::string& kind) { return kind == "h" ? RingMode::cohomology : RingMode::k_theory; }

ToricRing choose_ring(const ToricModel& m, const SeriesOpts& o) {
  const RingMode mode = mode_of(o.kind);
  const bool eq = m.equivariance() != Equivariance::none;
  if (!o.ring_file.empty()) return load_ring(o.ring_file, m);
  if (o.scalar) return scalar_ring(m, mode, eq);
  return catalog_ring(m, mode, eq);
}

TruncatedSeries make_series(const ToricModel& m, const ToricRing& r, const std::string& kind, int dmax) {
  if (kind == "h") return series_H(m, r, dmax);
  if (kind == "k") return series_K(m, r, dmax);
  if (kind == "e") return series_E(m, r, dmax);
  return series_PiE(m, r, dmax);
}

OperatorSystem make_system(const ToricModel& m, const ToricRing& r, const SeriesOpts& o) {
  const auto reading = o.reading == "as_displayed" ? BundleReading::as_displayed : BundleReading::series_consistent;
  if (o.kind == "h") return build_system_H(m, Representation::vector, &r);
  if (o.kind == "k") return build_system_K(m, Representation::vector, &r);
  if (o.kind == "e") return build_system_E(m, r, reading);
  return build_system_PiE(m, r, reading);
}

SolverConfig solver(int seeds, double tol) {
  SolverConfig c;
  c.seeds = seeds;
  c.tol = tol;
  return c;
}

std::vector<cplx> model_Q(const ToricModel& m, const std::string& s) {
  return s.empty() ? std::vector<cplx>(m.K(), cplx(1)) : parse_complex_list(s);
}

void emit(const Json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mirrorkit: toric q-hypergeometric series, difference operators and mirror critical loci"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI/TOML file with option values; unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);
  Common common;
  app.add_option("--output,-o", common.output, "write the JSON report here instead of stdout");

  auto positive = CLI::PositiveNumber;
  auto kinds = CLI::IsMember({"h", "k", "e", "pie"});

  SeriesOpts so;
  auto add_series_opts = [&](CLI::App* sub) {
    sub->add_option("--model", common.model, "catalog name or model JSON file")->required();
    sub->add_option("--kind", so.kind, "h, k, e (bundle E) or pie (bundle Pi E*)")->check(kinds);
    sub->add_option("--dmax", so.dmax, "degree box |d_i| <= dmax")->check(CLI::NonNegativeNumber);
    sub->add_option("--ring", so.ring_file, "ring table JSON file");
    sub->add_flag("--scalar", so.scalar, "one-dimensional ring-free path");
    sub->add_option("--reading", so.reading, "bundle operator reading")
        ->check(CLI::IsMember({"series_consistent", "as_displayed"}));
  };
  auto* series = app.add_subcommand("series", "generate a truncated I-function");
  add_series_opts(series);
  auto* verify_cmd = app.add_subcommand("verify", "check the difference or differential system on the series");
  add_series_opts(verify_cmd);
  verify_cmd->add_flag("--print-system", so.print_system, "include the operator system in the report");

  CriticalOpts co;
  auto* critical = app.add_subcommand("critical", "solve the Batyrev system");
  critical->add_option("--model", common.model)->required();
  critical->add_option("--Q", co.Q, "comma-separated complex list a+bi");
  critical->add_option("--lambda", co.lambda, "equivariant parameters");
  critical->add_option("--root-order", co.root_order, "m > 0 solves the K-theoretic system on L_m")
      ->check(CLI::NonNegativeNumber);
  critical->add_option("--seeds", co.seeds)->check(positive);
  critical->add_option("--tol", co.tol)->check(positive);
  critical->add_flag("--mori", co.mori, "filter points by their limit in the chamber");
  critical->add_option("--t-min", co.t_min)->check(positive);

  AdamsOpts ao;
  auto* adams = app.add_subcommand("adams", "check the Adams self-similarity on L_m");
  adams->add_option("--model", common.model)->required();
  adams->add_option("--Q", ao.Q);
  adams->add_option("--m", ao.m)->check(CLI::PositiveNumber);
  adams->add_option("--tol", ao.tol)->check(positive);
  adams->add_option("--seeds", ao.seeds)->check(positive);

  PairingOpts po;
  auto* pairing = app.add_subcommand("pairing", "residue pairing over the critical set");
  pairing->add_option("--model", common.model)->required();
  pairing->add_option("--Q", po.Q);
  pairing->add_option("--lambda", po.lambda);
  pairing->add_option("--phi", po.phi, "rational function in p1..pK, lam1..lamN");
  pairing->add_option("--psi", po.psi);
  pairing->add_option("--expected", po.expected, "required number of critical points");

  LocalizeOpts lo;
  auto* localize = app.add_subcommand("localize", "compare the small-Q limit with fixed-point data");
  localize->add_option("--model", common.model)->required();
  localize->add_option("--lambda", lo.lambda)->required();
  localize->add_option("--Q0", lo.Q0);
  localize->add_option("--t-min", lo.t_min)->check(positive);
  localize->add_option("--steps", lo.steps)->check(positive);
  localize->add_option("--tol", lo.tol)->check(positive);

  IntegrateOpts io;
  auto* integrate = app.add_subcommand("integrate", "evaluate oscillatory or circle integrals");
  integrate->add_option("--model", common.model)->required();
  integrate->add_option("--kind", io.kind)->check(CLI::IsMember({"h", "k"}));
  integrate->add_option("--Q", io.Q);
  integrate->add_option("--z", io.z);
  integrate->add_option("--q", io.q);
  integrate->add_option("--radius", io.radius)->check(positive);
  integrate->add_option("--nodes", io.nodes, "initial quadrature nodes")->check(positive);
  integrate->add_flag("--check-equation", io.check_equation);
  integrate->add_option("--equation", io.equation)->check(CLI::NonNegativeNumber);
  integrate->add_option("--stationary-phase", io.stationary_phase, "comma-separated z values");
  integrate->add_option("--plot-data", io.plot_data, "two-column text file: z, Re(ratio)");

  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto* cmd = app.get_subcommands().front();
  Json report = report_envelope(cmd->get_name(), std::nullopt);
  bool pass = true;
  try {
    std::optional<ToricModel> model;
    if (!common.model.empty()) {
      model = load_model(common.model);
      report["model"] = model_to_json(*model);
      report["model_source"] = common.model;
    }
    if (cmd == series) {
      auto ring = choose_ring(*model, so);
      report["ring"] = ring_to_json(*ring.ring);
      report["dmax"] = so.dmax;
      report["series"] = series_to_json(make_series(*model, ring, so.kind, so.dmax));
    } else if (cmd == verify_cmd) {
      auto ring = choose_ring(*model, so);
      auto sys = make_system(*model, ring, so);
      auto rep = verify(sys, make_series(*model, ring, so.kind, so.dmax));
      if (so.print_system) report["system"] = system_to_json(sys);
      report["verification"] = verification_to_json(rep);
      pass = rep.pass();
      report["summary"] = pass ? "all degrees pass" : "some degrees fail";
    } else if (cmd == critical) {
      auto Q = model_Q(*model, co.Q);
      auto cfg = solver(co.seeds, co.tol);
      if (co.root_order > 0) {
        report["sample"] = sample_to_json(critical_points_K(*model, Q, co.root_order, cfg));
      } else {
        auto sample = critical_points_H(*model, Q, parse_complex_list(co.lambda), cfg);
        report["sample"] = sample_to_json(sample);
        if (co.mori) {
          auto part = mori_limit_filter(*model, sample, {}, co.t_min);
          report["mori"] = mori_to_json(part);
          pass = part.matches_expected();
        }
      }
    } else if (cmd == adams) {
      auto sample = critical_points_K(*model, model_Q(*model, ao.Q), ao.m, solver(ao.seeds, 1e-10));
      auto rep = adams_check(*model, sample, ao.tol);
      report["sample"] = sample_to_json(sample);
      report["adams"] = adams_to_json(rep);
      pass = rep.pass() && !rep.entries.empty();
    } else if (cmd == pairing) {
      auto sample = critical_points_H(*model, model_Q(*model, po.Q), parse_complex_list(po.lambda));
      auto r = residue_pairing(*model, sample, parse_ratfunc(po.phi), parse_ratfunc(po.psi), po.expected);
      report["phi"] = po.phi;
      report["psi"] = po.psi;
      report["pairing"] = pairing_to_json(r);
      pass = r.complete;
    } else if (cmd == localize) {
      auto rep = localization_check(*model, parse_complex_list(lo.lambda), parse_complex_list(lo.Q0),
                                    lo.t_min, lo.steps, {{"1", "1"}, {"p1", "1"}}, lo.tol);
      report["localization"] = localization_to_json(rep);
      pass = rep.pass();
    } else if (cmd == integrate) {
      IntegralSpec spec;
      spec.kind = io.kind == "h" ? IntegralKind::cohomological : IntegralKind::k_theoretic;
      spec.Q = model_Q(*model, io.Q);
      spec.z = parse_complex(io.z);
      spec.q = parse_complex(io.q);
      spec.radius = io.radius;
      spec.quad.initial_nodes = io.nodes;
      report["integral"] = integral_to_json(eval_integral(*model, spec));
      if (io.check_equation) {
        auto res = check_equation_numeric(*model, spec, io.equation);
        report["equation_residual"] = residual_to_json(res);
        pass = res.residual < 1e-8;
      }
      if (!io.stationary_phase.empty()) {
        auto table = stationary_phase_compare(*model, spec.Q, parse_real_list(io.stationary_phase));
        report["stationary_phase"] = phase_table_to_json(table);
        if (!io.plot_data.empty()) {
          std::ofstream f(io.plot_data);
          if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + io.plot_data);
          f << "# z ratio\n";
          for (auto& row : table.rows) f << format_double(row.z) << ' ' << format_double(row.ratio.real()) << '\n';
        }
      }
    } else if (cmd == selftest) {
      auto rs = run_acceptance([](const CriterionResult& c) { std::cerr << criterion_line(c) << '\n'; });
      report = acceptance_report(rs);
      pass = report["pass"].get<bool>();
    }
    report["pass"] = pass;
    emit(report, common.output);
    return pass ? 0 : 1;
  } catch (const Error& e) {
    report["pass"] = false;
    report["errors"] = Json::array({error_entry(e)});
    std::cerr << "error: " << e.what() << '\n';
    try {
      emit(report, common.output);
    } catch (const Error&) {
    }
    return 2;
  } catch (const std::exception& e) {
    report["pass"] = false;
    report["errors"] = Json::array({Json{{"kind", "InternalError"}, {"message", e.what()}}});
    std::cerr << "error: " << e.what() << '\n';
    try {
      emit(report, common.output);
    } catch (const Error&) {
    }
    return 2;
  }
}
