#include "momx/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "momx/errors.hpp"
#include "momx/json_io.hpp"
#include "momx/resolvent_engine.hpp"
#include "momx/scenarios.hpp"
#include "momx/solution_factory.hpp"

namespace momx::cli {

namespace {

using io::json;

struct GridAxis {
  std::string from;
  std::string to;
  int count = 0;
};

struct RunConfig {
  std::string config_path;
  std::string table_path;
  std::string pair_path;
  std::string measure_path;
  std::string phi_path;
  std::string out_path;
  std::string out_dir = ".";
  std::string scenario = "all";
  std::string mode = "scalar";
  int d_m = -1;
  int d_n = -1;
  int carleman_k = -1;
  Tolerances tol;
  double verify_tol = 1e-8;
  std::string sampler = "identity";
  int count = 1;
  std::optional<std::uint64_t> seed;
  int grid = 4;
  GridAxis l1;
  GridAxis l2;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InputError:
    case ErrorKind::IndexOutOfRange:
    case ErrorKind::ExcludedPoint:
    case ErrorKind::PointMismatch:
      return kInputError;
    case ErrorKind::NotPsd:
    case ErrorKind::NegativeDenominator:
      return kVerificationFailed;
    case ErrorKind::AdmissibilityFailed:
    case ErrorKind::CommutationViolated:
    case ErrorKind::ContractionViolated:
    case ErrorKind::NotSupported:
      return kParameterGate;
    default:
      return kStructuralGate;
  }
}

std::string fmt17(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

Complex parse_complex(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0;
  double im = 0.0;
  char comma = 0;
  if (!(in >> re) || !(in >> comma) || comma != ',' || !(in >> im) || !(in >> std::ws).eof()) {
    raise(ErrorKind::InputError, "expected a complex point as 're,im' but got '" + text + "'");
  }
  return {re, im};
}

std::vector<Complex> axis_points(const GridAxis& axis, const char* name) {
  if (axis.count < 1 || axis.from.empty()) {
    raise(ErrorKind::InputError, std::string("grid axis ") + name +
                                     " is empty: give --" + name + "-from and --" + name +
                                     "-count >= 1");
  }
  const Complex a = parse_complex(axis.from);
  const Complex b = axis.to.empty() ? a : parse_complex(axis.to);
  std::vector<Complex> pts;
  for (int i = 0; i < axis.count; ++i) {
    const double t = axis.count == 1 ? 0.0 : static_cast<double>(i) / (axis.count - 1);
    pts.push_back(a + t * (b - a));
  }
  return pts;
}

void validate(const RunConfig& c) {
  const Tolerances& t = c.tol;
  for (double v : {t.rank_tol, t.subspace_tol, t.cluster_tol, t.atom_merge_tol, c.verify_tol}) {
    if (!(v > 0.0)) raise(ErrorKind::InputError, "tolerances must be strictly positive");
  }
  if (t.psd_abs < 0.0) raise(ErrorKind::InputError, "psd tolerance must be positive");
}

SamplerSpec sampler_of(const RunConfig& c) {
  SamplerSpec spec;
  if (c.sampler == "identity") {
    spec.kind = SamplerSpec::Kind::IdentityOnly;
  } else if (c.sampler == "haar") {
    if (!c.seed) raise(ErrorKind::InputError, "--seed is required with --sampler haar");
    if (c.count < 1) raise(ErrorKind::InputError, "--count must be >= 1");
    spec.kind = SamplerSpec::Kind::HaarRandom;
    spec.count = c.count;
    spec.seed = *c.seed;
  } else if (c.sampler == "phases") {
    if (c.grid < 1) raise(ErrorKind::InputError, "--grid must be >= 1");
    spec.kind = SamplerSpec::Kind::ExhaustivePhases;
    spec.grid = c.grid;
  } else {
    raise(ErrorKind::InputError, "unknown sampler '" + c.sampler + "'");
  }
  return spec;
}

void emit(const RunConfig& c, const json& j, std::ostream& out) {
  if (c.out_path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    io::write_json_file(c.out_path, j);
  }
}

int cmd_check(const RunConfig& c, std::ostream& out) {
  const MomentTable table = io::table_from_json(io::read_json_file(c.table_path));
  json report;
  bool all_psd = true;
  json psd = json::array();
  for (int dm = 0; 2 * dm <= table.max_m(); ++dm) {
    for (int dn = 0; 2 * dn <= table.max_n(); ++dn) {
      const double tol = c.tol.psd_abs > 0.0 ? c.tol.psd_abs
                                             : default_psd_tol(table, dm, dn, c.tol.psd_rel);
      const PsdResult r = check_psd(table, dm, dn, tol);
      all_psd = all_psd && r.is_psd;
      psd.push_back({{"d_m", dm}, {"d_n", dn}, {"is_psd", r.is_psd},
                     {"min_eigenvalue", r.min_eigenvalue}, {"tol", tol}});
    }
  }
  report["psd"] = psd;
  json carleman = json::array();
  const int k = c.carleman_k > 0 ? c.carleman_k : table.max_n() / 2;
  for (int m = 0; 2 * m + 2 <= table.max_m() && k >= 1; ++m) {
    try {
      carleman.push_back(io::to_json(carleman_diagnostic(table, m, k)));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NegativeDenominator) throw;
      carleman.push_back({{"m", m}, {"error", e.what()}});
    }
  }
  report["carleman"] = carleman;
  report["psd_pass"] = all_psd;
  emit(c, report, out);
  return all_psd ? kOk : kVerificationFailed;
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
  if (c.table_path.empty() == c.pair_path.empty()) {
    raise(ErrorKind::InputError, "give exactly one of --table or --pair");
  }
  SolveOptions options;
  options.sampler = sampler_of(c);
  options.verify_tol = c.verify_tol;
  SolveResult result;
  if (!c.table_path.empty()) {
    const MomentTable table = io::table_from_json(io::read_json_file(c.table_path));
    const int dm = c.d_m >= 0 ? c.d_m : table.max_m() / 2;
    const int dn = c.d_n >= 0 ? c.d_n : table.max_n() / 2;
    result = solve_canonical(table, dm, dn, options, c.tol);
  } else {
    const SymmetricPair pair = io::pair_from_json(io::read_json_file(c.pair_path));
    result = solve_canonical(pair, std::nullopt, options, c.tol);
  }
  std::filesystem::create_directories(c.out_dir);
  bool all_pass = true;
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const SolutionReport& r = result.reports[i];
    std::ostringstream name;
    name << "solution_" << std::setw(3) << std::setfill('0') << i << ".json";
    const auto path = std::filesystem::path(c.out_dir) / name.str();
    io::write_json_file(path.string(), io::to_json(r));
    out << path.string() << ": " << r.measure.atoms.size() << " atoms, max_abs_moment_error "
        << fmt17(r.max_abs_moment_error) << (r.passed ? "" : " (FAILED)") << '\n';
    all_pass = all_pass && r.passed;
  }
  for (const RejectedSample& r : result.rejected) {
    out << "rejected U2 (seed " << r.tag << "): " << r.reason << '\n';
  }
  return all_pass ? kOk : kVerificationFailed;
}

int cmd_eval(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto l1 = axis_points(c.l1, "l1");
  const auto l2 = axis_points(c.l2, "l2");
  if (c.mode != "scalar" && c.mode != "matrix") {
    raise(ErrorKind::InputError, "--mode must be scalar or matrix");
  }
  SymmetricPair pair;
  if (!c.pair_path.empty()) {
    pair = io::pair_from_json(io::read_json_file(c.pair_path));
    pair.validate(c.tol);
  } else if (!c.table_path.empty()) {
    const MomentTable table = io::table_from_json(io::read_json_file(c.table_path));
    const int dm = c.d_m >= 0 ? c.d_m : table.max_m() / 2;
    const int dn = c.d_n >= 0 ? c.d_n : table.max_n() / 2;
    pair = build_operators(build_gns(table, dm, dn, c.tol.rank_tol), c.tol);
  } else {
    raise(ErrorKind::InputError, "give --pair or --table");
  }
  const IsometricPair iso = make_isometric_pair(pair, c.tol);
  CMatrix phi = CMatrix::Zero(iso.ninf.cols(), iso.n0.cols());
  if (!c.phi_path.empty()) {
    const json j = io::read_json_file(c.phi_path);
    if (!j.is_object() || !j.contains("phi")) raise(ErrorKind::InputError, "missing field \"phi\"");
    const CMatrix ambient = io::cmatrix_from_json(j["phi"], "phi");
    if (ambient.rows() != pair.dim || ambient.cols() != pair.dim) {
      raise(ErrorKind::InputError, "phi must be a dim x dim matrix acting on H");
    }
    phi = iso.ninf.adjoint() * ambient * iso.n0;
  }
  const PairResolvent resolvent(iso, ContractionParameter::constant(phi), c.tol);

  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << (c.mode == "scalar" ? "l1_re,l1_im,l2_re,l2_im,value_re,value_im\n"
                             : "l1_re,l1_im,l2_re,l2_im,row,col,value_re,value_im\n");
  int skipped = 0;
  for (const Complex a : l1) {
    for (const Complex b : l2) {
      CMatrix value;
      try {
        value = resolvent(a, b);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ExcludedPoint) throw;
        ++skipped;
        continue;
      }
      const std::string prefix = fmt17(a.real()) + "," + fmt17(a.imag()) + "," +
                                 fmt17(b.real()) + "," + fmt17(b.imag()) + ",";
      if (c.mode == "scalar") {
        const Complex s = pair.h00.dot(value * pair.h00);
        csv << prefix << fmt17(s.real()) << ',' << fmt17(s.imag()) << '\n';
      } else {
        for (Eigen::Index i = 0; i < value.rows(); ++i) {
          for (Eigen::Index j = 0; j < value.cols(); ++j) {
            csv << prefix << i << ',' << j << ',' << fmt17(value(i, j).real()) << ','
                << fmt17(value(i, j).imag()) << '\n';
          }
        }
      }
    }
  }
  csv << "# skipped_excluded_points=" << skipped << '\n';
  if (c.out_path.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(c.out_path);
    if (!f) raise(ErrorKind::InputError, "cannot write " + c.out_path);
    f << csv.str();
  }
  if (skipped > 0) err << skipped << " excluded grid points skipped\n";
  return kOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  const AtomicMeasure measure = io::measure_from_json(io::read_json_file(c.measure_path));
  const MomentTable table = io::table_from_json(io::read_json_file(c.table_path));
  measure.validate(c.tol.atom_merge_tol);
  const SolutionReport report = verify_solution(measure, table, c.verify_tol);
  json j = io::to_json(report);
  j["passed"] = report.passed;
  j["tol"] = c.verify_tol;
  emit(c, j, out);
  return report.passed ? kOk : kVerificationFailed;
}

int cmd_demo(const RunConfig& c, std::ostream& out) {
  const bool all = c.scenario == "all";
  if (!all && c.scenario != "e1" && c.scenario != "e2" && c.scenario != "e3") {
    raise(ErrorKind::InputError, "unknown scenario '" + c.scenario + "'");
  }
  std::filesystem::create_directories(c.out_dir);
  const auto dir = std::filesystem::path(c.out_dir);
  SolveOptions options;
  auto table_demo = [&](const std::string& name, const AtomicMeasure& measure) {
    const MomentTable table = moments_of_measure(measure, 4, 4);
    io::write_json_file((dir / (name + "_table.json")).string(), io::to_json(table));
    io::write_json_file((dir / (name + "_measure.json")).string(), io::to_json(measure));
    const SolveResult r = solve_canonical(table, 2, 2, options, c.tol);
    for (const SolutionReport& rep : r.reports) {
      out << name << ": determinate=" << rep.determinate << " atoms=" << rep.measure.atoms.size()
          << " max_abs_moment_error=" << fmt17(rep.max_abs_moment_error) << '\n';
    }
  };
  if (all || c.scenario == "e1") table_demo("e1", scenarios::e1_measure());
  if (all || c.scenario == "e2") table_demo("e2", scenarios::e2_measure());
  if (all || c.scenario == "e3") {
    const SymmetricPair pair = scenarios::e3_pair();
    io::write_json_file((dir / "e3_pair.json").string(), io::to_json(pair));
    SolveOptions phases;
    phases.sampler.kind = SamplerSpec::Kind::ExhaustivePhases;
    phases.sampler.grid = 4;
    const SolveResult r = solve_canonical(pair, std::nullopt, phases, c.tol);
    for (const SolutionReport& rep : r.reports) {
      out << "e3: U2 grid index " << rep.u2_seed << " atoms=" << rep.measure.atoms.size()
          << " max_abs_moment_error=" << fmt17(rep.max_abs_moment_error) << '\n';
    }
    for (const RejectedSample& rej : r.rejected) {
      out << "e3: U2 grid index " << rej.tag << " rejected (" << rej.reason << ")\n";
    }
  }
  return kOk;
}

// Config keys mirror the long flag names with '-' replaced by '_'.
void apply_config(CLI::App& app, RunConfig& c) {
  if (c.config_path.empty()) return;
  const json j = io::read_json_file(c.config_path);
  if (!j.is_object()) raise(ErrorKind::InputError, "config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt = nullptr;
    for (CLI::App* sub : app.get_subcommands()) {
      try {
        opt = sub->get_option(flag);
      } catch (const CLI::OptionNotFound&) {
        opt = nullptr;
      }
      if (opt != nullptr) break;
    }
    if (opt == nullptr) raise(ErrorKind::InputError, "config key '" + key + "' is not a flag");
    if (opt->count() > 0) continue;  // command line wins
    const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    opt->add_result(text);
    opt->run_callback();
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Two-dimensional moment problem toolkit", "momentx"};
  app.require_subcommand(1);

  auto add_tolerances = [&](CLI::App* sub) {
    sub->add_option("--config", c.config_path, "JSON file with flag overrides");
    sub->add_option("--rank-tol", c.tol.rank_tol, "relative Gram eigenvalue cut");
    sub->add_option("--psd-tol", c.tol.psd_abs, "absolute PSD tolerance (default relative)");
    sub->add_option("--subspace-tol", c.tol.subspace_tol, "subspace tolerance");
    sub->add_option("--cluster-tol", c.tol.cluster_tol, "eigenvalue cluster tolerance");
    sub->add_option("--atom-merge-tol", c.tol.atom_merge_tol, "atom merge tolerance");
  };

  CLI::App* check = app.add_subcommand("check", "PSD and Carleman diagnostics of a table");
  check->add_option("--table", c.table_path, "moment table JSON")->required();
  check->add_option("--carleman-k", c.carleman_k, "Carleman truncation K");
  check->add_option("--out", c.out_path, "report path (stdout if omitted)");
  add_tolerances(check);

  CLI::App* solve = app.add_subcommand("solve-canonical", "enumerate canonical solutions");
  solve->add_option("--table", c.table_path, "moment table JSON");
  solve->add_option("--pair", c.pair_path, "symmetric pair JSON");
  solve->add_option("--dm", c.d_m, "GNS degree in t1 (default max_m/2)");
  solve->add_option("--dn", c.d_n, "GNS degree in t2 (default max_n/2)");
  solve->add_option("--sampler", c.sampler, "identity | haar | phases");
  solve->add_option("--count", c.count, "number of Haar samples");
  solve->add_option("--seed", c.seed, "Haar sampler seed");
  solve->add_option("--grid", c.grid, "phase grid size");
  solve->add_option("--verify-tol", c.verify_tol, "moment error tolerance");
  solve->add_option("--out-dir", c.out_dir, "directory for solution files");
  add_tolerances(solve);

  CLI::App* eval = app.add_subcommand("eval-resolvent", "pair resolvent scalar over a grid");
  eval->add_option("--pair", c.pair_path, "symmetric pair JSON");
  eval->add_option("--table", c.table_path, "moment table JSON (GNS operators)");
  eval->add_option("--dm", c.d_m, "GNS degree in t1");
  eval->add_option("--dn", c.d_n, "GNS degree in t2");
  eval->add_option("--phi", c.phi_path, "JSON {\"phi\": dim x dim matrix on H}");
  eval->add_option("--l1-from", c.l1.from, "first corner 're,im'");
  eval->add_option("--l1-to", c.l1.to, "second corner 're,im'");
  eval->add_option("--l1-count", c.l1.count, "points along lambda1");
  eval->add_option("--l2-from", c.l2.from, "first corner 're,im'");
  eval->add_option("--l2-to", c.l2.to, "second corner 're,im'");
  eval->add_option("--l2-count", c.l2.count, "points along lambda2");
  eval->add_option("--mode", c.mode, "scalar | matrix");
  eval->add_option("--out", c.out_path, "CSV path (stdout if omitted)");
  add_tolerances(eval);

  CLI::App* verify = app.add_subcommand("verify", "check a measure against a table");
  verify->add_option("--measure", c.measure_path, "atomic measure JSON")->required();
  verify->add_option("--table", c.table_path, "moment table JSON")->required();
  verify->add_option("--tol", c.verify_tol, "max absolute moment error");
  verify->add_option("--out", c.out_path, "report path (stdout if omitted)");
  add_tolerances(verify);

  CLI::App* demo = app.add_subcommand("demo", "run the bundled E1/E2/E3 scenarios");
  demo->add_option("--scenario", c.scenario, "e1 | e2 | e3 | all");
  demo->add_option("--out-dir", c.out_dir, "directory for scenario files");
  add_tolerances(demo);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    apply_config(app, c);
    validate(c);
    if (check->parsed()) return cmd_check(c, out);
    if (solve->parsed()) return cmd_solve(c, out);
    if (eval->parsed()) return cmd_eval(c, out, err);
    if (verify->parsed()) return cmd_verify(c, out);
    return cmd_demo(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace momx::cli
