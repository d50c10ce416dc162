#pragma once

// Command-line front end. Every subcommand writes to caller-supplied streams
// and returns an exit code:
//   0  success (check: model is dispersive)
//   1  check: model is valid but not dispersive
//   2  invalid input or usage
//   3  nu-fit: refinement hit the sweep limit before converging

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dqs/dynamics.hpp"
#include "dqs/gks.hpp"
#include "dqs/linalg.hpp"
#include "dqs/model_io.hpp"
#include "dqs/neutrino.hpp"
#include "dqs/qubit.hpp"

namespace dqs::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_not_dispersive = 1;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_not_converged = 3;

inline constexpr double default_tolerance = 1e-10;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strict locale-independent double parse of the whole string.
inline double parse_double(const std::string& s, const std::string& what) {
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  double v = 0.0;
  is >> v;
  if (s.empty() || is.fail() || !(is >> std::ws).eof()) {
    throw UsageError(what + ": cannot parse number '" + s + "'");
  }
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

inline neutrino::Bounds parse_bounds(const std::string& s, const std::string& what) {
  const auto p = split(s, ':');
  if (p.size() != 2) throw UsageError(what + ": expected lo:hi");
  neutrino::Bounds b{parse_double(p[0], what), parse_double(p[1], what)};
  if (!(b.lo <= b.hi)) throw UsageError(what + ": need lo <= hi");
  return b;
}

/// DQS_TOL if set and valid, otherwise `fallback`.
inline double tolerance_from_env(double fallback = default_tolerance) {
  const char* env = std::getenv("DQS_TOL");
  if (env == nullptr || *env == '\0') return fallback;
  const double v = parse_double(env, "DQS_TOL");
  if (!(v > 0.0)) throw UsageError("DQS_TOL: must be positive");
  return v;
}

inline std::string fmt(double v) { return format_double(v); }

inline void write_csv_row(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) out << ',';
    out << fmt(row[k]);
  }
  out << '\n';
}

// ---------------------------------------------------------------- check

struct CheckReport {
  double hermiticity_residual = 0.0;
  double min_eigenvalue = 0.0;
  double dissipation_norm = 0.0;
  double tolerance = 0.0;
  bool dispersive = false;
};

inline CheckReport check_model(const ModelFile& m, double tol) {
  const GksLiouvillian l = m.liouvillian();
  const ComplexMatrix& a = l.kossakowski().matrix();
  CheckReport r;
  r.hermiticity_residual = hermiticity_residual(a);
  r.min_eigenvalue = min_eigenvalue(a);
  const auto verdict = is_dispersive(l, tol);
  r.dissipation_norm = verdict.residual;
  r.tolerance = verdict.threshold;
  r.dispersive = verdict.dispersive;
  return r;
}

inline int cmd_check(const std::string& path, std::optional<double> tol, std::ostream& out,
                     std::ostream& err) {
  try {
    const double t = tol ? *tol : tolerance_from_env();
    const ModelFile m = read_model(path);
    const auto r = check_model(m, t);
    out << "model=" << path << '\n'
        << "dimension=" << m.dimension << '\n'
        << "basis=" << m.basis << '\n'
        << "kossakowski_hermiticity_residual=" << fmt(r.hermiticity_residual) << '\n'
        << "kossakowski_min_eigenvalue=" << fmt(r.min_eigenvalue) << '\n'
        << "dissipation_operator_norm=" << fmt(r.dissipation_norm) << '\n'
        << "tolerance=" << fmt(r.tolerance) << '\n'
        << "dispersive=" << (r.dispersive ? "true" : "false") << '\n';
    return r.dispersive ? exit_ok : exit_not_dispersive;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  }
}

// ---------------------------------------------------------------- evolve

struct EvolveOptions {
  std::string model_path;
  std::optional<std::string> state;       // "a,b_re,b_im" (N = 2)
  std::optional<std::string> state_file;  // JSON N×N [re, im] array
  double t_max = 10.0;
  int steps = 100;
};

inline ComplexMatrix read_state_file(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open state file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError("state file: " + detail::parse_error_message(e));
  }
  if (j.is_object() && j.contains("rho")) j = j["rho"];
  return detail::parse_complex_matrix(j, n, "rho");
}

inline ComplexMatrix parse_inline_state(const std::string& s) {
  const auto p = split(s, ',');
  if (p.size() != 3) throw UsageError("--state: expected a,b_re,b_im");
  return qubit::QubitBloch{parse_double(p[0], "--state"),
                           complex{parse_double(p[1], "--state"), parse_double(p[2], "--state")}}
      .matrix();
}

inline int cmd_evolve(const EvolveOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (!(o.t_max >= 0.0)) throw UsageError("--t-max must be nonnegative");
    if (o.steps < 1) throw UsageError("--steps must be positive");
    if (o.state.has_value() == o.state_file.has_value()) {
      throw UsageError("exactly one of --state and --state-file is required");
    }
    const ModelFile m = read_model(o.model_path);
    const GksLiouvillian l = m.liouvillian();
    const std::size_t n = l.dim();
    ComplexMatrix rho0m;
    if (o.state) {
      if (n != 2) throw UsageError("--state is only available for N = 2; use --state-file");
      rho0m = parse_inline_state(*o.state);
    } else {
      rho0m = read_state_file(*o.state_file, n);
    }
    DensityMatrix rho0 = [&] {
      try {
        return DensityMatrix(rho0m);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("invalid initial state: ") + e.what());
      }
    }();

    out << 't';
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= n; ++j) out << ",rho" << i << j << "_re,rho" << i << j << "_im";
    out << ",trace,entropy,energy\n";
    const int count = o.t_max == 0.0 ? 0 : o.steps;
    const ComplexMatrix& h = l.hamiltonian().matrix();
    for (int k = 0; k <= count; ++k) {
      const double t = count == 0 ? 0.0 : o.t_max * k / count;
      const DensityMatrix rho = k == 0 ? rho0 : propagate(l, rho0, t);
      std::vector<double> row{t};
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          row.push_back(rho.matrix()(i, j).real());
          row.push_back(rho.matrix()(i, j).imag());
        }
      row.push_back(rho.matrix().trace().real());
      row.push_back(von_neumann_entropy(rho));
      row.push_back(expectation(h, rho.matrix()));
      write_csv_row(out, row);
    }
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  }
}

// ---------------------------------------------------------------- probabilities

struct ProbabilityOptions {
  double delta = 5.0;
  double theta = 0.0;
  double lambda = 0.0;
  double t_max = 20.0;
  int steps = 2000;
};

inline int cmd_probabilities(const ProbabilityOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (!(o.delta > 0.0)) throw UsageError("--delta must be positive");
    if (!(o.lambda >= 0.0)) throw UsageError("--lambda must be nonnegative");
    if (!(o.t_max >= 0.0)) throw UsageError("--t-max must be nonnegative");
    if (o.steps < 1) throw UsageError("--steps must be positive");
    const qubit::DispersiveQubitParams p{.e0 = 0.0, .e1 = o.delta, .lambda = o.lambda};
    out << "t,P_transition,P_surviving\n";
    const int count = o.t_max == 0.0 ? 0 : o.steps;
    for (int k = 0; k <= count; ++k) {
      const double t = count == 0 ? 0.0 : o.t_max * k / count;
      write_csv_row(out, {t, qubit::transition_probability(p, o.theta, t),
                          qubit::surviving_probability(p, o.theta, t)});
    }
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  }
}

// ---------------------------------------------------------------- nu

struct NuOptions {
  std::optional<double> dm2;
  std::optional<double> tan2theta;
  std::optional<double> theta;
  double lambda_km = 0.0;
  std::optional<double> l_km;
  std::optional<double> e_gev;
  std::optional<std::string> loe_range;  // lo:hi:n
  double baseline_km = neutrino::constants::default_baseline_km;
};

inline int cmd_nu(const NuOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (!o.dm2) throw UsageError("--dm2 is required");
    if (o.tan2theta.has_value() == o.theta.has_value()) {
      throw UsageError("exactly one of --tan2theta and --theta is required");
    }
    neutrino::OscillationParams p{*o.dm2, o.theta ? *o.theta : neutrino::theta_from_tan2(*o.tan2theta),
                                  o.lambda_km};
    p.validate();
    if (!(o.baseline_km > 0.0)) throw UsageError("--baseline-km must be positive");

    std::vector<std::pair<double, double>> points;  // (L, E)
    if (o.loe_range) {
      if (o.l_km || o.e_gev) throw UsageError("--loe-range excludes --L and --E");
      const auto parts = split(*o.loe_range, ':');
      if (parts.size() != 3) throw UsageError("--loe-range: expected lo:hi:n");
      const double lo = parse_double(parts[0], "--loe-range");
      const double hi = parse_double(parts[1], "--loe-range");
      const double nd = parse_double(parts[2], "--loe-range");
      if (!(lo > 0.0 && hi >= lo)) throw UsageError("--loe-range: need 0 < lo <= hi");
      if (!(nd >= 1.0) || nd != std::floor(nd)) throw UsageError("--loe-range: n must be a positive integer");
      const auto count = static_cast<std::size_t>(nd);
      for (std::size_t k = 0; k < count; ++k) {
        const double loe = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (count - 1);
        points.emplace_back(o.baseline_km, o.baseline_km / loe);
      }
    } else {
      if (!o.l_km || !o.e_gev) throw UsageError("either --loe-range or both --L and --E are required");
      if (!(*o.l_km >= 0.0)) throw UsageError("--L must be nonnegative");
      if (!(*o.e_gev > 0.0)) throw UsageError("--E must be positive");
      points.emplace_back(*o.l_km, *o.e_gev);
    }
    out << "L_over_E_km_per_GeV,L_km,E_GeV,P_survival,P_transition\n";
    for (const auto& [l, e] : points) {
      write_csv_row(out, {l / e, l, e, neutrino::survival_probability(p, l, e),
                          neutrino::transition_probability(p, l, e)});
    }
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  }
}

// ---------------------------------------------------------------- nu-fit

struct NuFitOptions {
  std::string data_path;
  std::optional<std::string> dm2_bounds;
  std::optional<std::string> theta_bounds;
  std::optional<std::string> lambda_bounds;
  std::vector<std::string> fix;  // name=value, name ∈ {dm2, theta, tan2theta, lambda}
  std::optional<std::string> grid;  // n_dm2,n_theta,n_lambda
  int max_sweeps = 5000;
  double baseline_km = neutrino::constants::default_baseline_km;
};

inline neutrino::FitConfig fit_config(const NuFitOptions& o) {
  neutrino::FitConfig cfg;
  if (o.dm2_bounds) cfg.bounds[0] = parse_bounds(*o.dm2_bounds, "--dm2-bounds");
  if (o.theta_bounds) cfg.bounds[1] = parse_bounds(*o.theta_bounds, "--theta-bounds");
  if (o.lambda_bounds) cfg.bounds[2] = parse_bounds(*o.lambda_bounds, "--lambda-bounds");
  for (const auto& f : o.fix) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw UsageError("--fix: expected name=value, got '" + f + "'");
    const std::string name = f.substr(0, eq);
    const double v = parse_double(f.substr(eq + 1), "--fix " + name);
    if (name == "dm2") {
      cfg.fixed[0] = v;
    } else if (name == "theta") {
      cfg.fixed[1] = v;
    } else if (name == "tan2theta") {
      cfg.fixed[1] = neutrino::theta_from_tan2(v);
    } else if (name == "lambda") {
      cfg.fixed[2] = v;
    } else {
      throw UsageError("--fix: unknown parameter '" + name + "' (dm2, theta, tan2theta, lambda)");
    }
  }
  if (o.grid) {
    const auto g = split(*o.grid, ',');
    if (g.size() != 3) throw UsageError("--grid: expected n_dm2,n_theta,n_lambda");
    for (std::size_t k = 0; k < 3; ++k) {
      const double v = parse_double(g[k], "--grid");
      if (!(v >= 2.0) || v != std::floor(v) || v > 1e6) throw UsageError("--grid: entries must be integers >= 2");
      cfg.grid[k] = static_cast<int>(v);
    }
  }
  if (o.max_sweeps < 1) throw UsageError("--max-sweeps must be positive");
  cfg.max_sweeps = o.max_sweeps;
  if (!(o.baseline_km > 0.0)) throw UsageError("--baseline-km must be positive");
  cfg.baseline_km = o.baseline_km;
  return cfg;
}

inline int cmd_nu_fit(const NuFitOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = fit_config(o);
    std::ifstream in(o.data_path);
    if (!in) throw UsageError("cannot open data file '" + o.data_path + "'");
    std::vector<neutrino::SpectrumPoint> data;
    try {
      data = neutrino::read_spectrum_csv(in);
    } catch (const std::runtime_error& e) {
      throw UsageError(o.data_path + ": " + e.what());
    }
    if (data.empty()) throw UsageError(o.data_path + ": no data rows");
    const auto r = neutrino::fit_parameters(data, cfg);
    const double t = std::tan(r.params.theta_rad);
    const double s2 = std::sin(2 * r.params.theta_rad);
    out << "points=" << data.size() << '\n'
        << "dm2_ev2=" << fmt(r.params.dm2_ev2) << '\n'
        << "theta_rad=" << fmt(r.params.theta_rad) << '\n'
        << "tan2theta=" << fmt(t * t) << '\n'
        << "sin2_2theta=" << fmt(s2 * s2) << '\n'
        << "lambda_per_km=" << fmt(r.params.lambda_per_km) << '\n'
        << "sse=" << fmt(r.sse) << '\n'
        << "grid_best_sse=" << fmt(r.grid_best_sse) << '\n'
        << "grid_evaluations=" << r.grid_evaluations << '\n'
        << "sweeps=" << r.sweeps << '\n'
        << "converged=" << (r.converged ? "true" : "false") << '\n';
    return r.converged ? exit_ok : exit_not_converged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  }
}

// ---------------------------------------------------------------- basis / lindblad / model

inline void write_operator_rows(std::ostream& out, std::size_t k, const ComplexMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out << k << ',' << i << ',' << j << ',' << fmt(m(i, j).real()) << ',' << fmt(m(i, j).imag()) << '\n';
}

inline int cmd_basis(std::size_t dim, std::ostream& out, std::ostream& err) {
  try {
    if (dim < 2 || dim > 64) throw UsageError("--dim must lie in [2, 64]");
    const auto b = gell_mann_basis(dim);
    out << "index,row,col,re,im\n";
    for (std::size_t k = 0; k < b.size(); ++k) write_operator_rows(out, k + 1, b[k]);
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  }
}

inline int cmd_lindblad(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const GksLiouvillian l = read_model(path).liouvillian();
    const auto ops = lindblad_operators(l.kossakowski(), l.basis());
    out << "index,row,col,re,im\n";
    for (std::size_t k = 0; k < ops.size(); ++k) write_operator_rows(out, k + 1, ops[k]);
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  }
}

struct QubitModelOptions {
  double e0 = 0.0;
  double delta = 5.0;
  double lambda = 1.0;
  int axis = 3;  // Pauli axis carrying ½λ
};

/// Qubit model file with H = diag(E0 + Δ, E0) and Pauli coefficients ½λ e_axis e_axisᵀ.
inline int cmd_model(const QubitModelOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.axis < 1 || o.axis > 3) throw UsageError("--axis must be 1, 2 or 3");
    if (!(o.delta > 0.0)) throw UsageError("--delta must be positive");
    if (!(o.lambda >= 0.0)) throw UsageError("--lambda must be nonnegative");
    ModelFile m;
    m.dimension = 2;
    m.basis = "pauli";
    m.hamiltonian = ComplexMatrix::diagonal({o.e0 + o.delta, o.e0});
    m.kossakowski = ComplexMatrix(3, 3);
    m.kossakowski(o.axis - 1, o.axis - 1) = 0.5 * o.lambda;
    out << write_model(m);
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  }
}

// ---------------------------------------------------------------- dispatch

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"GKS generators, dispersive qubit dynamics and neutrino fits", "dqs"};
  app.require_subcommand(1);

  std::string check_path;
  std::optional<double> check_tol;
  auto* check = app.add_subcommand("check", "Validate a model and test D_H = 0");
  check->add_option("model", check_path, "Model file")->required();
  check->add_option("--tol", check_tol, "Dispersiveness tolerance on ||D_H|| (default: DQS_TOL or 1e-10)");

  EvolveOptions ev;
  auto* evolve = app.add_subcommand("evolve", "Propagate a state and print CSV");
  evolve->add_option("model", ev.model_path, "Model file")->required();
  evolve->add_option("--state", ev.state, "Qubit state a,b_re,b_im");
  evolve->add_option("--state-file", ev.state_file, "JSON N x N matrix of [re, im] pairs");
  evolve->add_option("--t-max", ev.t_max, "Final time")->capture_default_str();
  evolve->add_option("--steps", ev.steps, "Number of intervals")->capture_default_str();

  ProbabilityOptions po;
  auto* prob = app.add_subcommand("probabilities", "Transition and surviving probabilities of the dispersive qubit");
  prob->add_option("--delta", po.delta, "Energy gap")->capture_default_str();
  prob->add_option("--theta", po.theta, "Mixing angle (rad)")->required();
  prob->add_option("--lambda", po.lambda, "Dispersive parameter")->capture_default_str();
  prob->add_option("--t-max", po.t_max, "Final time")->capture_default_str();
  prob->add_option("--steps", po.steps, "Number of intervals")->capture_default_str();

  NuOptions nu;
  auto* nucmd = app.add_subcommand("nu", "Two-flavor survival/transition probabilities");
  nucmd->add_option("--dm2", nu.dm2, "Mass-squared splitting (eV^2)");
  auto* tan2 = nucmd->add_option("--tan2theta", nu.tan2theta, "tan^2 of the mixing angle");
  auto* th = nucmd->add_option("--theta", nu.theta, "Mixing angle (rad)");
  tan2->excludes(th);
  nucmd->add_option("--lambda-km", nu.lambda_km, "Damping rate (1/km)")->capture_default_str();
  nucmd->add_option("--L", nu.l_km, "Baseline (km)");
  nucmd->add_option("--E", nu.e_gev, "Energy (GeV)");
  nucmd->add_option("--loe-range", nu.loe_range, "L/E grid lo:hi:n (km/GeV)");
  nucmd->add_option("--baseline-km", nu.baseline_km, "Baseline used with --loe-range")->capture_default_str();

  NuFitOptions fit;
  auto* fitcmd = app.add_subcommand("nu-fit", "Least-squares fit of (dm2, theta, lambda_km) to survival data");
  fitcmd->add_option("data", fit.data_path, "CSV with header L_over_E_km_per_GeV,P_survival[,weight]")->required();
  fitcmd->add_option("--dm2-bounds", fit.dm2_bounds, "lo:hi (eV^2)");
  fitcmd->add_option("--theta-bounds", fit.theta_bounds, "lo:hi (rad)");
  fitcmd->add_option("--lambda-bounds", fit.lambda_bounds, "lo:hi (1/km)");
  fitcmd->add_option("--fix", fit.fix, "name=value with name in dm2, theta, tan2theta, lambda");
  fitcmd->add_option("--grid", fit.grid, "Grid points per axis n_dm2,n_theta,n_lambda");
  fitcmd->add_option("--max-sweeps", fit.max_sweeps, "Refinement sweep limit")->capture_default_str();
  fitcmd->add_option("--baseline-km", fit.baseline_km, "Baseline used to turn L/E into E")->capture_default_str();

  std::size_t basis_dim = 2;
  auto* basis = app.add_subcommand("basis", "Print the Gell-Mann operator basis");
  basis->add_option("--dim", basis_dim, "Hilbert-space dimension")->capture_default_str();

  std::string lindblad_path;
  auto* lind = app.add_subcommand("lindblad", "Print Lindblad operators V_k of a model");
  lind->add_option("model", lindblad_path, "Model file")->required();

  QubitModelOptions qm;
  auto* model = app.add_subcommand("model", "Write a qubit model file to stdout");
  model->add_option("--e0", qm.e0, "Ground energy")->capture_default_str();
  model->add_option("--delta", qm.delta, "Energy gap")->capture_default_str();
  model->add_option("--lambda", qm.lambda, "Rate")->capture_default_str();
  model->add_option("--axis", qm.axis, "Pauli axis of the dissipator (3 = dispersive)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) {
      err << app.get_subcommands().front()->help();
    } else {
      err << app.help();
    }
    return exit_invalid;
  }

  if (check->parsed()) return cmd_check(check_path, check_tol, out, err);
  if (evolve->parsed()) return cmd_evolve(ev, out, err);
  if (prob->parsed()) return cmd_probabilities(po, out, err);
  if (nucmd->parsed()) return cmd_nu(nu, out, err);
  if (fitcmd->parsed()) return cmd_nu_fit(fit, out, err);
  if (basis->parsed()) return cmd_basis(basis_dim, out, err);
  if (lind->parsed()) return cmd_lindblad(lindblad_path, out, err);
  if (model->parsed()) return cmd_model(qm, out, err);
  return exit_invalid;
}

}  // namespace dqs::cli
