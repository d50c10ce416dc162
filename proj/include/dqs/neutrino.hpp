#pragma once

// Two-flavor oscillation with a dispersive damping rate. The survival
// probability is the qubit surviving probability with Δt/2 → φ = K·Δm²·L/E
// and λt → λ_km·L.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dqs::neutrino {

namespace constants {
// Exact SI defining constants; ħ follows without rounding.
inline constexpr double planck_j_s = 6.62607015e-34;
inline constexpr double elementary_charge_c = 1.602176634e-19;
inline constexpr double hbar_gev_s = planck_j_s / (2.0 * std::numbers::pi * elementary_charge_c) * 1e-9;
inline constexpr double c_km_per_s = 2.99792458e5;
/// φ = K · Δm²[eV²] · L[km] / E[GeV];  K = 10⁻¹⁸ / (4 ħc[GeV·km]) ≈ 1.26693.
inline constexpr double phase_constant = 1e-18 / (4.0 * hbar_gev_s * c_km_per_s);
/// Flux-weighted mean reactor baseline of the KamLAND experiment.
inline constexpr double default_baseline_km = 180.0;
}  // namespace constants

struct OscillationParams {
  double dm2_ev2 = 7.9e-5;
  double theta_rad = 0.0;
  double lambda_per_km = 0.0;

  void validate() const {
    if (!(dm2_ev2 > 0.0)) throw std::invalid_argument("OscillationParams: dm2 must be positive");
    if (!(theta_rad >= 0.0 && theta_rad <= std::numbers::pi / 2))
      throw std::invalid_argument("OscillationParams: theta must lie in [0, pi/2]");
    if (!(lambda_per_km >= 0.0))
      throw std::invalid_argument("OscillationParams: lambda_km must be >= 0");
  }
};

/// θ ∈ [0, π/2] with tan²θ = t.
inline double theta_from_tan2(double tan2) {
  if (!(tan2 >= 0.0)) throw std::invalid_argument("theta_from_tan2: tan^2(theta) must be >= 0");
  return std::atan(std::sqrt(tan2));
}

inline double oscillation_phase(double dm2_ev2, double l_km, double e_gev) {
  if (!(e_gev > 0.0)) throw std::invalid_argument("oscillation_phase: energy must be positive");
  return constants::phase_constant * dm2_ev2 * l_km / e_gev;
}

inline double transition_probability(const OscillationParams& p, double l_km, double e_gev) {
  const double s = std::sin(oscillation_phase(p.dm2_ev2, l_km, e_gev));
  const double s2 = std::sin(2.0 * p.theta_rad);
  return (0.5 - std::exp(-p.lambda_per_km * l_km) * (0.5 - s * s)) * s2 * s2;
}

inline double survival_probability(const OscillationParams& p, double l_km, double e_gev) {
  return 1.0 - transition_probability(p, l_km, e_gev);
}

struct SpectrumPoint {
  double l_over_e = 0.0;  // km/GeV
  double p = 0.0;         // measured survival probability
  double weight = 1.0;
};

/// Reads `L_over_E_km_per_GeV,P_survival[,weight]` CSV. Lines starting with
/// '#' and blank lines are skipped; the first remaining line is the header.
inline std::vector<SpectrumPoint> read_spectrum_csv(std::istream& in) {
  std::vector<SpectrumPoint> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  bool has_weight = false;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + msg);
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    return cells;
  };
  auto number = [&](const std::string& cell, const char* what) {
    std::istringstream is(cell);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (is.fail() || !is.eof()) fail(std::string("cannot parse ") + what + " '" + cell + "'");
    return v;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (!header_seen) {
      if (cells.size() < 2 || cells.size() > 3 || cells[0] != "L_over_E_km_per_GeV" ||
          cells[1] != "P_survival" || (cells.size() == 3 && cells[2] != "weight")) {
        fail("expected header 'L_over_E_km_per_GeV,P_survival[,weight]'");
      }
      has_weight = cells.size() == 3;
      header_seen = true;
      continue;
    }
    if (cells.size() != (has_weight ? 3u : 2u)) fail("wrong number of fields");
    SpectrumPoint pt;
    pt.l_over_e = number(cells[0], "L_over_E");
    pt.p = number(cells[1], "P_survival");
    if (has_weight) pt.weight = number(cells[2], "weight");
    if (!(pt.l_over_e > 0.0)) fail("L_over_E must be positive");
    if (!(pt.p >= 0.0 && pt.p <= 1.0)) fail("P_survival must lie in [0, 1]");
    if (!(pt.weight >= 0.0)) fail("weight must be nonnegative");
    out.push_back(pt);
  }
  if (!header_seen) throw std::runtime_error("missing header");
  return out;
}

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

enum class Axis : std::size_t { dm2 = 0, theta = 1, lambda = 2 };

struct FitConfig {
  std::array<Bounds, 3> bounds{Bounds{1e-5, 2e-4}, Bounds{0.0, std::numbers::pi / 4},
                               Bounds{0.0, 1e-3}};
  std::array<std::optional<double>, 3> fixed{};
  std::array<int, 3> grid{160, 41, 21};
  double baseline_km = constants::default_baseline_km;
  double rel_tol = 1e-6;
  int max_sweeps = 5000;
};

struct FitResult {
  OscillationParams params;
  double sse = 0.0;
  bool converged = false;
  int sweeps = 0;
  std::size_t grid_evaluations = 0;
  double grid_best_sse = 0.0;
  std::array<std::size_t, 3> grid_best_index{};
};

inline double weighted_sse(const OscillationParams& p, const std::vector<SpectrumPoint>& data,
                           double baseline_km) {
  double s = 0.0;
  for (const auto& pt : data) {
    const double e = baseline_km / pt.l_over_e;
    const double r = survival_probability(p, baseline_km, e) - pt.p;
    s += pt.weight * r * r;
  }
  return s;
}

/// Weighted least squares: coarse grid over the free axes, then coordinate-wise
/// golden-section refinement until every parameter moves less than
/// rel_tol × its bound width within one sweep.
inline FitResult fit_parameters(const std::vector<SpectrumPoint>& data, const FitConfig& cfg = {}) {
  if (data.empty()) throw std::invalid_argument("fit_parameters: no data points");
  if (!(cfg.baseline_km > 0.0)) throw std::invalid_argument("fit_parameters: baseline must be positive");

  std::array<bool, 3> free{};
  std::array<double, 3> x{};
  std::size_t n_free = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& b = cfg.bounds[k];
    if (cfg.fixed[k]) {
      x[k] = *cfg.fixed[k];
    } else {
      if (!(b.lo <= b.hi)) throw std::invalid_argument("fit_parameters: bounds are not ordered");
      free[k] = b.hi > b.lo;
      x[k] = b.lo;
      if (free[k]) ++n_free;
    }
  }
  if (data.size() < n_free) {
    throw std::invalid_argument("fit_parameters: need at least " + std::to_string(n_free) +
                                " data points for " + std::to_string(n_free) + " free parameters");
  }

  auto to_params = [](const std::array<double, 3>& v) {
    return OscillationParams{v[0], v[1], v[2]};
  };
  auto objective = [&](const std::array<double, 3>& v) {
    return weighted_sse(to_params(v), data, cfg.baseline_km);
  };

  FitResult res;
  std::array<int, 3> steps{};
  for (std::size_t k = 0; k < 3; ++k) steps[k] = free[k] ? std::max(2, cfg.grid[k]) : 1;
  double best = std::numeric_limits<double>::infinity();
  std::array<double, 3> best_x = x;
  std::array<double, 3> v = x;
  for (int i = 0; i < steps[0]; ++i) {
    if (free[0]) v[0] = cfg.bounds[0].lo + cfg.bounds[0].width() * i / (steps[0] - 1);
    for (int j = 0; j < steps[1]; ++j) {
      if (free[1]) v[1] = cfg.bounds[1].lo + cfg.bounds[1].width() * j / (steps[1] - 1);
      for (int k = 0; k < steps[2]; ++k) {
        if (free[2]) v[2] = cfg.bounds[2].lo + cfg.bounds[2].width() * k / (steps[2] - 1);
        const double f = objective(v);
        ++res.grid_evaluations;
        if (f < best) {  // strict: first grid index wins ties
          best = f;
          best_x = v;
          res.grid_best_index = {static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                 static_cast<std::size_t>(k)};
        }
      }
    }
  }
  res.grid_best_sse = best;
  x = best_x;

  std::array<double, 3> half_width{};
  for (std::size_t k = 0; k < 3; ++k)
    if (free[k]) half_width[k] = cfg.bounds[k].width() / (steps[k] - 1);

  constexpr double inv_phi = 0.6180339887498949;
  double fx = best;
  for (res.sweeps = 1; res.sweeps <= cfg.max_sweeps; ++res.sweeps) {
    bool moved = false;
    for (std::size_t k = 0; k < 3; ++k) {
      if (!free[k]) continue;
      const double width = cfg.bounds[k].width();
      double lo = std::max(cfg.bounds[k].lo, x[k] - half_width[k]);
      double hi = std::min(cfg.bounds[k].hi, x[k] + half_width[k]);
      auto f_at = [&](double t) {
        auto y = x;
        y[k] = t;
        return objective(y);
      };
      double c = hi - inv_phi * (hi - lo);
      double d = lo + inv_phi * (hi - lo);
      double fc = f_at(c);
      double fd = f_at(d);
      const double xtol = 1e-3 * cfg.rel_tol * width;
      while (hi - lo > xtol) {
        if (fc <= fd) {
          hi = d;
          d = c;
          fd = fc;
          c = hi - inv_phi * (hi - lo);
          fc = f_at(c);
        } else {
          lo = c;
          c = d;
          fc = fd;
          d = lo + inv_phi * (hi - lo);
          fd = f_at(d);
        }
      }
      double cand = 0.5 * (lo + hi);
      double fcand = f_at(cand);
      // Bracket endpoints are candidates too (minimum on a bound).
      for (double e : {std::max(cfg.bounds[k].lo, x[k] - half_width[k]),
                       std::min(cfg.bounds[k].hi, x[k] + half_width[k])}) {
        const double fe = f_at(e);
        if (fe < fcand) {
          cand = e;
          fcand = fe;
        }
      }
      if (fcand < fx) {
        const double delta = std::abs(cand - x[k]);
        if (delta >= cfg.rel_tol * width) moved = true;
        half_width[k] = std::clamp(4.0 * delta, 10.0 * cfg.rel_tol * width,
                                   width / (steps[k] - 1));
        x[k] = cand;
        fx = fcand;
      } else {
        half_width[k] = std::max(0.5 * half_width[k], 10.0 * cfg.rel_tol * width);
      }
    }
    if (!moved) {
      res.converged = true;
      break;
    }
  }
  if (res.sweeps > cfg.max_sweeps) res.sweeps = cfg.max_sweeps;
  res.params = to_params(x);
  res.sse = fx;
  return res;
}

}  // namespace dqs::neutrino
