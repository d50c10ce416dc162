#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dqs/gks.hpp"
#include "dqs/linalg.hpp"
#include "dqs/matrix.hpp"

namespace dqs {

/// Γ_t = exp(t·M) on column-stacked operators.
class Propagator {
 public:
  Propagator(std::size_t dim, double t, ComplexMatrix map)
      : dim_(dim), t_(t), map_(std::move(map)) {
    if (map_.rows() != dim_ * dim_ || map_.cols() != dim_ * dim_) {
      throw std::invalid_argument("Propagator: map must be N^2 x N^2");
    }
  }

  static Propagator at(const GksLiouvillian& l, double t) {
    return Propagator(l.dim(), t, expm(l.superoperator(), t));
  }

  std::size_t dim() const noexcept { return dim_; }
  double time() const noexcept { return t_; }
  const ComplexMatrix& map() const noexcept { return map_; }

  ComplexMatrix apply(const ComplexMatrix& sigma) const {
    const auto v = vec(sigma);
    return unvec(map_ * std::span<const complex>(v), dim_);
  }

 private:
  std::size_t dim_;
  double t_;
  ComplexMatrix map_;
};

/// ρ(t) = unvec(exp(tM) vec(ρ0)), t ≥ 0.
inline DensityMatrix propagate(const GksLiouvillian& l, const DensityMatrix& rho0, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("propagate: time must be nonnegative");
  if (rho0.dim() != l.dim()) throw std::invalid_argument("propagate: state dimension mismatch");
  const ComplexMatrix out = Propagator::at(l, t).apply(rho0.matrix());
  return DensityMatrix(hermitian_part(out), 1e-10, 1e-9);
}

/// ‖exp((t1+t2)M) - exp(t2 M) exp(t1 M)‖_F
inline double semigroup_residual(const GksLiouvillian& l, double t1, double t2) {
  if (t1 < 0.0 || t2 < 0.0) throw std::invalid_argument("semigroup_residual: times must be nonnegative");
  const ComplexMatrix& m = l.superoperator();
  return (expm(m, t1 + t2) - expm(m, t2) * expm(m, t1)).frobenius_norm();
}

/// C = Σ_ij E_ij ⊗ Γ(E_ij): block (i, j) of C is Γ(E_ij).
inline ComplexMatrix choi_matrix(const Propagator& p) {
  const std::size_t n = p.dim();
  ComplexMatrix c(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const ComplexMatrix img = p.apply(ComplexMatrix::unit(n, i, j));
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) c(i * n + k, j * n + l) = img(k, l);
    }
  return c;
}

struct CptpReport {
  double trace_residual = 0.0;        // max_ij |tr Γ(E_ij) - δ_ij|
  double choi_min_eigenvalue = 0.0;
  double hermiticity_residual = 0.0;  // max |C - C†|
};

inline CptpReport cptp_report(const Propagator& p) {
  const std::size_t n = p.dim();
  CptpReport r;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const complex tr = p.apply(ComplexMatrix::unit(n, i, j)).trace();
      r.trace_residual = std::max(r.trace_residual, std::abs(tr - (i == j ? 1.0 : 0.0)));
    }
  const ComplexMatrix c = choi_matrix(p);
  r.hermiticity_residual = hermiticity_residual(c);
  r.choi_min_eigenvalue = detail::jacobi_eigen(hermitian_part(c)).values.front();
  return r;
}

/// ‖(exp(εM) - I)/ε - M‖_F
inline double generator_recovery_residual(const GksLiouvillian& l, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("generator_recovery_residual: epsilon must be positive");
  const ComplexMatrix& m = l.superoperator();
  const ComplexMatrix diff =
      (expm(m, eps) - ComplexMatrix::identity(m.rows())) * (1.0 / eps) - m;
  return diff.frobenius_norm();
}

/// max over ζ ∈ grid, 1 ≤ k ≤ m_max of ‖(ζI - M)^{-k}‖₂ (ζ - γ)^k / C.
/// Values ≤ 1 are consistent with the resolvent bound for (C, γ) on the grid.
inline double hille_yosida_probe(const ComplexMatrix& m, double gamma, double c,
                                 std::span<const double> zeta_grid, int m_max) {
  if (!(c >= 1.0)) throw std::invalid_argument("hille_yosida_probe: C must be >= 1");
  if (m_max < 1) throw std::invalid_argument("hille_yosida_probe: m_max must be positive");
  m.require_square("hille_yosida_probe");
  const std::size_t d = m.rows();
  double worst = 0.0;
  for (double zeta : zeta_grid) {
    if (!(zeta > gamma)) throw std::invalid_argument("hille_yosida_probe: every zeta must exceed gamma");
    const ComplexMatrix shifted = ComplexMatrix::identity(d) * zeta - m;
    const auto sv = singular_values(shifted);
    if (sv.back() <= 1e-8) {
      throw std::invalid_argument("hille_yosida_probe: zeta = " + std::to_string(zeta) +
                                  " is within 1e-8 of the spectrum");
    }
    const ComplexMatrix resolvent = inverse(shifted);
    ComplexMatrix power = ComplexMatrix::identity(d);
    for (int k = 1; k <= m_max; ++k) {
      power = power * resolvent;
      const double v = operator_norm(power) * std::pow(zeta - gamma, k) / c;
      worst = std::max(worst, v);
    }
  }
  return worst;
}

inline double hille_yosida_probe(const GksLiouvillian& l, double gamma, double c,
                                 std::span<const double> zeta_grid, int m_max) {
  return hille_yosida_probe(l.superoperator(), gamma, c, zeta_grid, m_max);
}

struct StationaryStates {
  std::vector<ComplexMatrix> kernel;            // orthonormal basis of ker M, unvectorized
  std::vector<ComplexMatrix> hermitian_basis;   // Hermitian elements spanning the same space
  std::vector<ComplexMatrix> density_samples;   // trace-1 PSD members found by sampling
};

/// Stationary operators ker(M) and sampled density matrices within it.
inline StationaryStates stationary_states(const GksLiouvillian& l, double tol = tolerance::kernel,
                                          std::size_t samples = 200, std::uint64_t seed = 7) {
  if (!(tol > 0.0)) throw std::invalid_argument("stationary_states: tol must be positive");
  const std::size_t n = l.dim();
  StationaryStates out;
  for (const auto& v : kernel_basis(l.superoperator(), tol)) out.kernel.push_back(unvec(v, n));

  // M preserves Hermiticity, so ker M is closed under †; its Hermitian
  // part is spanned by (K + K†)/2 and (K - K†)/2i. Orthonormalize in the
  // real coordinates of Hermitian matrices.
  std::vector<std::vector<double>> ortho;
  auto add = [&](const ComplexMatrix& h) {
    auto x = hermitian_to_coords(h);
    for (const auto& q : ortho) {
      double d = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) d += q[k] * x[k];
      for (std::size_t k = 0; k < x.size(); ++k) x[k] -= d * q[k];
    }
    double norm = 0.0;
    for (double c : x) norm += c * c;
    norm = std::sqrt(norm);
    if (norm < 1e-8) return;
    for (double& c : x) c /= norm;
    ortho.push_back(std::move(x));
  };
  for (const auto& k : out.kernel) {
    add(hermitian_part(k));
    add((k - k.adjoint()) * complex{0.0, -0.5});
  }
  for (const auto& q : ortho) out.hermitian_basis.push_back(coords_to_hermitian(q, n));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto consider = [&](ComplexMatrix h) {
    const complex tr = h.trace();
    if (std::abs(tr) < 1e-9) return;
    h /= tr;
    if (min_eigenvalue(h) >= -1e-10) out.density_samples.push_back(std::move(h));
  };
  for (const auto& b : out.hermitian_basis) consider(b);
  for (std::size_t s = 0; s < samples; ++s) {
    ComplexMatrix h(n, n);
    for (const auto& b : out.hermitian_basis) h += gauss(rng) * b;
    consider(std::move(h));
  }
  return out;
}

/// -Σ p log p over eigenvalues above the cutoff (natural log), evaluated as
/// log N - D with D = (1/N) Σ [(1+q) log(1+q) - q] and q = N p / tr - 1.
/// Each term of D is nonnegative and its rounding error scales with |q|, so
/// the entropy neither overshoots log N nor jitters by an ulp near I/N.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  const auto values = hermitian_eigen(rho.hermitian()).values;
  const double n = static_cast<double>(values.size());
  double total = 0.0;
  for (double p : values) total += p;
  double divergence = 0.0;
  for (double p : values) {
    const double q = (n * p - total) / total;
    divergence += (p > tolerance::entropy_cutoff ? (1.0 + q) * std::log1p(q) : 0.0) - q;
  }
  return std::max(0.0, std::log(n) - divergence / n);
}

inline double expectation(const ComplexMatrix& observable, const ComplexMatrix& rho) {
  return (rho * observable).trace().real();
}

/// Default step 1e-3·min(1, 1/‖M‖).
inline double default_energy_flow_step(const GksLiouvillian& l) {
  const double norm = operator_norm(l.superoperator());
  return 1e-3 * std::min(1.0, norm > 0.0 ? 1.0 / norm : 1.0);
}

/// |central difference of tr(H ρ(t)) at t = 0 - tr(ρ D_H)|
inline double energy_flow_residual(const GksLiouvillian& l, const DensityMatrix& rho, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("energy_flow_residual: step must be positive");
  const ComplexMatrix& h = l.hamiltonian().matrix();
  const ComplexMatrix& m = l.superoperator();
  const auto v = vec(rho.matrix());
  const ComplexMatrix fwd = unvec(expm(m, dt) * std::span<const complex>(v), l.dim());
  const ComplexMatrix bwd = unvec(expm(m, -dt) * std::span<const complex>(v), l.dim());
  const double fd = (expectation(h, fwd) - expectation(h, bwd)) / (2.0 * dt);
  const double predicted = expectation(dissipation_operator(l).matrix(), rho.matrix());
  return std::abs(fd - predicted);
}

struct ReversalWitness {
  double time = 0.0;
  double choi_min_eigenvalue = 0.0;
};

/// Searches t_grid for a time where exp(tM)^{-1} = exp(-tM) is not completely
/// positive. A hit certifies that Γ_t has no inverse on the state space, which
/// rules out any time-reversing map; no hit certifies nothing.
inline std::optional<ReversalWitness> time_reversal_witness(const GksLiouvillian& l,
                                                            std::span<const double> t_grid,
                                                            double tol = 1e-9) {
  for (double t : t_grid) {
    const Propagator inv(l.dim(), -t, expm(l.superoperator(), -t));
    const ComplexMatrix c = choi_matrix(inv);
    const double lo = detail::jacobi_eigen(hermitian_part(c)).values.front();
    if (lo < -tol * std::max(1.0, c.max_abs())) return ReversalWitness{t, lo};
  }
  return std::nullopt;
}

}  // namespace dqs
