#pragma once

// Closed-form dispersive qubit. Basis ordering is {|E1⟩, |E0⟩}, higher
// energy first, so H = diag(E1, E0) and the coherence ρ₁₂ rotates as
// e^{-(λ + iΔ)t}.

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "dqs/gks.hpp"
#include "dqs/linalg.hpp"
#include "dqs/matrix.hpp"

namespace dqs::qubit {

struct DispersiveQubitParams {
  double e0 = 0.0;
  double e1 = 1.0;
  double lambda = 0.0;  // dispersive parameter

  double gap() const { return e1 - e0; }

  void validate() const {
    if (!(e1 > e0)) throw std::invalid_argument("DispersiveQubitParams: need E0 < E1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("DispersiveQubitParams: lambda must be >= 0");
  }
};

/// ρ = [[a, b], [b̄, 1 - a]]
struct QubitBloch {
  double a = 1.0;
  complex b{0.0, 0.0};

  bool valid(double tol = 1e-12) const {
    return a >= -tol && a <= 1.0 + tol && a * (1.0 - a) >= std::norm(b) - tol;
  }

  ComplexMatrix matrix() const { return ComplexMatrix{{a, b}, {std::conj(b), 1.0 - a}}; }
};

/// Observable with eigenvalues x1 ≥ x2 whose eigenbasis is rotated by θ
/// from the energy basis: |x1⟩ = (cos θ, sin θ), |x2⟩ = (-sin θ, cos θ).
struct AngleObservable {
  double x1 = 1.0;
  double x2 = 0.0;
  double theta = 0.0;

  void validate() const {
    if (!(x1 >= x2)) throw std::invalid_argument("AngleObservable: need x1 >= x2");
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2))
      throw std::invalid_argument("AngleObservable: theta must lie in [0, pi/2]");
  }
};

inline ComplexMatrix hamiltonian(const DispersiveQubitParams& p) {
  return ComplexMatrix::diagonal({p.e1, p.e0});
}

/// Kossakowski matrix ½λ δ_i3 δ_j3 in unnormalized Pauli coefficients,
/// returned in the normalized Gell-Mann basis (λ e₃e₃ᵀ).
inline KossakowskiMatrix kossakowski(double lambda) {
  ComplexMatrix c(3, 3);
  c(2, 2) = 0.5 * lambda;
  return kossakowski_from_pauli(c);
}

inline GksLiouvillian liouvillian(const DispersiveQubitParams& p) {
  p.validate();
  return GksLiouvillian(HermitianMatrix(hamiltonian(p)), kossakowski(p.lambda), gell_mann_basis(2));
}

inline ComplexMatrix evolve_closed_form(const DispersiveQubitParams& p, const QubitBloch& s, double t) {
  const complex decay = std::exp(-complex{p.lambda, p.gap()} * t);
  return ComplexMatrix{{s.a, s.b * decay}, {std::conj(s.b) * std::conj(decay), 1.0 - s.a}};
}

inline ComplexMatrix observable_matrix(const AngleObservable& x) {
  x.validate();
  const double c = std::cos(x.theta);
  const double s = std::sin(x.theta);
  const double off = (x.x1 - x.x2) * s * c;
  return ComplexMatrix{{x.x1 * c * c + x.x2 * s * s, off}, {off, x.x1 * s * s + x.x2 * c * c}};
}

/// P(x1 → x2; t) = [½ - e^{-λt}(½ - sin²(Δt/2))] sin²(2θ)
inline double transition_probability(const DispersiveQubitParams& p, double theta, double t) {
  const double s = std::sin(0.5 * p.gap() * t);
  const double s2 = std::sin(2.0 * theta);
  return (0.5 - std::exp(-p.lambda * t) * (0.5 - s * s)) * s2 * s2;
}

inline double surviving_probability(const DispersiveQubitParams& p, double theta, double t) {
  return 1.0 - transition_probability(p, theta, t);
}

/// tr(X ρ(t)) evaluated from the matrices.
inline double expectation_value(const DispersiveQubitParams& p, const AngleObservable& x,
                                const QubitBloch& s, double t) {
  return (observable_matrix(x) * evolve_closed_form(p, s, t)).trace().real();
}

/// Largest τ for which the backward continuation ρ(-τ) stays PSD:
/// det ρ(-τ) = a(1-a) - |b|² e^{2λτ} = 0  ⇒  τ* = ln(a(1-a)/|b|²) / 2λ.
/// Empty when the backward flow never leaves the state space.
inline std::optional<double> positivity_horizon(const QubitBloch& s, double lambda) {
  if (!s.valid()) throw std::invalid_argument("positivity_horizon: invalid qubit state");
  if (lambda <= 0.0 || std::abs(s.b) == 0.0 || s.a <= 0.0 || s.a >= 1.0) return std::nullopt;
  const double ratio = s.a * (1.0 - s.a) / std::norm(s.b);
  return std::max(0.0, std::log(ratio) / (2.0 * lambda));
}

}  // namespace dqs::qubit
