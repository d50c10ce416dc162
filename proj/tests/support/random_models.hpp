#pragma once

// Seeded generators for property tests and the acceptance suite.

#include <cmath>
#include <cstdint>
#include <random>

#include "dqs/gks.hpp"
#include "dqs/linalg.hpp"
#include "dqs/matrix.hpp"

namespace dqs::testing {

class RandomModels {
 public:
  explicit RandomModels(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double gauss() { return normal_(rng_); }
  complex cgauss() { return {normal_(rng_), normal_(rng_)}; }
  std::mt19937_64& engine() { return rng_; }

  ComplexMatrix matrix(std::size_t rows, std::size_t cols, double scale = 1.0) {
    ComplexMatrix m(rows, cols);
    for (auto& z : m.data()) z = scale * cgauss();
    return m;
  }

  ComplexMatrix hermitian(std::size_t n, double scale = 1.0) {
    return hermitian_part(matrix(n, n, scale));
  }

  /// B B† with B of size n × rank.
  ComplexMatrix psd(std::size_t n, std::size_t rank, double scale = 1.0) {
    const ComplexMatrix b = matrix(n, rank, scale);
    return b * b.adjoint();
  }

  DensityMatrix density(std::size_t n) {
    ComplexMatrix p = psd(n, n);
    p /= p.trace();
    return DensityMatrix(hermitian_part(p));
  }

  /// Pure state |ψ⟩⟨ψ|.
  DensityMatrix pure_density(std::size_t n) {
    std::vector<complex> v(n);
    for (auto& z : v) z = cgauss();
    const double norm = vector_norm(v);
    for (auto& z : v) z /= norm;
    return DensityMatrix(outer(v, v));
  }

  KossakowskiMatrix kossakowski(std::size_t n, double scale = 0.3) {
    const std::size_t m = n * n - 1;
    const std::size_t rank = 1 + static_cast<std::size_t>(uniform(0.0, static_cast<double>(m)));
    return KossakowskiMatrix(n, hermitian_part(psd(m, std::min(rank, m), scale)));
  }

  /// Hamiltonian with ‖H‖ of order `h_scale`, Kossakowski matrix with entries of order
  /// `a_scale`².
  GksLiouvillian liouvillian(std::size_t n, double h_scale = 0.5, double a_scale = 0.3) {
    return GksLiouvillian(HermitianMatrix(hermitian(n, h_scale)), kossakowski(n, a_scale),
                          gell_mann_basis(n));
  }

  /// Random generator rescaled (H and a together) so that ‖M‖₂ = target_norm.
  GksLiouvillian normalized_liouvillian(std::size_t n, double target_norm = 1.0) {
    const auto raw = liouvillian(n);
    const double s = target_norm / operator_norm(raw.superoperator());
    return GksLiouvillian(HermitianMatrix(raw.hamiltonian().matrix() * s),
                          KossakowskiMatrix(n, raw.kossakowski().matrix() * s), raw.basis());
  }

  /// Random dispersive generator: Lindblad operators V_k diagonal in the
  /// eigenbasis of H (so [V_k, H] = 0), traceless, converted to Kossakowski
  /// coefficients a_ij = Σ_k c_ki conj(c_kj) with c_ki = tr(F_i† V_k).
  GksLiouvillian dispersive_liouvillian(std::size_t n, double h_scale = 0.5, double v_scale = 0.3) {
    const ComplexMatrix h = hermitian(n, h_scale);
    const auto eig = hermitian_eigen(h);
    const auto basis = gell_mann_basis(n);
    const std::size_t m = n * n - 1;
    ComplexMatrix a(m, m);
    const std::size_t count = 1 + static_cast<std::size_t>(uniform(0.0, static_cast<double>(n)));
    for (std::size_t k = 0; k < count; ++k) {
      std::vector<complex> d(n);
      complex mean{};
      for (auto& z : d) {
        z = v_scale * cgauss();
        mean += z;
      }
      for (auto& z : d) z -= mean / static_cast<double>(n);
      const ComplexMatrix v = eig.vectors * ComplexMatrix::diagonal(d) * eig.vectors.adjoint();
      std::vector<complex> c(m);
      for (std::size_t i = 0; i < m; ++i) c[i] = hs_inner(basis[i], v);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) += c[i] * std::conj(c[j]);
    }
    return GksLiouvillian(HermitianMatrix(h), KossakowskiMatrix(n, hermitian_part(a)), basis);
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

}  // namespace dqs::testing
