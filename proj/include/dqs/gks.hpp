#pragma once

// Gorini-Kossakowski-Sudarshan standard form of a finite-dimensional
// Liouvillian:
//
//   L(σ) = -i[H, σ] + Σ_{i,j<N²} a_ij (F_i σ F_j† - ½ {F_j† F_i, σ})
//
// with (F_j) trace-orthonormal, F_{N²} = I/√N, and (a_ij) Hermitian PSD.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dqs/linalg.hpp"
#include "dqs/matrix.hpp"

namespace dqs {

/// Trace-orthonormal operator basis F_1..F_{N²} with F_{N²} = I/√N.
class OperatorBasis {
 public:
  OperatorBasis() = default;

  OperatorBasis(std::size_t dim, std::vector<ComplexMatrix> elements, std::string name = "custom")
      : dim_(dim), elements_(std::move(elements)), name_(std::move(name)) {
    if (dim_ < 2) throw std::invalid_argument("OperatorBasis: dimension must be >= 2");
    if (elements_.size() != dim_ * dim_) {
      throw std::invalid_argument("OperatorBasis: expected " + std::to_string(dim_ * dim_) +
                                  " elements, got " + std::to_string(elements_.size()));
    }
    for (const auto& f : elements_) {
      if (f.rows() != dim_ || f.cols() != dim_)
        throw std::invalid_argument("OperatorBasis: element has wrong shape");
    }
    if (orthonormality_residual() > 1e-12) {
      throw std::invalid_argument("OperatorBasis: elements are not trace-orthonormal");
    }
    const ComplexMatrix scaled_identity =
        ComplexMatrix::identity(dim_) * (1.0 / std::sqrt(static_cast<double>(dim_)));
    if ((elements_.back() - scaled_identity).max_abs() > 1e-12) {
      throw std::invalid_argument("OperatorBasis: last element must be I/sqrt(N)");
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  /// N² - 1, the size of the Kossakowski matrix.
  std::size_t traceless_count() const noexcept { return dim_ * dim_ - 1; }
  std::size_t size() const noexcept { return elements_.size(); }
  const ComplexMatrix& operator[](std::size_t k) const { return elements_.at(k); }
  const std::vector<ComplexMatrix>& elements() const noexcept { return elements_; }
  const std::string& name() const noexcept { return name_; }

  /// max_ij |tr(F_i† F_j) - δ_ij|
  double orthonormality_residual() const {
    double r = 0.0;
    for (std::size_t i = 0; i < elements_.size(); ++i)
      for (std::size_t j = 0; j < elements_.size(); ++j) {
        const complex g = hs_inner(elements_[i], elements_[j]);
        r = std::max(r, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
    return r;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<ComplexMatrix> elements_;
  std::string name_;
};

/// Generalized Gell-Mann matrices with tr(F_i† F_j) = δ_ij, ordered: symmetric
/// off-diagonal, antisymmetric off-diagonal, diagonal, then I/√N.
/// For N = 2 this is (σ₁, σ₂, σ₃, I)/√2.
inline OperatorBasis gell_mann_basis(std::size_t n) {
  if (n < 2) throw std::invalid_argument("gell_mann_basis: dimension must be >= 2");
  const double r2 = 1.0 / std::sqrt(2.0);
  std::vector<ComplexMatrix> f;
  f.reserve(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      ComplexMatrix m(n, n);
      m(j, k) = r2;
      m(k, j) = r2;
      f.push_back(std::move(m));
    }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      ComplexMatrix m(n, n);
      m(j, k) = -kI * r2;
      m(k, j) = kI * r2;
      f.push_back(std::move(m));
    }
  for (std::size_t l = 1; l < n; ++l) {
    ComplexMatrix m(n, n);
    const double c = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (std::size_t k = 0; k < l; ++k) m(k, k) = c;
    m(l, l) = -static_cast<double>(l) * c;
    f.push_back(std::move(m));
  }
  f.push_back(ComplexMatrix::identity(n) * (1.0 / std::sqrt(static_cast<double>(n))));
  return OperatorBasis(n, std::move(f), "gell-mann");
}

// Real coordinates of a Hermitian n×n matrix: the n diagonal entries, then
// √2·Re and √2·Im of each upper-triangle entry. The map is an isometry from
// (Hermitian, Frobenius) to (ℝ^{n²}, Euclidean).
inline std::vector<double> hermitian_to_coords(const ComplexMatrix& a) {
  a.require_square("hermitian_to_coords");
  const std::size_t n = a.rows();
  const double s = std::sqrt(2.0);
  std::vector<double> x;
  x.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) x.push_back(a(i, i).real());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      x.push_back(s * a(i, j).real());
      x.push_back(s * a(i, j).imag());
    }
  return x;
}

inline ComplexMatrix coords_to_hermitian(std::span<const double> x, std::size_t n) {
  if (x.size() != n * n) throw std::invalid_argument("coords_to_hermitian: length mismatch");
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix a(n, n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) a(i, i) = x[k++];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const complex z{s * x[k], s * x[k + 1]};
      k += 2;
      a(i, j) = z;
      a(j, i) = std::conj(z);
    }
  return a;
}

/// Hermitian PSD coefficient matrix (a_ij) of size (N²-1)×(N²-1).
class KossakowskiMatrix {
 public:
  KossakowskiMatrix() = default;

  KossakowskiMatrix(std::size_t dim, ComplexMatrix a, double psd_tol = tolerance::psd)
      : dim_(dim), a_(std::move(a)) {
    const std::size_t n = dim_ * dim_ - 1;
    if (dim_ < 2 || a_.rows() != n || a_.cols() != n) {
      throw std::invalid_argument("KossakowskiMatrix: expected " + std::to_string(n) + "x" +
                                  std::to_string(n) + " for N = " + std::to_string(dim_));
    }
    if (!a_.all_finite()) throw std::invalid_argument("KossakowskiMatrix: non-finite entry");
    if (hermiticity_residual(a_) > 1e-12 * std::max(1.0, a_.max_abs())) {
      throw std::invalid_argument("KossakowskiMatrix: not Hermitian (residual " +
                                  std::to_string(hermiticity_residual(a_)) + ")");
    }
    const double lo = min_eigenvalue(a_);
    if (lo < -psd_tol * std::max(1.0, a_.frobenius_norm())) {
      throw std::invalid_argument("KossakowskiMatrix: not positive semidefinite (min eigenvalue " +
                                  std::to_string(lo) + ")");
    }
  }

  static KossakowskiMatrix zero(std::size_t dim) {
    return KossakowskiMatrix(dim, ComplexMatrix(dim * dim - 1, dim * dim - 1));
  }

  std::size_t dim() const noexcept { return dim_; }
  const ComplexMatrix& matrix() const noexcept { return a_; }

 private:
  std::size_t dim_ = 0;
  ComplexMatrix a_;
};

/// Converts qubit coefficients written against unnormalized Pauli matrices
/// (Σ c_ij σ_i ρ σ_j†) to the normalized basis σ_i/√2, i.e. a = 2c.
inline KossakowskiMatrix kossakowski_from_pauli(const ComplexMatrix& pauli_coefficients) {
  return KossakowskiMatrix(2, pauli_coefficients * 2.0);
}

namespace detail {

inline void require_compatible(std::size_t basis_dim, const ComplexMatrix& coeffs,
                               const ComplexMatrix& sigma, const char* what) {
  const std::size_t n = basis_dim * basis_dim - 1;
  if (coeffs.rows() != n || coeffs.cols() != n) {
    throw std::invalid_argument(std::string(what) + ": coefficient matrix does not match basis");
  }
  if (sigma.rows() != basis_dim || sigma.cols() != basis_dim) {
    throw std::invalid_argument(std::string(what) + ": operator dimension " +
                                std::to_string(sigma.rows()) + "x" +
                                std::to_string(sigma.cols()) + " does not match N = " +
                                std::to_string(basis_dim));
  }
}

// G = Σ a_ij F_j† F_i
inline ComplexMatrix anticommutator_kernel(const ComplexMatrix& coeffs, const OperatorBasis& basis) {
  const std::size_t n = basis.traceless_count();
  ComplexMatrix g(basis.dim(), basis.dim());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const complex aij = coeffs(i, j);
      if (aij == complex{}) continue;
      g += aij * (basis[j].adjoint() * basis[i]);
    }
  return g;
}

inline ComplexMatrix dissipator_unchecked(const ComplexMatrix& coeffs, const OperatorBasis& basis,
                                          const ComplexMatrix& sigma) {
  const std::size_t n = basis.traceless_count();
  ComplexMatrix out(basis.dim(), basis.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const ComplexMatrix fs = basis[i] * sigma;
    for (std::size_t j = 0; j < n; ++j) {
      const complex aij = coeffs(i, j);
      if (aij == complex{}) continue;
      out += aij * (fs * basis[j].adjoint());
    }
  }
  const ComplexMatrix g = anticommutator_kernel(coeffs, basis);
  out -= 0.5 * anticommutator(g, sigma);
  return out;
}

// Σ a_ij (F_j† X F_i - ½ F_j†F_i X - ½ X F_j†F_i)
inline ComplexMatrix dual_dissipator_unchecked(const ComplexMatrix& coeffs,
                                               const OperatorBasis& basis, const ComplexMatrix& x) {
  const std::size_t n = basis.traceless_count();
  ComplexMatrix out(basis.dim(), basis.dim());
  for (std::size_t j = 0; j < n; ++j) {
    const ComplexMatrix fx = basis[j].adjoint() * x;
    for (std::size_t i = 0; i < n; ++i) {
      const complex aij = coeffs(i, j);
      if (aij == complex{}) continue;
      out += aij * (fx * basis[i]);
    }
  }
  const ComplexMatrix g = anticommutator_kernel(coeffs, basis);
  out -= 0.5 * anticommutator(g, x);
  return out;
}

}  // namespace detail

/// D(σ) = Σ a_ij (F_i σ F_j† - ½ (F_j†F_i σ + σ F_j†F_i)).
inline ComplexMatrix dissipator_apply(const KossakowskiMatrix& a, const OperatorBasis& basis,
                                      const ComplexMatrix& sigma) {
  if (a.dim() != basis.dim()) throw std::invalid_argument("dissipator_apply: dimension mismatch");
  detail::require_compatible(basis.dim(), a.matrix(), sigma, "dissipator_apply");
  return detail::dissipator_unchecked(a.matrix(), basis, sigma);
}

/// Liouvillian in standard form with its vectorized superoperator cached at construction.
class GksLiouvillian {
 public:
  GksLiouvillian(HermitianMatrix hamiltonian, KossakowskiMatrix kossakowski, OperatorBasis basis)
      : h_(std::move(hamiltonian)), a_(std::move(kossakowski)), basis_(std::move(basis)) {
    if (h_.dim() != basis_.dim() || a_.dim() != basis_.dim()) {
      throw std::invalid_argument("GksLiouvillian: Hamiltonian (N = " + std::to_string(h_.dim()) +
                                  "), Kossakowski (N = " + std::to_string(a_.dim()) +
                                  ") and basis (N = " + std::to_string(basis_.dim()) +
                                  ") disagree");
    }
    superop_ = assemble();
  }

  GksLiouvillian(HermitianMatrix hamiltonian, KossakowskiMatrix kossakowski)
      : GksLiouvillian(hamiltonian, std::move(kossakowski), gell_mann_basis(hamiltonian.dim())) {}

  std::size_t dim() const noexcept { return basis_.dim(); }
  const HermitianMatrix& hamiltonian() const noexcept { return h_; }
  const KossakowskiMatrix& kossakowski() const noexcept { return a_; }
  const OperatorBasis& basis() const noexcept { return basis_; }
  /// N²×N² matrix acting on column-stacked vec(σ).
  const ComplexMatrix& superoperator() const noexcept { return superop_; }

 private:
  ComplexMatrix assemble() const {
    const std::size_t n = basis_.dim();
    const std::size_t m = basis_.traceless_count();
    const ComplexMatrix id = ComplexMatrix::identity(n);
    const ComplexMatrix& h = h_.matrix();
    // vec(AXB) = (Bᵀ ⊗ A) vec(X)
    ComplexMatrix s = -kI * kron(id, h) + kI * kron(h.transpose(), id);
    const ComplexMatrix& a = a_.matrix();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const complex aij = a(i, j);
        if (aij == complex{}) continue;
        s += aij * kron(basis_[j].conj(), basis_[i]);
      }
    const ComplexMatrix g = detail::anticommutator_kernel(a, basis_);
    s -= 0.5 * (kron(id, g) + kron(g.transpose(), id));
    return s;
  }

  HermitianMatrix h_;
  KossakowskiMatrix a_;
  OperatorBasis basis_;
  ComplexMatrix superop_;
};

/// -i[H, σ] + D(σ)
inline ComplexMatrix liouvillian_apply(const GksLiouvillian& l, const ComplexMatrix& sigma) {
  detail::require_compatible(l.dim(), l.kossakowski().matrix(), sigma, "liouvillian_apply");
  return -kI * commutator(l.hamiltonian().matrix(), sigma) +
         detail::dissipator_unchecked(l.kossakowski().matrix(), l.basis(), sigma);
}

inline const ComplexMatrix& liouvillian_matrix(const GksLiouvillian& l) {
  return l.superoperator();
}

/// Dissipation operator D_H = Σ a_ij (F_j† H F_i - ½ F_j†F_i H - ½ H F_j†F_i).
/// tr(ρ D_H) is the instantaneous rate of change of ⟨H⟩.
inline HermitianMatrix dissipation_operator(const HermitianMatrix& h, const KossakowskiMatrix& a,
                                            const OperatorBasis& basis) {
  detail::require_compatible(basis.dim(), a.matrix(), h.matrix(), "dissipation_operator");
  return HermitianMatrix(detail::dual_dissipator_unchecked(a.matrix(), basis, h.matrix()), 1e-11);
}

inline HermitianMatrix dissipation_operator(const GksLiouvillian& l) {
  return dissipation_operator(l.hamiltonian(), l.kossakowski(), l.basis());
}

struct DispersivenessVerdict {
  bool dispersive = false;
  double residual = 0.0;   // ‖D_H‖_F
  double threshold = 0.0;  // tol·max(1, ‖H‖_F)
};

/// Dispersive iff ‖D_H‖ ≤ tol·max(1, ‖H‖) (Frobenius norms).
inline DispersivenessVerdict is_dispersive(const GksLiouvillian& l, double tol = 1e-10) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_dispersive: tol must be positive");
  const double r = dissipation_operator(l).matrix().frobenius_norm();
  const double thr = tol * std::max(1.0, l.hamiltonian().matrix().frobenius_norm());
  return {r <= thr, r, thr};
}

inline ComplexMatrix traceless_part(const ComplexMatrix& h) {
  h.require_square("traceless_part");
  return h - ComplexMatrix::identity(h.rows()) * (h.trace() / static_cast<double>(h.rows()));
}

struct KernelOptions {
  double tol = tolerance::kernel;
  double psd_tol = 1e-8;
  std::size_t random_samples = 1000;
  std::uint64_t seed = 0x5eed2011;
};

/// Real-linear space of Hermitian (a_ij) with D_H = 0, plus PSD elements found by sampling.
struct KossakowskiKernel {
  std::vector<ComplexMatrix> basis;          // Frobenius-orthonormal Hermitian matrices
  std::vector<ComplexMatrix> psd_elements;   // unit-Frobenius PSD samples
  std::size_t samples_checked = 0;
  double max_self_check_residual = 0.0;      // max ‖D_H(a)‖ over the basis
  ComplexMatrix map;                         // Φ, real N² × (N²-1)² stored as complex
};

/// Orthogonal projection of a Hermitian matrix onto span(basis) (Frobenius-orthonormal).
inline ComplexMatrix project_onto(const std::vector<ComplexMatrix>& basis, const ComplexMatrix& x) {
  ComplexMatrix p(x.rows(), x.cols());
  for (const auto& b : basis) p += hs_inner(b, x).real() * b;
  return p;
}

/// Solves D_H(a) = 0 over Hermitian a via the kernel of the real-linear map
/// Φ: a ↦ D_H, then samples the kernel for PSD elements.
inline KossakowskiKernel dispersive_kossakowski_kernel(const HermitianMatrix& h,
                                                       const OperatorBasis& basis,
                                                       const KernelOptions& opt = {}) {
  if (h.dim() != basis.dim()) throw std::invalid_argument("dispersive_kossakowski_kernel: dimension mismatch");
  const std::size_t n = basis.dim();
  const std::size_t m = basis.traceless_count();
  const std::size_t in_dim = m * m;
  const std::size_t out_dim = n * n;

  KossakowskiKernel out;
  out.map = ComplexMatrix(out_dim, in_dim);
  std::vector<double> e(in_dim, 0.0);
  for (std::size_t k = 0; k < in_dim; ++k) {
    std::fill(e.begin(), e.end(), 0.0);
    e[k] = 1.0;
    const ComplexMatrix a = coords_to_hermitian(e, m);
    const auto y = hermitian_to_coords(detail::dual_dissipator_unchecked(a, basis, h.matrix()));
    for (std::size_t r = 0; r < out_dim; ++r) out.map(r, k) = y[r];
  }

  for (auto v : kernel_basis(out.map, opt.tol)) {
    // Φ is real, so each kernel vector is real up to a global phase.
    std::size_t big = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
      if (std::abs(v[k]) > std::abs(v[big])) big = k;
    const complex phase = std::conj(v[big]) / std::abs(v[big]);
    std::vector<double> x(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) x[k] = (v[k] * phase).real();
    // Renormalize after dropping the imaginary round-off.
    double norm = 0.0;
    for (double c : x) norm += c * c;
    norm = std::sqrt(norm);
    for (double& c : x) c /= norm;
    out.basis.push_back(coords_to_hermitian(x, m));
  }
  for (const auto& a : out.basis) {
    out.max_self_check_residual =
        std::max(out.max_self_check_residual,
                 detail::dual_dissipator_unchecked(a, basis, h.matrix()).frobenius_norm());
  }

  auto check = [&](ComplexMatrix a) {
    const double norm = a.frobenius_norm();
    if (norm < 1e-12) return;
    a *= 1.0 / norm;
    ++out.samples_checked;
    if (min_eigenvalue(a) >= -opt.psd_tol) out.psd_elements.push_back(std::move(a));
  };

  if (out.basis.empty()) return out;
  for (const auto& b : out.basis) {
    check(b);
    check(-b);
  }
  // Projections of diagonal matrix units onto the kernel.
  for (std::size_t k = 0; k < m; ++k) check(project_onto(out.basis, ComplexMatrix::unit(m, k, k)));

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  for (std::size_t s = 0; s < opt.random_samples; ++s) {
    ComplexMatrix a(m, m);
    for (const auto& b : out.basis) a += gauss(rng) * b;
    check(std::move(a));
  }
  // Projections of random rank-one PSD matrices.
  for (std::size_t s = 0; s < opt.random_samples; ++s) {
    std::vector<complex> v(m);
    for (auto& z : v) z = complex{gauss(rng), gauss(rng)};
    check(project_onto(out.basis, outer(v, v)));
  }
  return out;
}

/// V_k = √κ_k Σ_i U_ik F_i from a = U diag(κ) U†, dropping κ_k ≤ psd_tol.
inline std::vector<ComplexMatrix> lindblad_operators(const KossakowskiMatrix& a,
                                                     const OperatorBasis& basis,
                                                     double psd_tol = tolerance::psd) {
  if (a.dim() != basis.dim()) throw std::invalid_argument("lindblad_operators: dimension mismatch");
  const auto eig = hermitian_eigen(a.matrix());
  const double scale = std::max(1.0, a.matrix().frobenius_norm());
  if (eig.values.front() < -psd_tol * scale) {
    throw std::invalid_argument("lindblad_operators: Kossakowski matrix is not PSD (min eigenvalue " +
                                std::to_string(eig.values.front()) + ")");
  }
  std::vector<ComplexMatrix> ops;
  const std::size_t m = basis.traceless_count();
  for (std::size_t k = m; k-- > 0;) {
    const double kappa = eig.values[k];
    if (kappa <= psd_tol * scale) continue;
    ComplexMatrix v(basis.dim(), basis.dim());
    for (std::size_t i = 0; i < m; ++i) v += eig.vectors(i, k) * basis[i];
    ops.push_back(v * std::sqrt(kappa));
  }
  return ops;
}

/// Σ_k (V_k σ V_k† - ½ {V_k†V_k, σ})
inline ComplexMatrix lindblad_dissipator_apply(const std::vector<ComplexMatrix>& ops,
                                               const ComplexMatrix& sigma) {
  ComplexMatrix out(sigma.rows(), sigma.cols());
  for (const auto& v : ops) {
    const ComplexMatrix vd = v.adjoint();
    out += v * sigma * vd;
    out -= 0.5 * anticommutator(vd * v, sigma);
  }
  return out;
}

}  // namespace dqs
