#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dqs/matrix.hpp"

namespace dqs {

/// Default relative tolerances shared by the library.
namespace tolerance {
inline constexpr double hermiticity = 1e-10;
inline constexpr double psd = 1e-10;
inline constexpr double kernel = 1e-9;
inline constexpr double trace = 1e-12;
inline constexpr double entropy_cutoff = 1e-14;
}  // namespace tolerance

inline bool is_hermitian(const ComplexMatrix& a, double tol = tolerance::hermiticity) {
  if (!a.is_square()) return false;
  return hermiticity_residual(a) <= tol * std::max(1.0, a.max_abs());
}

/// Square matrix equal to its adjoint within the hermiticity tolerance.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(ComplexMatrix m, double tol = tolerance::hermiticity)
      : m_(std::move(m)) {
    m_.require_square("HermitianMatrix");
    if (!m_.all_finite()) throw std::invalid_argument("HermitianMatrix: non-finite entry");
    if (!is_hermitian(m_, tol)) {
      throw std::invalid_argument("HermitianMatrix: |A - A^dagger|_max = " +
                                  std::to_string(hermiticity_residual(m_)) +
                                  " exceeds tolerance");
    }
  }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // unitary, column k pairs with values[k]
};

namespace detail {

inline double offdiag_frobenius(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Cyclic complex Jacobi. `a` must be exactly Hermitian on entry.
inline EigenDecomposition jacobi_eigen(ComplexMatrix a) {
  const std::size_t n = a.rows();
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = a.frobenius_norm();
  const double threshold = 1e-14 * scale;
  constexpr int kMaxSweeps = 100;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (offdiag_frobenius(a) <= threshold) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = std::abs(a(p, q));
        if (apq == 0.0 || apq <= 1e-300) continue;
        const complex phase = a(p, q) / apq;  // e^{iφ}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J = Φ R with Φ_qq = e^{-iφ}: J_pp = c, J_pq = s, J_qp = -s e^{-iφ}, J_qq = c e^{-iφ}.
        const complex jpp = c;
        const complex jpq = s;
        const complex jqp = -s * std::conj(phase);
        const complex jqq = c * std::conj(phase);
        // a <- a J (columns p, q)
        for (std::size_t k = 0; k < n; ++k) {
          const complex akp = a(k, p);
          const complex akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        // a <- J† a (rows p, q)
        for (std::size_t k = 0; k < n; ++k) {
          const complex apk = a(p, k);
          const complex aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const complex vkp = v(k, p);
          const complex vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });
  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

}  // namespace detail

/// Eigendecomposition A = U diag(λ) U† of a Hermitian matrix, eigenvalues ascending.
inline EigenDecomposition hermitian_eigen(const HermitianMatrix& a) {
  return detail::jacobi_eigen(hermitian_part(a.matrix()));
}

inline EigenDecomposition hermitian_eigen(const ComplexMatrix& a) {
  return hermitian_eigen(HermitianMatrix(a));
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  return hermitian_eigen(a).values;
}

struct SingularSystem {
  std::vector<double> values;  // descending
  ComplexMatrix right_vectors; // column k pairs with values[k]
};

/// Singular values and right singular vectors from the eigensystem of A†A.
/// Each σ_k is re-evaluated as ‖A v_k‖ so that small singular values keep
/// absolute accuracy ~ε‖A‖ instead of ~√ε‖A‖.
inline SingularSystem singular_system(const ComplexMatrix& a) {
  const ComplexMatrix gram = a.adjoint() * a;
  auto eig = detail::jacobi_eigen(hermitian_part(gram));
  const std::size_t n = a.cols();
  SingularSystem out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = n - 1 - k;
    const auto v = column(eig.vectors, src);
    out.values[k] = vector_norm(a * std::span<const complex>(v));
    for (std::size_t i = 0; i < n; ++i) out.right_vectors(i, k) = v[i];
  }
  return out;
}

inline std::vector<double> singular_values(const ComplexMatrix& a) {
  auto s = singular_system(a).values;
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

/// Spectral (operator 2-) norm.
inline double operator_norm(const ComplexMatrix& a) {
  if (a.empty()) return 0.0;
  const auto s = singular_values(a);
  return s.front();
}

/// tr√(A†A), the sum of singular values.
inline double trace_norm(const ComplexMatrix& a) {
  a.require_square("trace_norm");
  const auto s = singular_values(a);
  return std::accumulate(s.begin(), s.end(), 0.0);
}

/// Orthonormal basis of { v : ‖Mv‖ ≤ tol·‖M‖·‖v‖ } by singular value thresholding.
inline std::vector<std::vector<complex>> kernel_basis(const ComplexMatrix& m,
                                                      double tol = tolerance::kernel) {
  if (!(tol > 0.0)) throw std::invalid_argument("kernel_basis: tol must be positive");
  const std::size_t n = m.cols();
  std::vector<std::vector<complex>> basis;
  if (n == 0) return basis;
  const auto sys = singular_system(m);
  const double largest = *std::max_element(sys.values.begin(), sys.values.end());
  for (std::size_t k = 0; k < n; ++k) {
    if (largest == 0.0 || sys.values[k] <= tol * largest) {
      basis.push_back(column(sys.right_vectors, k));
    }
  }
  return basis;
}

/// min eigenvalue ≥ −tol·max(1, ‖A‖).
inline bool is_psd(const HermitianMatrix& a, double tol = tolerance::psd) {
  const auto eig = hermitian_eigen(a);
  const double norm = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  return eig.values.front() >= -tol * std::max(1.0, norm);
}

inline bool is_psd(const ComplexMatrix& a, double tol = tolerance::psd) {
  return is_psd(HermitianMatrix(a), tol);
}

inline double min_eigenvalue(const ComplexMatrix& a) {
  return hermitian_eigen(a).values.front();
}

/// Positive semidefinite Hermitian matrix with unit trace.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  explicit DensityMatrix(ComplexMatrix m, double trace_tol = tolerance::trace,
                         double psd_tol = tolerance::psd)
      : h_(std::move(m)) {
    const complex tr = h_.matrix().trace();
    if (std::abs(tr - 1.0) > trace_tol) {
      throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr.real()) +
                                  (tr.imag() != 0.0 ? "+" + std::to_string(tr.imag()) + "i" : "") +
                                  " differs from 1");
    }
    const double lo = min_eigenvalue(h_.matrix());
    if (lo < -psd_tol) {
      throw std::invalid_argument("DensityMatrix: minimum eigenvalue " + std::to_string(lo) +
                                  " is negative");
    }
  }

  const ComplexMatrix& matrix() const noexcept { return h_.matrix(); }
  const HermitianMatrix& hermitian() const noexcept { return h_; }
  std::size_t dim() const noexcept { return h_.dim(); }

 private:
  HermitianMatrix h_;
};

/// LU factorization with partial pivoting, P A = L U packed in one matrix.
class LuDecomposition {
 public:
  explicit LuDecomposition(ComplexMatrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
    lu_.require_square("LuDecomposition");
    const std::size_t n = lu_.rows();
    std::iota(perm_.begin(), perm_.end(), 0);
    const double scale = std::max(lu_.max_abs(), 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          piv = i;
        }
      }
      if (best <= 1e-300 * scale || best == 0.0) {
        singular_ = true;
        continue;
      }
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        lu_(i, k) /= lu_(k, k);
        const complex f = lu_(i, k);
        if (f == complex{}) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  bool singular() const noexcept { return singular_; }

  ComplexMatrix solve(const ComplexMatrix& b) const {
    if (singular_) throw std::domain_error("LuDecomposition::solve: matrix is singular");
    const std::size_t n = lu_.rows();
    if (b.rows() != n) throw std::invalid_argument("LuDecomposition::solve: shape mismatch");
    ComplexMatrix x(n, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
      std::vector<complex> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        complex s = b(perm_[i], c);
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
        y[i] = s;
      }
      for (std::size_t ii = n; ii-- > 0;) {
        complex s = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * x(j, c);
        x(ii, c) = s / lu_(ii, ii);
      }
    }
    return x;
  }

 private:
  ComplexMatrix lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
};

inline ComplexMatrix inverse(const ComplexMatrix& a) {
  return LuDecomposition(a).solve(ComplexMatrix::identity(a.rows()));
}

/// exp(scale·A) by scaling and squaring with a diagonal [8/8] Padé approximant.
inline ComplexMatrix expm(const ComplexMatrix& a, double scale = 1.0) {
  a.require_square("expm");
  const std::size_t n = a.rows();
  ComplexMatrix x = a * scale;
  const double norm = x.one_norm();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    x *= std::ldexp(1.0, -squarings);
  }

  constexpr int q = 8;
  // c_k = (2q-k)! q! / ((2q)! k! (q-k)!)
  std::array<double, q + 1> c{};
  c[0] = 1.0;
  for (int k = 1; k <= q; ++k) {
    c[k] = c[k - 1] * static_cast<double>(q - k + 1) /
           (static_cast<double>(k) * static_cast<double>(2 * q - k + 1));
  }

  ComplexMatrix power = ComplexMatrix::identity(n);
  ComplexMatrix num = ComplexMatrix::identity(n);
  ComplexMatrix den = ComplexMatrix::identity(n);
  for (int k = 1; k <= q; ++k) {
    power = power * x;
    num += c[k] * power;
    den += ((k % 2 == 0) ? c[k] : -c[k]) * power;
  }
  ComplexMatrix r = LuDecomposition(den).solve(num);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

}  // namespace dqs
