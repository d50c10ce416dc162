#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dqs {

using complex = std::complex<double>;

inline constexpr complex kI{0.0, 1.0};

/// Dense complex matrix, row-major storage.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, complex{0.0, 0.0}) {}

  ComplexMatrix(std::initializer_list<std::initializer_list<complex>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) {
        throw std::invalid_argument("ComplexMatrix: ragged initializer list");
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const complex> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static ComplexMatrix diagonal(std::initializer_list<complex> d) {
    return diagonal(std::span<const complex>(d.begin(), d.size()));
  }

  /// Matrix unit E_ij (one at (i, j), zero elsewhere).
  static ComplexMatrix unit(std::size_t n, std::size_t i, std::size_t j) {
    ComplexMatrix m(n, n);
    m(i, j) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const complex& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<complex> data() noexcept { return data_; }
  std::span<const complex> data() const noexcept { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  ComplexMatrix conj() const {
    ComplexMatrix r = *this;
    for (auto& z : r.data_) z = std::conj(z);
    return r;
  }

  complex trace() const {
    require_square("trace");
    complex t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  /// Max absolute column sum (induced 1-norm).
  double one_norm() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
      best = std::max(best, s);
    }
    return best;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const complex& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o, "+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o, "-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexMatrix& operator*=(complex s) {
    for (auto& z : data_) z *= s;
    return *this;
  }
  ComplexMatrix& operator/=(complex s) {
    for (auto& z : data_) z /= s;
    return *this;
  }

  void require_square(const char* what) const {
    if (!is_square()) {
      throw std::invalid_argument(std::string(what) + ": matrix is " +
                                  std::to_string(rows_) + "x" + std::to_string(cols_) +
                                  ", expected square");
    }
  }

  void require_same_shape(const ComplexMatrix& o, const char* what) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                  std::to_string(rows_) + "x" + std::to_string(cols_) +
                                  " vs " + std::to_string(o.rows_) + "x" +
                                  std::to_string(o.cols_));
    }
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<complex> data_;
};

inline ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
inline ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
inline ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }
inline ComplexMatrix operator*(ComplexMatrix a, complex s) { return a *= s; }
inline ComplexMatrix operator*(complex s, ComplexMatrix a) { return a *= s; }
inline ComplexMatrix operator*(ComplexMatrix a, double s) { return a *= s; }
inline ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= s; }
inline ComplexMatrix operator/(ComplexMatrix a, complex s) { return a /= s; }

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matrix product: inner dimensions " +
                                std::to_string(a.cols()) + " and " +
                                std::to_string(b.rows()) + " differ");
  }
  ComplexMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const complex aik = a(i, k);
      if (aik == complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

inline std::vector<complex> operator*(const ComplexMatrix& a, std::span<const complex> v) {
  if (a.cols() != v.size()) {
    throw std::invalid_argument("matrix-vector product: dimension mismatch");
  }
  std::vector<complex> r(a.rows(), complex{});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r[i] += a(i, j) * v[j];
  return r;
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

inline ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b + b * a;
}

/// Kronecker product a ⊗ b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const complex aij = a(i, j);
      if (aij == complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return r;
}

/// Column-stacking vectorization: vec(X)[i + j*rows] = X(i, j).
/// With this convention vec(A X B) = (Bᵀ ⊗ A) vec(X).
inline std::vector<complex> vec(const ComplexMatrix& x) {
  std::vector<complex> v(x.rows() * x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j)
    for (std::size_t i = 0; i < x.rows(); ++i) v[i + j * x.rows()] = x(i, j);
  return v;
}

inline ComplexMatrix unvec(std::span<const complex> v, std::size_t rows) {
  if (rows == 0 || v.size() % rows != 0) {
    throw std::invalid_argument("unvec: length " + std::to_string(v.size()) +
                                " is not a multiple of " + std::to_string(rows));
  }
  const std::size_t cols = v.size() / rows;
  ComplexMatrix x(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) x(i, j) = v[i + j * rows];
  return x;
}

/// Hilbert-Schmidt inner product tr(a† b).
inline complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  a.require_same_shape(b, "hs_inner");
  complex s{};
  auto da = a.data();
  auto db = b.data();
  for (std::size_t k = 0; k < da.size(); ++k) s += std::conj(da[k]) * db[k];
  return s;
}

/// max |A - A†|.
inline double hermiticity_residual(const ComplexMatrix& a) {
  a.require_square("hermiticity_residual");
  double r = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      r = std::max(r, std::abs(a(i, j) - std::conj(a(j, i))));
  return r;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

inline std::vector<complex> column(const ComplexMatrix& a, std::size_t j) {
  std::vector<complex> c(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) c[i] = a(i, j);
  return c;
}

inline double vector_norm(std::span<const complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

/// |v⟩⟨w|
inline ComplexMatrix outer(std::span<const complex> v, std::span<const complex> w) {
  ComplexMatrix r(v.size(), w.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) r(i, j) = v[i] * std::conj(w[j]);
  return r;
}

/// Pauli matrices σ₁, σ₂, σ₃ (index 1..3) and σ₀ = I.
inline ComplexMatrix pauli(int k) {
  switch (k) {
    case 0: return ComplexMatrix{{1.0, 0.0}, {0.0, 1.0}};
    case 1: return ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}};
    case 2: return ComplexMatrix{{0.0, -kI}, {kI, 0.0}};
    case 3: return ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}};
    default: throw std::invalid_argument("pauli: index must be 0..3");
  }
}

}  // namespace dqs
