#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "repkit/error.hpp"
#include "repkit/tolerance.hpp"

namespace repkit {

using Complex = std::complex<double>;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class T>
constexpr T conj_value(const T& x) {
  if constexpr (is_complex<T>::value) {
    return std::conj(x);
  } else {
    return x;
  }
}

template <class T>
constexpr double real_value(const T& x) {
  if constexpr (is_complex<T>::value) {
    return x.real();
  } else {
    return x;
  }
}

template <class T>
constexpr bool is_finite_value(const T& x) {
  if constexpr (is_complex<T>::value) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  } else {
    return std::isfinite(x);
  }
}

/// Dense row-major matrix. Value semantics; all algorithms below take it by
/// const reference and return fresh matrices.
template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) {
        throw Error(ErrorKind::ShapeMismatch, "ragged matrix initializer");
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  static Matrix diagonal(const std::vector<T>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const T> values() const noexcept { return data_; }
  std::span<T> values() noexcept { return data_; }

  Matrix adjoint() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = conj_value((*this)(i, j));
    return out;
  }

  Matrix transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  T trace() const {
    T acc{};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) acc += (*this)(i, i);
    return acc;
  }

  /// Largest entry modulus (the max norm used for every residual).
  double max_abs() const {
    double m = 0.0;
    for (const T& x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (const T& x : data_) s += std::norm(Complex(x));
    return std::sqrt(s);
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) { return is_finite_value(x); });
  }

  Matrix column(std::size_t j) const {
    Matrix out(rows_, 1);
    for (std::size_t i = 0; i < rows_; ++i) out(i, 0) = (*this)(i, j);
    return out;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) {
      throw Error(ErrorKind::ShapeMismatch, "block outside matrix");
    }
    Matrix out(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }

  Matrix& operator*=(const T& s) {
    for (T& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) {
      throw Error(ErrorKind::ShapeMismatch, "product of " + a.shape_string() + " and " + b.shape_string());
    }
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T aik = a(i, k);
        if (aik == T{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    }
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::string shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw Error(ErrorKind::ShapeMismatch, shape_string() + " vs " + o.shape_string());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using ComplexMatrix = Matrix<Complex>;
using RealMatrix = Matrix<double>;

template <class T>
double max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::ShapeMismatch, a.shape_string() + " vs " + b.shape_string());
  }
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  return m;
}

inline ComplexMatrix to_complex(const RealMatrix& m) {
  ComplexMatrix out(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.size(); ++k) out.values()[k] = m.values()[k];
  return out;
}

inline RealMatrix real_part(const ComplexMatrix& m) {
  RealMatrix out(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.size(); ++k) out.values()[k] = m.values()[k].real();
  return out;
}

template <class T>
Matrix<T> block_diagonal(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, a.cols() + j) = b(i, j);
  return out;
}

/// max |H - H*|
template <class T>
double hermiticity_defect(const Matrix<T>& h) {
  double m = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) m = std::max(m, std::abs(h(i, j) - conj_value(h(j, i))));
  return m;
}

/// max |U*U - I|
template <class T>
double unitarity_defect(const Matrix<T>& u) {
  return max_abs_diff(u.adjoint() * u, Matrix<T>::identity(u.cols()));
}

namespace detail {

// Unitary 2x2 rotation G (acting on coordinates p, q) that diagonalizes the
// Hermitian pair [[app, g], [conj g, aqq]] via G* . pair . G. Built as a phase
// fix diag(1, e^{-i arg g}) followed by the classical real Jacobi rotation.
template <class T>
struct PlaneRotation {
  T pp, pq, qp, qq;
};

template <class T>
PlaneRotation<T> jacobi_rotation(double app, double aqq, const T& g) {
  const double ag = std::abs(g);
  T phase = g / T(ag);
  phase /= T(std::abs(phase));  // subnormal g loses the unit modulus
  const double theta = (aqq - app) / (2.0 * ag);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 1.0 / (2.0 * theta);
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const T cph = conj_value(phase);
  return {T(c), T(s), T(-s) * cph, T(c) * cph};
}

// columns p, q of m  <-  [col_p col_q] . G
template <class T>
void rotate_columns(Matrix<T>& m, std::size_t p, std::size_t q, const PlaneRotation<T>& g) {
  for (std::size_t k = 0; k < m.rows(); ++k) {
    const T mp = m(k, p);
    const T mq = m(k, q);
    m(k, p) = mp * g.pp + mq * g.qp;
    m(k, q) = mp * g.pq + mq * g.qq;
  }
}

// rows p, q of m  <-  G* . [row_p; row_q]
template <class T>
void rotate_rows_adjoint(Matrix<T>& m, std::size_t p, std::size_t q, const PlaneRotation<T>& g) {
  for (std::size_t k = 0; k < m.cols(); ++k) {
    const T mp = m(p, k);
    const T mq = m(q, k);
    m(p, k) = conj_value(g.pp) * mp + conj_value(g.qp) * mq;
    m(q, k) = conj_value(g.pq) * mp + conj_value(g.qq) * mq;
  }
}

template <class T>
void require_square(const Matrix<T>& m, const char* what) {
  if (!m.is_square()) throw Error(ErrorKind::NotSquare, std::string(what) + ": got " + m.shape_string());
}

}  // namespace detail

struct HermitianSpectrum {
  std::vector<double> eigenvalues;  // ascending
  double residual = 0.0;            // max |V diag(lambda) V* - H|
};

template <class T>
struct HermitianEigensystem {
  std::vector<double> eigenvalues;  // ascending
  Matrix<T> vectors;                // column k pairs with eigenvalues[k]
  double residual = 0.0;
};

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Hermiticity is checked relative to the matrix scale:
/// max |H - H*| <= hermiticity_tol * max(1, max |H|).
template <class T>
HermitianEigensystem<T> hermitian_eigensystem(const Matrix<T>& h, double hermiticity_tol = tol::structural) {
  detail::require_square(h, "hermitian_eigensystem");
  const std::size_t n = h.rows();
  const double scale = std::max(1.0, h.max_abs());
  const double defect = hermiticity_defect(h);
  if (defect > hermiticity_tol * scale) {
    throw Error(ErrorKind::NotHermitian, "max |H - H*| = " + std::to_string(defect));
  }

  Matrix<T> a = h;
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = T(real_value(a(i, i)));
    for (std::size_t j = i + 1; j < n; ++j) {
      const T avg = (a(i, j) + conj_value(a(j, i))) * T(0.5);
      a(i, j) = avg;
      a(j, i) = conj_value(avg);
    }
  }
  Matrix<T> v = Matrix<T>::identity(n);
  const double eps = std::numeric_limits<double>::epsilon();

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += std::norm(Complex(a(i, i)));
      for (std::size_t j = i + 1; j < n; ++j) off += std::norm(Complex(a(i, j)));
    }
    total += 2.0 * off;
    if (off <= eps * eps * total || off == 0.0) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T g = a(p, q);
        if (std::abs(g) == 0.0) continue;
        const auto rot = detail::jacobi_rotation(real_value(a(p, p)), real_value(a(q, q)), g);
        detail::rotate_columns(a, p, q, rot);
        detail::rotate_rows_adjoint(a, p, q, rot);
        a(p, q) = T{};
        a(q, p) = T{};
        a(p, p) = T(real_value(a(p, p)));
        a(q, q) = T(real_value(a(q, q)));
        detail::rotate_columns(v, p, q, rot);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return real_value(a(x, x)) < real_value(a(y, y)); });

  HermitianEigensystem<T> out;
  out.eigenvalues.resize(n);
  out.vectors = Matrix<T>(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = real_value(a(order[k], order[k]));
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  Matrix<T> scaled = out.vectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) scaled(i, k) *= T(out.eigenvalues[k]);
  out.residual = max_abs_diff(scaled * out.vectors.adjoint(), h);
  return out;
}

template <class T>
HermitianSpectrum hermitian_eigenvalues(const Matrix<T>& h, double hermiticity_tol = tol::structural) {
  auto sys = hermitian_eigensystem(h, hermiticity_tol);
  return {std::move(sys.eigenvalues), sys.residual};
}

/// Upper-triangular A with positive real diagonal such that H = A* A.
///
/// Rejects H unless its smallest eigenvalue exceeds
/// definiteness_tol * max |H|.
template <class T>
Matrix<T> cholesky_hermitian(const Matrix<T>& h, double definiteness_tol = tol::definiteness) {
  detail::require_square(h, "cholesky_hermitian");
  const auto spectrum = hermitian_eigenvalues(h);
  const double lowest = spectrum.eigenvalues.empty() ? 0.0 : spectrum.eigenvalues.front();
  if (h.rows() > 0 && !(lowest > definiteness_tol * h.max_abs())) {
    throw Error(ErrorKind::NotPositiveDefinite, "smallest eigenvalue " + std::to_string(lowest));
  }
  const std::size_t n = h.rows();
  Matrix<T> a(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = real_value(h(j, j));
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(Complex(a(k, j)));
    if (!(d > 0.0)) {
      throw Error(ErrorKind::NotPositiveDefinite, "non-positive pivot at column " + std::to_string(j));
    }
    const double ajj = std::sqrt(d);
    a(j, j) = T(ajj);
    for (std::size_t i = j + 1; i < n; ++i) {
      T s = h(j, i);
      for (std::size_t k = 0; k < j; ++k) s -= conj_value(a(k, j)) * a(k, i);
      a(j, i) = s / T(ajj);
    }
  }
  return a;
}

template <class T>
struct SingularValueDecomposition {
  Matrix<T> u;                          // m x n, orthonormal columns where sigma > 0
  std::vector<double> singular_values;  // descending, length n
  Matrix<T> v;                          // n x n unitary
};

/// One-sided (Hestenes) Jacobi SVD: M V = U diag(sigma).
template <class T>
SingularValueDecomposition<T> singular_value_decomposition(const Matrix<T>& m) {
  const std::size_t rows = m.rows();
  const std::size_t n = m.cols();
  Matrix<T> w = m;
  Matrix<T> v = Matrix<T>::identity(n);
  constexpr double threshold = 1e-15;
  // columns this small are numerically zero; rotating them only spreads
  // subnormal noise into v
  double fro = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < rows; ++k) fro += std::norm(Complex(w(k, j)));
  const double negligible = fro * 1e-40;

  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        T gamma{};
        for (std::size_t k = 0; k < rows; ++k) {
          alpha += std::norm(Complex(w(k, p)));
          beta += std::norm(Complex(w(k, q)));
          gamma += conj_value(w(k, p)) * w(k, q);
        }
        const double mag = std::abs(gamma);
        if (alpha <= negligible || beta <= negligible) continue;
        if (mag == 0.0 || mag <= threshold * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const auto rot = detail::jacobi_rotation(alpha, beta, gamma);
        detail::rotate_columns(w, p, q, rot);
        detail::rotate_columns(v, p, q, rot);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < rows; ++k) s += std::norm(Complex(w(k, j)));
    sigma[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  SingularValueDecomposition<T> out;
  out.u = Matrix<T>(rows, n);
  out.v = Matrix<T>(n, n);
  out.singular_values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.singular_values[k] = sigma[j];
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
    if (sigma[j] > 0.0) {
      for (std::size_t i = 0; i < rows; ++i) out.u(i, k) = w(i, j) / T(sigma[j]);
    }
  }
  return out;
}

/// Orthonormal basis of {v : |Mv| <= tol |M|_2 |v|}, each vector as an
/// n x 1 column. Empty when the map is injective at this tolerance.
template <class T>
std::vector<Matrix<T>> solve_nullspace(const Matrix<T>& m, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "nullspace tolerance must be positive");
  const auto svd = singular_value_decomposition(m);
  const double top = svd.singular_values.empty() ? 0.0 : svd.singular_values.front();
  std::vector<Matrix<T>> basis;
  for (std::size_t k = 0; k < svd.singular_values.size(); ++k) {
    if (svd.singular_values[k] <= tol * top) basis.push_back(svd.v.column(k));
  }
  return basis;
}

/// Orthonormal basis of the column space, keeping singular values above
/// rel_tol times the largest one.
template <class T>
std::vector<Matrix<T>> orthonormal_range(const Matrix<T>& m, double rel_tol) {
  const auto svd = singular_value_decomposition(m);
  const double top = svd.singular_values.empty() ? 0.0 : svd.singular_values.front();
  std::vector<Matrix<T>> basis;
  if (top == 0.0) return basis;
  for (std::size_t k = 0; k < svd.singular_values.size(); ++k) {
    if (svd.singular_values[k] > rel_tol * top) basis.push_back(svd.u.column(k));
  }
  return basis;
}

/// Gauss-Jordan inverse with partial pivoting. Throws Singular when a pivot
/// vanishes or the 1-norm condition estimate exceeds tol::singular_condition.
template <class T>
Matrix<T> invert(const Matrix<T>& m) {
  detail::require_square(m, "invert");
  const std::size_t n = m.rows();
  Matrix<T> a = m;
  Matrix<T> inv = Matrix<T>::identity(n);
  const double scale = m.max_abs();
  if (n > 0 && scale == 0.0) throw Error(ErrorKind::Singular, "zero matrix");

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > best) {
        best = std::abs(a(r, col));
        pivot = r;
      }
    }
    if (best <= std::numeric_limits<double>::epsilon() * scale * 1e-4) {
      throw Error(ErrorKind::Singular, "vanishing pivot in column " + std::to_string(col));
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(col, j), a(pivot, j));
        std::swap(inv(col, j), inv(pivot, j));
      }
    }
    const T d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const T f = a(r, col);
      if (f == T{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }

  auto one_norm = [](const Matrix<T>& x) {
    double best = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.rows(); ++i) s += std::abs(x(i, j));
      best = std::max(best, s);
    }
    return best;
  };
  const double condition = one_norm(m) * one_norm(inv);
  if (!(condition <= tol::singular_condition)) {
    throw Error(ErrorKind::Singular, "condition estimate " + std::to_string(condition));
  }
  return inv;
}

}  // namespace repkit
