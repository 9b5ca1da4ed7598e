#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "repkit/error.hpp"
#include "repkit/linalg.hpp"
#include "repkit/tolerance.hpp"

namespace repkit {

/// Coefficients of a Lie algebra element in the chosen basis.
using Coefficients = std::vector<double>;

/// One nonzero structure constant [e_a, e_b] = ... + value e_k, listed with a < b.
struct StructureConstant {
  std::size_t a;
  std::size_t b;
  std::size_t k;
  double value;
};

/// Finite-dimensional real Lie algebra given by structure constants
/// c[a][b][k], meaning [e_a, e_b] = sum_k c[a][b][k] e_k.
///
/// Construction validates exact antisymmetry and a Jacobi residual below
/// tol::structural; malformed input is rejected rather than repaired.
class LieAlgebraSpec {
 public:
  LieAlgebraSpec(std::size_t dim, std::vector<double> constants, std::vector<std::string> labels = {})
      : dim_(dim), c_(std::move(constants)), labels_(std::move(labels)) {
    if (c_.size() != dim_ * dim_ * dim_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "expected " + std::to_string(dim_ * dim_ * dim_) + " structure constants, got " +
                      std::to_string(c_.size()));
    }
    if (!labels_.empty() && labels_.size() != dim_) {
      throw Error(ErrorKind::DimensionMismatch, "label count differs from dimension");
    }
    for (double x : c_) {
      if (!std::isfinite(x)) throw Error(ErrorKind::InvalidStructureConstants, "non-finite structure constant");
    }
    for (std::size_t a = 0; a < dim_; ++a) {
      for (std::size_t b = 0; b < dim_; ++b) {
        for (std::size_t k = 0; k < dim_; ++k) {
          if (at(a, b, k) != -at(b, a, k)) {
            throw Error(ErrorKind::InvalidStructureConstants,
                        "antisymmetry fails at (" + std::to_string(a) + ", " + std::to_string(b) + ", " +
                            std::to_string(k) + ")");
          }
        }
      }
    }
    const double jac = jacobi_residual();
    if (jac > tol::structural) {
      throw Error(ErrorKind::InvalidStructureConstants, "Jacobi identity residual " + std::to_string(jac));
    }
  }

  /// Builds the full antisymmetric table from the upper-triangle entries
  /// (a < b). Duplicates and entries with a >= b are rejected.
  static LieAlgebraSpec from_upper(std::size_t dim, const std::vector<StructureConstant>& entries,
                                   std::vector<std::string> labels = {}) {
    std::vector<double> c(dim * dim * dim, 0.0);
    std::vector<bool> seen(dim * dim * dim, false);
    for (const auto& e : entries) {
      if (e.a >= dim || e.b >= dim || e.k >= dim) {
        throw Error(ErrorKind::DimensionMismatch, "structure constant index out of range");
      }
      if (e.a >= e.b) {
        throw Error(ErrorKind::InvalidStructureConstants,
                    "entries must satisfy a < b, got (" + std::to_string(e.a) + ", " + std::to_string(e.b) + ")");
      }
      const std::size_t idx = (e.a * dim + e.b) * dim + e.k;
      if (seen[idx]) throw Error(ErrorKind::InvalidStructureConstants, "duplicate structure constant");
      seen[idx] = true;
      c[idx] = e.value;
      c[(e.b * dim + e.a) * dim + e.k] = -e.value;
    }
    return LieAlgebraSpec(dim, std::move(c), std::move(labels));
  }

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  double at(std::size_t a, std::size_t b, std::size_t k) const { return c_[(a * dim_ + b) * dim_ + k]; }

  /// max over basis triples of |[[e_a,e_b],e_c] + [[e_b,e_c],e_a] + [[e_c,e_a],e_b]|
  double jacobi_residual() const {
    double worst = 0.0;
    for (std::size_t a = 0; a < dim_; ++a)
      for (std::size_t b = 0; b < dim_; ++b)
        for (std::size_t c = 0; c < dim_; ++c)
          for (std::size_t out = 0; out < dim_; ++out) {
            double s = 0.0;
            for (std::size_t m = 0; m < dim_; ++m) {
              s += at(a, b, m) * at(m, c, out) + at(b, c, m) * at(m, a, out) + at(c, a, m) * at(m, b, out);
            }
            worst = std::max(worst, std::abs(s));
          }
    return worst;
  }

  Coefficients basis_vector(std::size_t k) const {
    Coefficients e(dim_, 0.0);
    e.at(k) = 1.0;
    return e;
  }

 private:
  std::size_t dim_;
  std::vector<double> c_;
  std::vector<std::string> labels_;
};

inline Coefficients bracket(const LieAlgebraSpec& alg, const Coefficients& u, const Coefficients& v) {
  const std::size_t n = alg.dim();
  if (u.size() != n || v.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "bracket operands must have length " + std::to_string(n));
  }
  Coefficients out(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    if (u[a] == 0.0) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (v[b] == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) out[k] += u[a] * v[b] * alg.at(a, b, k);
    }
  }
  return out;
}

/// Matrix of the inner derivation x -> [u, x]; column k holds [u, e_k].
inline RealMatrix adjoint_matrix(const LieAlgebraSpec& alg, const Coefficients& u) {
  const std::size_t n = alg.dim();
  if (u.size() != n) throw Error(ErrorKind::DimensionMismatch, "adjoint argument must have length " + std::to_string(n));
  RealMatrix ad(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const Coefficients col = bracket(alg, u, alg.basis_vector(k));
    for (std::size_t i = 0; i < n; ++i) ad(i, k) = col[i];
  }
  return ad;
}

enum class Compactness { compact_semisimple, compact_with_center, not_compact_type };

inline const char* to_string(Compactness c) {
  switch (c) {
    case Compactness::compact_semisimple: return "compact_semisimple";
    case Compactness::compact_with_center: return "compact_with_center";
    case Compactness::not_compact_type: return "not_compact_type";
  }
  return "unknown";
}

struct TraceFormReport {
  RealMatrix gram;                   // <e_a, e_b> = -tr(ad e_a . ad e_b)
  std::vector<double> eigenvalues;   // ascending
  Compactness classification = Compactness::not_compact_type;
  std::vector<Coefficients> center_basis;
  double invariance_residual = 0.0;  // max |<[x,u],v> + <u,[x,v]>| over basis triples
  double center_commutator = 0.0;    // max |[z, e_k]| over the extracted center vectors
};

/// Negative trace form, its spectrum, and the compactness verdict.
///
/// The near-null eigenspace of the gram is taken as the candidate center and
/// then checked to commute with every basis element. If it does not (a
/// degenerate but non-central radical, e.g. a nilpotent algebra) the algebra
/// cannot be compact and is reported as not_compact_type.
inline TraceFormReport trace_form(const LieAlgebraSpec& alg, double definiteness_tol = tol::definiteness) {
  const std::size_t n = alg.dim();
  std::vector<RealMatrix> ads;
  ads.reserve(n);
  for (std::size_t a = 0; a < n; ++a) ads.push_back(adjoint_matrix(alg, alg.basis_vector(a)));

  TraceFormReport report;
  report.gram = RealMatrix(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) report.gram(a, b) = -(ads[a] * ads[b]).trace();

  double inv = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v) {
        double s = 0.0;
        for (std::size_t m = 0; m < n; ++m) s += alg.at(x, u, m) * report.gram(m, v) + alg.at(x, v, m) * report.gram(u, m);
        inv = std::max(inv, std::abs(s));
      }
  report.invariance_residual = inv;

  if (n == 0) {
    report.classification = Compactness::compact_semisimple;
    return report;
  }

  const auto eig = hermitian_eigensystem(report.gram);
  report.eigenvalues = eig.eigenvalues;
  const double scale = std::max(1.0, report.gram.max_abs());
  const double cut = definiteness_tol * scale;

  const bool negative = eig.eigenvalues.front() < -cut;
  if (negative) {
    report.classification = Compactness::not_compact_type;
    return report;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(eig.eigenvalues[k]) <= cut) {
      Coefficients z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = eig.vectors(i, k);
      report.center_basis.push_back(std::move(z));
    }
  }
  if (report.center_basis.empty()) {
    report.classification = Compactness::compact_semisimple;
    return report;
  }
  double comm = 0.0;
  for (const auto& z : report.center_basis)
    for (std::size_t k = 0; k < n; ++k)
      for (double x : bracket(alg, z, alg.basis_vector(k))) comm = std::max(comm, std::abs(x));
  report.center_commutator = comm;
  if (comm <= 1e-9) {
    report.classification = Compactness::compact_with_center;
  } else {
    report.classification = Compactness::not_compact_type;
    report.center_basis.clear();
  }
  return report;
}

/// Lie algebra realized by explicit (complex) matrices.
struct MatrixLieAlgebra {
  std::vector<ComplexMatrix> basis;
  std::vector<std::string> labels;
  RealMatrix gram_defining;  // -Re tr(X Y)

  std::size_t dim() const noexcept { return basis.size(); }
};

/// -tr(XY), the defining-representation scalar product. Returns the real
/// part; for anti-Hermitian X, Y the imaginary part vanishes.
inline double trace_scalar_product(const ComplexMatrix& x, const ComplexMatrix& y) {
  return -(x * y).trace().real();
}

namespace detail {

// Real coordinates of each matrix (re and im parts of every entry) stacked
// as columns, so span questions become real least-squares problems.
inline RealMatrix realify_columns(const std::vector<ComplexMatrix>& mats) {
  const std::size_t len = mats.empty() ? 0 : 2 * mats.front().size();
  RealMatrix out(len, mats.size());
  for (std::size_t j = 0; j < mats.size(); ++j) {
    const auto vals = mats[j].values();
    for (std::size_t k = 0; k < vals.size(); ++k) {
      out(2 * k, j) = vals[k].real();
      out(2 * k + 1, j) = vals[k].imag();
    }
  }
  return out;
}

// Least-squares coordinates of target in the span of the basis columns via
// normal equations; the basis is small and well conditioned here.
inline std::pair<Coefficients, double> expand_in_basis(const RealMatrix& basis_cols, const RealMatrix& gram_inv,
                                                       const ComplexMatrix& target) {
  const std::size_t n = basis_cols.cols();
  RealMatrix t = realify_columns({target});
  Coefficients coeff(n, 0.0);
  std::vector<double> rhs(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < t.rows(); ++k) rhs[j] += basis_cols(k, j) * t(k, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) coeff[i] += gram_inv(i, j) * rhs[j];
  double resid = 0.0;
  for (std::size_t k = 0; k < t.rows(); ++k) {
    double s = t(k, 0);
    for (std::size_t j = 0; j < n; ++j) s -= basis_cols(k, j) * coeff[j];
    resid = std::max(resid, std::abs(s));
  }
  return {coeff, resid};
}

}  // namespace detail

/// Structure constants of a matrix Lie algebra, read off by expanding each
/// commutator XY - YX in the basis. Throws InvalidStructureConstants if a
/// commutator leaves the span by more than tol::structural.
inline LieAlgebraSpec structure_constants(const MatrixLieAlgebra& alg) {
  const std::size_t n = alg.dim();
  const RealMatrix cols = detail::realify_columns(alg.basis);
  const RealMatrix gram_inv = invert(cols.transpose() * cols);
  std::vector<double> c(n * n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const ComplexMatrix comm = alg.basis[a] * alg.basis[b] - alg.basis[b] * alg.basis[a];
      auto [coeff, resid] = detail::expand_in_basis(cols, gram_inv, comm);
      if (resid > tol::structural) {
        throw Error(ErrorKind::InvalidStructureConstants,
                    "commutator of basis elements " + std::to_string(a) + ", " + std::to_string(b) +
                        " leaves the span (residual " + std::to_string(resid) + ")");
      }
      for (std::size_t k = 0; k < n; ++k) {
        // Snap roundoff so the completed table is exactly antisymmetric.
        const double v = std::abs(coeff[k]) < 1e-14 ? 0.0 : coeff[k];
        c[(a * n + b) * n + k] = v;
        c[(b * n + a) * n + k] = -v;
      }
    }
  }
  return LieAlgebraSpec(n, std::move(c), alg.labels);
}

/// su(2) with the traceless anti-Hermitian orthonormal basis
/// H = diag(i, -i)/sqrt2, E = [[0,1],[-1,0]]/sqrt2, F = [[0,i],[i,0]]/sqrt2,
/// orthonormal under -tr(XY).
inline MatrixLieAlgebra su2_standard() {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};
  MatrixLieAlgebra alg;
  alg.basis = {
      ComplexMatrix{{i * r, 0.0}, {0.0, -i * r}},
      ComplexMatrix{{0.0, r}, {-r, 0.0}},
      ComplexMatrix{{0.0, i * r}, {i * r, 0.0}},
  };
  alg.labels = {"H", "E", "F"};
  alg.gram_defining = RealMatrix(3, 3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) alg.gram_defining(a, b) = trace_scalar_product(alg.basis[a], alg.basis[b]);
  return alg;
}

/// theta(x e1 + y e2 + z e3) = x E + y H + z F; an isometry R^3 -> su(2).
inline ComplexMatrix theta_isometry(const std::array<double, 3>& x) {
  const auto alg = su2_standard();
  return x[0] * alg.basis[1] + x[1] * alg.basis[0] + x[2] * alg.basis[2];
}

/// sl(2, R) in the basis h, e, f: [h,e] = 2e, [h,f] = -2f, [e,f] = h.
inline LieAlgebraSpec sl2r() {
  return LieAlgebraSpec::from_upper(3, {{0, 1, 1, 2.0}, {0, 2, 2, -2.0}, {1, 2, 0, 1.0}}, {"h", "e", "f"});
}

inline LieAlgebraSpec abelian(std::size_t dim) { return LieAlgebraSpec(dim, std::vector<double>(dim * dim * dim, 0.0)); }

}  // namespace repkit
