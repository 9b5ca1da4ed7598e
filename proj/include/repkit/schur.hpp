#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "repkit/error.hpp"
#include "repkit/haar.hpp"
#include "repkit/linalg.hpp"
#include "repkit/representation.hpp"
#include "repkit/tolerance.hpp"
#include "repkit/unitarize.hpp"

namespace repkit {

/// Representations whose unitarity defect on the rule nodes stays below this
/// are treated as unitary and not re-unitarized.
inline constexpr double kUnitaryThreshold = 1e-8;

struct IntertwinerResult {
  ComplexMatrix t;
  double residual = 0.0;  // max over nodes |Phi(x) T - T Psi(x)|
};

namespace detail {

inline std::vector<ComplexMatrix> node_inverse_matrices(const Representation& rep, const HaarRule& rule) {
  std::vector<ComplexMatrix> out;
  out.reserve(rule.size());
  for (const auto& x : rule.nodes()) out.push_back(evaluate(rep, inverse(rep.group(), x)));
  return out;
}

inline double intertwining_residual(const std::vector<ComplexMatrix>& phi, const std::vector<ComplexMatrix>& psi,
                                    const ComplexMatrix& t) {
  double worst = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) worst = std::max(worst, max_abs_diff(phi[k] * t, t * psi[k]));
  return worst;
}

}  // namespace detail

/// T = integral of Phi(x) A Psi(x^-1).
inline IntertwinerResult averaged_intertwiner(const Representation& phi, const Representation& psi,
                                              const ComplexMatrix& a, const HaarRule& rule) {
  if (!same_group(phi.group(), psi.group())) throw Error(ErrorKind::GroupMismatch, "intertwiner between different groups");
  if (a.rows() != phi.degree() || a.cols() != psi.degree()) {
    throw Error(ErrorKind::ShapeMismatch, "seed matrix is " + a.shape_string() + ", expected " +
                                              std::to_string(phi.degree()) + "x" + std::to_string(psi.degree()));
  }
  const auto phi_m = detail::node_matrices(phi, rule);
  const auto psi_m = detail::node_matrices(psi, rule);
  const auto psi_inv = detail::node_inverse_matrices(psi, rule);
  ComplexMatrix t = integrate_matrix_indexed(rule, [&](std::size_t k) { return phi_m[k] * a * psi_inv[k]; });
  const double residual = detail::intertwining_residual(phi_m, psi_m, t);
  return IntertwinerResult{std::move(t), residual};
}

struct CommutantReport {
  std::size_t dimension = 0;
  std::vector<ComplexMatrix> basis;  // orthonormal in the Frobenius inner product
  double max_residual = 0.0;
};

/// Commutant by averaging every elementary matrix E_kl into it and keeping
/// an orthonormal basis of the span (rank cut tol::rank, relative).
inline CommutantReport commutant(const Representation& rep, const HaarRule& rule) {
  const std::size_t r = rep.degree();
  const auto mats = detail::node_matrices(rep, rule);
  const auto invs = detail::node_inverse_matrices(rep, rule);

  ComplexMatrix stacked(r * r, r * r);
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t l = 0; l < r; ++l) {
      // rho E_kl rho^-1 is the outer product of column k and row l
      const ComplexMatrix avg = integrate_matrix_indexed(rule, [&](std::size_t n) {
        ComplexMatrix out(r, r);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < r; ++j) out(i, j) = mats[n](i, k) * invs[n](l, j);
        return out;
      });
      const auto vals = avg.values();
      for (std::size_t i = 0; i < vals.size(); ++i) stacked(i, k * r + l) = vals[i];
    }
  }

  CommutantReport report;
  for (const auto& v : orthonormal_range(stacked, tol::rank)) {
    ComplexMatrix t(r, r);
    for (std::size_t i = 0; i < r * r; ++i) t.values()[i] = v(i, 0);
    report.max_residual = std::max(report.max_residual, detail::intertwining_residual(mats, mats, t));
    report.basis.push_back(std::move(t));
  }
  report.dimension = report.basis.size();
  return report;
}

struct IrreducibilityReport {
  bool irreducible = false;
  std::size_t commutant_dimension = 0;
  double commutant_residual = 0.0;
  bool unitarized = false;
  double unitarity_residual = 0.0;  // of the representation actually tested
};

inline IrreducibilityReport irreducibility_report(const Representation& rep, const HaarRule& rule) {
  IrreducibilityReport report;
  report.unitarity_residual = unitarity_audit(rep, rule);
  std::optional<Representation> work;
  if (report.unitarity_residual > kUnitaryThreshold) {
    auto u = unitarize(rep, rule);
    report.unitarized = true;
    report.unitarity_residual = u.unitarity_residual;
    work = u.unitary_rep;
  } else {
    work = rep;
  }
  const auto c = commutant(*work, rule);
  report.commutant_dimension = c.dimension;
  report.commutant_residual = c.max_residual;
  report.irreducible = c.dimension == 1;
  return report;
}

/// True iff the commutant is one-dimensional.
inline bool irreducibility_test(const Representation& rep, const HaarRule& rule) {
  return irreducibility_report(rep, rule).irreducible;
}

struct SplitResult {
  ComplexMatrix p;      // P rho(x) P^-1 is block diagonal
  ComplexMatrix p_inv;
  std::vector<Representation> parts;  // two blocks, in diagonal order
  double leakage = 0.0;               // max off-block magnitude over nodes
};

namespace detail {

inline ComplexMatrix remove_scalar_part(const ComplexMatrix& t) {
  const Complex mean = t.trace() / static_cast<double>(t.rows());
  ComplexMatrix out = t;
  for (std::size_t k = 0; k < t.rows(); ++k) out(k, k) -= mean;
  return out;
}

inline double off_block_magnitude(const ComplexMatrix& m, const std::vector<std::size_t>& offsets) {
  // offsets: block starts plus the total size as the final entry
  double worst = 0.0;
  std::vector<std::size_t> block_of(m.rows());
  for (std::size_t b = 0; b + 1 < offsets.size(); ++b)
    for (std::size_t i = offsets[b]; i < offsets[b + 1]; ++i) block_of[i] = b;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (block_of[i] != block_of[j]) worst = std::max(worst, std::abs(m(i, j)));
  return worst;
}

inline Representation materialize_block(const Representation& parent, const ComplexMatrix& p, const ComplexMatrix& p_inv,
                                        std::size_t offset, std::size_t degree, double leakage) {
  if (parent.group().kind() == GroupKind::finite) {
    return finite_table_from(parent.group(), [&](std::size_t g) {
      return (p * evaluate(parent, g) * p_inv).block(offset, offset, degree, degree);
    });
  }
  return projected_block(parent, p, p_inv, offset, degree, leakage);
}

}  // namespace detail

/// Split a reducible representation into two invariant blocks by
/// eigen-splitting a non-scalar Hermitian commutant element. Non-unitary
/// input is unitarized first and the basis change folded into P.
namespace detail {

// Unitary working copy of rep and the change of basis that produced it.
struct Prepared {
  Representation work;
  ComplexMatrix a;
  ComplexMatrix a_inv;
};

inline Prepared prepare_unitary(const Representation& rep, const HaarRule& rule) {
  if (unitarity_audit(rep, rule) > kUnitaryThreshold) {
    auto u = unitarize(rep, rule);
    return {u.unitary_rep, u.a, u.a_inv};
  }
  return {rep, ComplexMatrix::identity(rep.degree()), ComplexMatrix::identity(rep.degree())};
}

inline SplitResult split_with_commutant(const Representation& rep, const Prepared& prep, const CommutantReport& c,
                                        const HaarRule& rule) {
  const std::size_t r = rep.degree();
  const ComplexMatrix& a = prep.a;
  const ComplexMatrix& a_inv = prep.a_inv;
  if (c.dimension <= 1) throw Error(ErrorKind::AlreadyIrreducible, "commutant is one-dimensional");

  std::optional<ComplexMatrix> pick;
  for (const auto& t : c.basis) {
    const ComplexMatrix herm = detail::remove_scalar_part(detail::hermitian_part(t));
    ComplexMatrix skew = t - t.adjoint();
    skew *= Complex(0.0, 0.5);
    skew = detail::remove_scalar_part(skew);
    const ComplexMatrix& best = herm.frobenius() >= skew.frobenius() ? herm : skew;
    if (best.frobenius() > tol::cluster_gap) {
      ComplexMatrix x = best;
      x *= 1.0 / best.frobenius();
      pick = detail::hermitian_part(x);
      break;
    }
  }
  if (!pick) throw Error(ErrorKind::AlreadyIrreducible, "commutant contains only scalars");

  const auto eig = hermitian_eigensystem(*pick);
  std::size_t first = r;
  for (std::size_t k = 0; k + 1 < r; ++k) {
    if (eig.eigenvalues[k + 1] - eig.eigenvalues[k] > tol::cluster_gap) {
      first = k + 1;
      break;
    }
  }
  if (first == r) throw Error(ErrorKind::AlreadyIrreducible, "commutant element has a single eigenvalue cluster");

  const ComplexMatrix v = eig.vectors;
  ComplexMatrix p = v.adjoint() * a;
  ComplexMatrix p_inv = a_inv * v;

  double leakage = 0.0;
  const std::vector<std::size_t> offsets{0, first, r};
  for (const auto& x : rule.nodes()) {
    leakage = std::max(leakage, detail::off_block_magnitude(p * evaluate(rep, x) * p_inv, offsets));
  }
  std::vector<Representation> parts{detail::materialize_block(rep, p, p_inv, 0, first, leakage),
                                    detail::materialize_block(rep, p, p_inv, first, r - first, leakage)};
  return SplitResult{std::move(p), std::move(p_inv), std::move(parts), leakage};
}

}  // namespace detail

inline SplitResult split_once(const Representation& rep, const HaarRule& rule) {
  const auto prep = detail::prepare_unitary(rep, rule);
  return detail::split_with_commutant(rep, prep, commutant(prep.work, rule), rule);
}

struct DecompositionReport {
  ComplexMatrix p;
  ComplexMatrix p_inv;
  std::vector<Representation> blocks;
  std::vector<Character> block_characters;
  std::vector<std::size_t> degrees;
  double residual = 0.0;            // max off-block leakage of P rho(x) P^-1
  double character_residual = 0.0;  // max over nodes |sum of block characters - input character|
  bool unitarized = false;
};

/// Recursive splitting until every block has a scalar commutant.
inline DecompositionReport decompose(const Representation& rep, const HaarRule& rule) {
  const std::size_t r = rep.degree();
  DecompositionReport report;
  report.p = ComplexMatrix::identity(r);
  report.p_inv = ComplexMatrix::identity(r);

  std::optional<Representation> work;
  if (unitarity_audit(rep, rule) > kUnitaryThreshold) {
    auto u = unitarize(rep, rule);
    report.p = u.a;
    report.p_inv = u.a_inv;
    report.unitarized = true;
    work = u.unitary_rep;
  } else {
    work = rep;
  }

  struct Pending {
    std::size_t offset;
    Representation block;
  };
  std::vector<Pending> done;
  std::vector<Pending> todo{{0, *work}};
  while (!todo.empty()) {
    Pending cur = std::move(todo.back());
    todo.pop_back();
    if (cur.block.degree() == 1) {
      done.push_back(std::move(cur));
      continue;
    }
    // one commutant per block serves both the irreducibility test and the split
    const auto prep = detail::prepare_unitary(cur.block, rule);
    const auto c = commutant(prep.work, rule);
    if (c.dimension == 1) {
      done.push_back(std::move(cur));
      continue;
    }
    SplitResult s = detail::split_with_commutant(cur.block, prep, c, rule);
    ComplexMatrix d = ComplexMatrix::identity(r);
    ComplexMatrix d_inv = ComplexMatrix::identity(r);
    const std::size_t m = cur.block.degree();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        d(cur.offset + i, cur.offset + j) = s.p(i, j);
        d_inv(cur.offset + i, cur.offset + j) = s.p_inv(i, j);
      }
    report.p = d * report.p;
    report.p_inv = report.p_inv * d_inv;
    const std::size_t first = s.parts[0].degree();
    todo.push_back({cur.offset + first, std::move(s.parts[1])});
    todo.push_back({cur.offset, std::move(s.parts[0])});
  }
  std::sort(done.begin(), done.end(), [](const Pending& x, const Pending& y) { return x.offset < y.offset; });

  std::vector<std::size_t> offsets;
  for (const auto& b : done) offsets.push_back(b.offset);
  offsets.push_back(r);

  for (const auto& x : rule.nodes()) {
    report.residual = std::max(report.residual, detail::off_block_magnitude(report.p * evaluate(rep, x) * report.p_inv, offsets));
  }
  for (std::size_t b = 0; b < done.size(); ++b) {
    const std::size_t deg = offsets[b + 1] - offsets[b];
    report.blocks.push_back(detail::materialize_block(rep, report.p, report.p_inv, offsets[b], deg, report.residual));
    report.degrees.push_back(deg);
  }

  const Character input = character(rep, rule);
  std::vector<Complex> total(rule.size(), Complex{});
  for (const auto& b : report.blocks) {
    report.block_characters.push_back(character(b, rule));
    const auto& vals = report.block_characters.back().values;
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += vals[k];
  }
  for (std::size_t k = 0; k < total.size(); ++k) {
    report.character_residual = std::max(report.character_residual, std::abs(total[k] - input.values[k]));
  }
  return report;
}

/// Integral of c1(x) conj(c2(x)).
inline Complex character_inner(const Character& c1, const Character& c2, const HaarRule& rule) {
  if (!c1.rule.same_rule(rule) || !c2.rule.same_rule(rule)) {
    throw Error(ErrorKind::RuleMismatch, "characters were sampled on a different rule");
  }
  return integrate_scalar_indexed(rule, [&](std::size_t k) { return c1.values[k] * std::conj(c2.values[k]); });
}

struct OrthogonalityReport {
  ComplexMatrix gram;    // <chi_i, chi_j>
  RealMatrix residuals;  // |<chi_i, chi_j> - delta_ij|
  double max_residual = 0.0;
};

inline OrthogonalityReport orthogonality_audit(const std::vector<Representation>& reps, const HaarRule& rule) {
  if (reps.empty()) throw Error(ErrorKind::InvalidArgument, "orthogonality audit needs at least one representation");
  std::vector<Character> chars;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (!irreducibility_test(reps[i], rule)) {
      throw Error(ErrorKind::NotIrreducible, "representation " + std::to_string(i) + " (" + describe(reps[i]) +
                                                 ") is reducible");
    }
    chars.push_back(character(reps[i], rule));
  }
  const std::size_t n = reps.size();
  OrthogonalityReport report{ComplexMatrix(n, n), RealMatrix(n, n), 0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      report.gram(i, j) = character_inner(chars[i], chars[j], rule);
      report.residuals(i, j) = std::abs(report.gram(i, j) - (i == j ? 1.0 : 0.0));
      report.max_residual = std::max(report.max_residual, report.residuals(i, j));
    }
  return report;
}

struct MatrixElementReport {
  double max_deviation = 0.0;
  std::size_t degree = 0;
  RealMatrix diagonal;  // (i, j) -> integral of |Phi_ij|^2, expected 1/r
};

/// max over (i, j, k, l) of |integral Phi_ij conj(Phi_kl) - delta_ik delta_jl / r|.
inline MatrixElementReport matrix_element_audit(const Representation& rep, const HaarRule& rule) {
  if (unitarity_audit(rep, rule) > kUnitaryThreshold) throw Error(ErrorKind::NotUnitary, "matrix element audit needs a unitary representation");
  if (!irreducibility_test(rep, rule)) throw Error(ErrorKind::NotIrreducible, describe(rep) + " is reducible");
  const std::size_t r = rep.degree();
  const auto mats = detail::node_matrices(rep, rule);
  // entry (i r + j, k r + l) of the integrated outer product
  const ComplexMatrix gram = integrate_matrix_indexed(rule, [&](std::size_t n) {
    const auto vals = mats[n].values();
    ComplexMatrix outer(r * r, r * r);
    for (std::size_t p = 0; p < r * r; ++p)
      for (std::size_t q = 0; q < r * r; ++q) outer(p, q) = vals[p] * std::conj(vals[q]);
    return outer;
  });
  MatrixElementReport report{0.0, r, RealMatrix(r, r)};
  const double inv_r = 1.0 / static_cast<double>(r);
  for (std::size_t p = 0; p < r * r; ++p) {
    for (std::size_t q = 0; q < r * r; ++q) {
      const double expected = p == q ? inv_r : 0.0;
      report.max_deviation = std::max(report.max_deviation, std::abs(gram(p, q) - expected));
    }
    report.diagonal(p / r, p % r) = gram(p, p).real();
  }
  return report;
}

/// Number of copies of irrep inside rep, from the character inner product.
inline std::size_t multiplicity(const Representation& rep, const Representation& irrep, const HaarRule& rule) {
  if (!irreducibility_test(irrep, rule)) throw Error(ErrorKind::NotIrreducible, describe(irrep) + " is reducible");
  const Complex m = character_inner(character(rep, rule), character(irrep, rule), rule);
  const double nearest = std::round(m.real());
  if (std::abs(m - Complex(nearest)) > tol::multiplicity_window || nearest < 0.0) {
    throw Error(ErrorKind::NonIntegerMultiplicity,
                "character inner product " + std::to_string(m.real()) + "+" + std::to_string(m.imag()) + "i is not an integer");
  }
  return static_cast<std::size_t>(nearest);
}

}  // namespace repkit
