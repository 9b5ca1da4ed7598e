#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "repkit/error.hpp"
#include "repkit/haar.hpp"
#include "repkit/linalg.hpp"
#include "repkit/representation.hpp"
#include "repkit/tolerance.hpp"

namespace repkit {

struct HermitianForm {
  ComplexMatrix gram;
  double min_eigenvalue = 0.0;
  double invariance_residual = 0.0;  // max over nodes y of |rho(y)* H rho(y) - H|
};

struct UnitarizationResult {
  ComplexMatrix a;      // upper triangular, H = A* A
  ComplexMatrix a_inv;
  Representation unitary_rep;  // x -> A rho(x) A^-1
  HermitianForm form;
  double invariance_residual = 0.0;
  double unitarity_residual = 0.0;
  double character_residual = 0.0;  // max over nodes |tr(out) - tr(in)|
};

namespace detail {

inline std::vector<ComplexMatrix> node_matrices(const Representation& rep, const HaarRule& rule) {
  detail::require_same_group(rep, rule);
  std::vector<ComplexMatrix> out;
  out.reserve(rule.size());
  for (const auto& x : rule.nodes()) out.push_back(evaluate(rep, x));
  return out;
}

inline double form_invariance(const std::vector<ComplexMatrix>& mats, const ComplexMatrix& h) {
  double worst = 0.0;
  for (const auto& m : mats) worst = std::max(worst, max_abs_diff(m.adjoint() * h * m, h));
  return worst;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  ComplexMatrix h = m + m.adjoint();
  h *= 0.5;
  return h;
}

}  // namespace detail

/// H = integral of rho(x)* rho(x): the standard form averaged over the group.
/// Throws NotPositiveDefinite when the average is not definite, which means
/// the input is not a representation or the rule is far too coarse.
inline HermitianForm averaged_form(const Representation& rep, const HaarRule& rule) {
  const auto mats = detail::node_matrices(rep, rule);
  ComplexMatrix h = detail::hermitian_part(
      integrate_matrix_indexed(rule, [&](std::size_t k) { return mats[k].adjoint() * mats[k]; }));
  const auto spectrum = hermitian_eigenvalues(h);
  const double floor = tol::definiteness * std::max(1.0, h.max_abs());
  if (spectrum.eigenvalues.front() <= floor) {
    throw Error(ErrorKind::NotPositiveDefinite, "averaged form has smallest eigenvalue " +
                                                    std::to_string(spectrum.eigenvalues.front()));
  }
  HermitianForm form{h, spectrum.eigenvalues.front(), detail::form_invariance(mats, h)};
  return form;
}

/// Equivalent unitary representation A rho A^-1 with H = A* A (Cholesky).
inline UnitarizationResult unitarize(const Representation& rep, const HaarRule& rule) {
  HermitianForm form = averaged_form(rep, rule);
  ComplexMatrix a = cholesky_hermitian(form.gram);
  Representation out = conjugate(rep, a);
  const auto& conj = std::get<rep_detail::Conjugated>(out.node().body);

  double unitarity = 0.0;
  double chi = 0.0;
  for (const auto& x : rule.nodes()) {
    const ComplexMatrix before = evaluate(rep, x);
    const ComplexMatrix after = conj.a * before * conj.a_inv;
    unitarity = std::max(unitarity, unitarity_defect(after));
    chi = std::max(chi, std::abs(after.trace() - before.trace()));
  }
  const double invariance = form.invariance_residual;
  return UnitarizationResult{a, conj.a_inv, out, std::move(form), invariance, unitarity, chi};
}

/// Real basis of the space of Hermitian forms invariant under rep, found as
/// the fixed space of the averaging map H -> integral of rho(x)* H rho(x).
struct InvariantFormSpace {
  std::vector<ComplexMatrix> basis;  // Hermitian, Frobenius-normalized
  std::size_t dimension = 0;
  double max_residual = 0.0;  // max over basis and nodes of |rho* H rho - H|
};

namespace detail {

// Real coordinates of a Hermitian matrix: H_kk, then Re H_kl and Im H_kl
// (k < l), matching the basis E_kk, E_kl + E_lk, i(E_kl - E_lk).
inline std::vector<double> hermitian_coordinates(const ComplexMatrix& h) {
  const std::size_t r = h.rows();
  std::vector<double> c;
  c.reserve(r * r);
  for (std::size_t k = 0; k < r; ++k) c.push_back(h(k, k).real());
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t l = k + 1; l < r; ++l) {
      c.push_back(h(k, l).real());
      c.push_back(h(k, l).imag());
    }
  return c;
}

inline ComplexMatrix hermitian_from_coordinates(const std::vector<double>& c, std::size_t r) {
  ComplexMatrix h(r, r);
  std::size_t p = 0;
  for (std::size_t k = 0; k < r; ++k) h(k, k) = c[p++];
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t l = k + 1; l < r; ++l) {
      const Complex v(c[p], c[p + 1]);
      p += 2;
      h(k, l) = v;
      h(l, k) = std::conj(v);
    }
  return h;
}

}  // namespace detail

inline InvariantFormSpace invariant_form_space(const Representation& rep, const HaarRule& rule) {
  const std::size_t r = rep.degree();
  const std::size_t n = r * r;
  const auto mats = detail::node_matrices(rep, rule);

  RealMatrix averaging_minus_identity(n, n);
  std::vector<double> unit(n, 0.0);
  for (std::size_t b = 0; b < n; ++b) {
    std::fill(unit.begin(), unit.end(), 0.0);
    unit[b] = 1.0;
    const ComplexMatrix e = detail::hermitian_from_coordinates(unit, r);
    const ComplexMatrix avg = detail::hermitian_part(
        integrate_matrix_indexed(rule, [&](std::size_t k) { return mats[k].adjoint() * e * mats[k]; }));
    const auto col = detail::hermitian_coordinates(avg);
    for (std::size_t a = 0; a < n; ++a) averaging_minus_identity(a, b) = col[a] - unit[a];
  }

  // The averaging map is a projection (norm >= 1), so singular values of
  // (averaging - I) are judged against max(1, sigma_max): an all-invariant
  // space leaves only roundoff, which must not set the scale.
  const auto svd = singular_value_decomposition(averaging_minus_identity);
  const double cut = tol::rank * std::max(1.0, svd.singular_values.front());
  InvariantFormSpace space;
  for (std::size_t j = 0; j < n; ++j) {
    if (svd.singular_values[j] > cut) continue;
    std::vector<double> c(n);
    for (std::size_t a = 0; a < n; ++a) c[a] = svd.v(a, j);
    ComplexMatrix h = detail::hermitian_from_coordinates(c, r);
    h *= 1.0 / h.frobenius();
    space.max_residual = std::max(space.max_residual, detail::form_invariance(mats, h));
    space.basis.push_back(std::move(h));
  }
  space.dimension = space.basis.size();
  return space;
}

/// d = dimension of the invariant Hermitian forms; special means d == 1.
struct SpecialnessReport {
  std::size_t d = 0;
  bool special = false;
  InvariantFormSpace forms;
  UnitarizationResult unitarization;
};

inline SpecialnessReport specialness_report(const Representation& rep, const HaarRule& rule) {
  InvariantFormSpace forms = invariant_form_space(rep, rule);
  UnitarizationResult u = unitarize(rep, rule);
  const std::size_t d = forms.dimension;
  return SpecialnessReport{d, d == 1, std::move(forms), std::move(u)};
}

}  // namespace repkit
