#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "repkit/error.hpp"
#include "repkit/group.hpp"
#include "repkit/linalg.hpp"
#include "repkit/summation.hpp"

namespace repkit {

struct QuadratureRule1D {
  std::vector<double> nodes;    // ascending, in (-1, 1)
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on P_n from Chebyshev guesses).
inline QuadratureRule1D gauss_legendre(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidResolution, "Gauss-Legendre needs at least one node");
  QuadratureRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    // refresh the derivative at the converged root
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = pk;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Normalized positive quadrature on a compact group realizing the
/// invariant integral. Immutable; copies share the node storage.
class HaarRule {
 public:
  const GroupSpec& group() const noexcept { return data_->group; }
  const std::vector<GroupElement>& nodes() const noexcept { return data_->nodes; }
  const std::vector<double>& weights() const noexcept { return data_->weights; }
  std::size_t resolution() const noexcept { return data_->resolution; }
  std::size_t size() const noexcept { return data_->nodes.size(); }
  /// Uniform rules (finite, circle) integrate as (exact sum) / N.
  bool uniform() const noexcept { return data_->uniform; }

  bool same_rule(const HaarRule& other) const {
    if (data_ == other.data_) return true;
    return same_group(group(), other.group()) && resolution() == other.resolution() && size() == other.size();
  }

 private:
  struct Data {
    GroupSpec group;
    std::vector<GroupElement> nodes;
    std::vector<double> weights;
    std::size_t resolution;
    bool uniform;
  };
  explicit HaarRule(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;

  friend HaarRule haar_rule(const GroupSpec& group, std::size_t resolution);
};

/// Quadrature realizing the invariant integral on the group.
///
/// finite: every element, weight 1/N (resolution ignored beyond >= 1).
/// circle: `resolution` equispaced angles, weight 1/resolution.
/// su2: axis-angle product rule. The class angle t in [0, 2 pi] uses
/// `resolution` Gauss-Legendre nodes against the class density
/// (1/pi) sin^2(t/2); the rotation axis uses `resolution` Gauss-Legendre
/// nodes in cos(polar) times 2*resolution uniform azimuths. Weights are
/// renormalized to sum to one.
inline HaarRule haar_rule(const GroupSpec& group, std::size_t resolution) {
  if (resolution < 1) throw Error(ErrorKind::InvalidResolution, "resolution must be at least 1");
  auto data = std::make_shared<HaarRule::Data>(HaarRule::Data{group, {}, {}, resolution, true});
  switch (group.kind()) {
    case GroupKind::finite: {
      const std::size_t n = group.order();
      for (std::size_t g = 0; g < n; ++g) data->nodes.emplace_back(g);
      data->weights.assign(n, 1.0 / static_cast<double>(n));
      break;
    }
    case GroupKind::circle: {
      for (std::size_t k = 0; k < resolution; ++k) {
        data->nodes.emplace_back(Angle{2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(resolution)});
      }
      data->weights.assign(resolution, 1.0 / static_cast<double>(resolution));
      break;
    }
    case GroupKind::su2: {
      data->uniform = false;
      const auto class_rule = gauss_legendre(resolution);
      const auto polar_rule = gauss_legendre(resolution);
      const std::size_t azimuths = 2 * resolution;
      std::vector<double> raw;
      for (std::size_t i = 0; i < resolution; ++i) {
        const double t = std::numbers::pi * (class_rule.nodes[i] + 1.0);
        const double s = std::sin(t / 2.0);
        // dt = pi dx cancels the 1/pi of the class density
        const double wt = class_rule.weights[i] * s * s;
        for (std::size_t j = 0; j < resolution; ++j) {
          const double z = polar_rule.nodes[j];
          const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          const double wp = polar_rule.weights[j] / 2.0;
          for (std::size_t k = 0; k < azimuths; ++k) {
            const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(azimuths);
            data->nodes.emplace_back(su2_from_axis_angle({rho * std::cos(phi), rho * std::sin(phi), z}, t));
            raw.push_back(wt * wp / static_cast<double>(azimuths));
          }
        }
      }
      const double total = exact_sum(raw);
      for (double& w : raw) w /= total;
      data->weights = std::move(raw);
      break;
    }
  }
  return HaarRule(std::move(data));
}

/// sum_k w_k f(k) over node indices, exact accumulation (order independent).
/// Throws EvaluationFailure when f is non-finite at a node.
template <class F>
Complex integrate_scalar_indexed(const HaarRule& rule, F&& f) {
  ComplexExactSum acc;
  const auto& weights = rule.weights();
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const Complex v = f(k);
    if (!is_finite_value(v)) {
      throw Error(ErrorKind::EvaluationFailure, "integrand not finite at node " + std::to_string(k));
    }
    acc.add(rule.uniform() ? v : weights[k] * v);
  }
  const Complex total = acc.value();
  return rule.uniform() ? total / static_cast<double>(rule.size()) : total;
}

template <class F>
Complex integrate_scalar(const HaarRule& rule, F&& f) {
  const auto& nodes = rule.nodes();
  return integrate_scalar_indexed(rule, [&](std::size_t k) { return Complex(f(nodes[k])); });
}

/// Entrywise integral of a matrix-valued function of node index; the shape
/// must not change between nodes.
template <class F>
ComplexMatrix integrate_matrix_indexed(const HaarRule& rule, F&& f) {
  const auto& weights = rule.weights();
  std::vector<ComplexExactSum> acc;
  std::size_t rows = 0;
  std::size_t cols = 0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const ComplexMatrix m = f(k);
    if (k == 0) {
      rows = m.rows();
      cols = m.cols();
      acc.resize(m.size());
    } else if (m.rows() != rows || m.cols() != cols) {
      throw Error(ErrorKind::ShapeMismatch, "integrand shape changed at node " + std::to_string(k));
    }
    if (!m.all_finite()) throw Error(ErrorKind::EvaluationFailure, "integrand not finite at node " + std::to_string(k));
    const auto vals = m.values();
    for (std::size_t e = 0; e < vals.size(); ++e) acc[e].add(rule.uniform() ? vals[e] : weights[k] * vals[e]);
  }
  ComplexMatrix out(rows, cols);
  const double n = static_cast<double>(rule.size());
  for (std::size_t e = 0; e < acc.size(); ++e) {
    out.values()[e] = rule.uniform() ? acc[e].value() / n : acc[e].value();
  }
  return out;
}

template <class F>
ComplexMatrix integrate_matrix(const HaarRule& rule, F&& f) {
  const auto& nodes = rule.nodes();
  return integrate_matrix_indexed(rule, [&](std::size_t k) { return ComplexMatrix(f(nodes[k])); });
}

namespace detail {

// Unnormalized exact sum of f over the nodes.
template <class F>
Complex node_total(const HaarRule& rule, F&& f) {
  ComplexExactSum acc;
  for (const auto& x : rule.nodes()) acc.add(Complex(f(x)));
  return acc.value();
}

}  // namespace detail

/// Named test integrand for the axiom audit.
struct Probe {
  std::string name;
  std::function<Complex(const GroupElement&)> f;
};

struct AxiomAuditReport {
  double homogeneity = 0.0;        // (i)   max |int(a f) - a int f|, a in {2, i, -1}
  double additivity = 0.0;         // (ii)  max |int(f+g) - int f - int g| over probe pairs
  double positivity_margin = 0.0;  // (iii) min int |f|^2 (must stay > 0)
  double normalization = 0.0;      // (iv)  |int 1 - 1|
  double translation = 0.0;        // (v)   max |int f(ax) - int f|, |int f(xa) - int f|
  double inversion = 0.0;          // (vi)  max |int f(x^-1) - int f|
  std::vector<std::string> probe_names;
  std::vector<std::string> shift_labels;
};

/// Sampled check of the six invariant-integral axioms on the rule's own
/// nodes. Translation invariance is tested unconditionally (no side
/// condition on the shift). Shifted and inverted integrands are evaluated
/// at the transformed nodes.
inline AxiomAuditReport axiom_audit(const HaarRule& rule, const std::vector<Probe>& probes,
                                    const std::vector<GroupElement>& shifts) {
  if (probes.empty()) throw Error(ErrorKind::InvalidArgument, "axiom audit needs at least one probe");
  if (shifts.empty()) throw Error(ErrorKind::InvalidArgument, "axiom audit needs at least one shift");
  const GroupSpec& group = rule.group();
  for (const auto& a : shifts) detail::require_member(group, a);

  AxiomAuditReport report;
  std::vector<Complex> base(probes.size());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    report.probe_names.push_back(probes[p].name);
    base[p] = integrate_scalar(rule, probes[p].f);
  }
  for (const auto& a : shifts) report.shift_labels.push_back(describe(a));

  const Complex alphas[] = {Complex(2.0, 0.0), Complex(0.0, 1.0), Complex(-1.0, 0.0)};
  report.positivity_margin = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto& f = probes[p].f;
    for (const Complex alpha : alphas) {
      const Complex scaled = integrate_scalar(rule, [&](const GroupElement& x) { return alpha * f(x); });
      report.homogeneity = std::max(report.homogeneity, std::abs(scaled - alpha * base[p]));
    }
    for (std::size_t q = p + 1; q < probes.size(); ++q) {
      const auto& g = probes[q].f;
      auto fg = [&](const GroupElement& x) { return f(x) + g(x); };
      double resid;
      if (rule.uniform()) {
        // compare exact node totals before the division by N, which would
        // otherwise round 13/12 and 1/12 + 1 differently
        ComplexExactSum diff;
        diff.add(detail::node_total(rule, fg));
        diff.add(-detail::node_total(rule, f));
        diff.add(-detail::node_total(rule, g));
        resid = std::abs(diff.value()) / static_cast<double>(rule.size());
      } else {
        resid = std::abs(integrate_scalar(rule, fg) - base[p] - base[q]);
      }
      report.additivity = std::max(report.additivity, resid);
    }
    const double pos = integrate_scalar(rule, [&](const GroupElement& x) { return Complex(std::norm(f(x))); }).real();
    report.positivity_margin = std::min(report.positivity_margin, pos);
    for (const auto& a : shifts) {
      const Complex left = integrate_scalar(rule, [&](const GroupElement& x) { return f(multiply(group, a, x)); });
      const Complex right = integrate_scalar(rule, [&](const GroupElement& x) { return f(multiply(group, x, a)); });
      report.translation = std::max({report.translation, std::abs(left - base[p]), std::abs(right - base[p])});
    }
    const Complex inv = integrate_scalar(rule, [&](const GroupElement& x) { return f(inverse(group, x)); });
    report.inversion = std::max(report.inversion, std::abs(inv - base[p]));
  }
  report.normalization = std::abs(integrate_scalar(rule, [](const GroupElement&) { return Complex(1.0); }) - 1.0);
  return report;
}

}  // namespace repkit
