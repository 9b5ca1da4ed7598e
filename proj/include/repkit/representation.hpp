#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "repkit/error.hpp"
#include "repkit/group.hpp"
#include "repkit/haar.hpp"
#include "repkit/linalg.hpp"

namespace repkit {

namespace rep_detail {
struct Node;
}

/// Finite-degree matrix representation of a compact group. Immutable value
/// with shared structure; combinators (direct sum, conjugation, projected
/// blocks) build trees evaluated on demand.
class Representation {
 public:
  const GroupSpec& group() const noexcept { return group_; }
  std::size_t degree() const noexcept { return degree_; }
  const rep_detail::Node& node() const noexcept { return *node_; }

  Representation(GroupSpec group, std::size_t degree, std::shared_ptr<const rep_detail::Node> node)
      : group_(std::move(group)), degree_(degree), node_(std::move(node)) {}

 private:
  GroupSpec group_;
  std::size_t degree_;
  std::shared_ptr<const rep_detail::Node> node_;
};

namespace rep_detail {

struct FiniteTable {
  std::vector<ComplexMatrix> matrices;  // indexed by group element
};

/// Circle acting as diag(e^{i n_k theta}).
struct CircleWeights {
  std::vector<int> weights;
};

struct Su2Spin {
  int two_j;
};

struct DirectSum {
  Representation first;
  Representation second;
};

/// x -> A rho(x) A^-1
struct Conjugated {
  Representation inner;
  ComplexMatrix a;
  ComplexMatrix a_inv;
};

/// Diagonal block [offset, offset + degree) of P rho(x) P^-1; `leakage` is
/// the off-block magnitude measured when the block was extracted.
struct Projected {
  Representation parent;
  ComplexMatrix p;
  ComplexMatrix p_inv;
  std::size_t offset;
  double leakage;
};

struct Node {
  std::variant<FiniteTable, CircleWeights, Su2Spin, DirectSum, Conjugated, Projected> body;
};

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Sym^n of the defining action in the orthonormal monomial basis
// f_k = sqrt(C(n,k)) v1^{n-k} v2^k:
//   U f_k = sqrt(C(n,k)) (U00 v1 + U10 v2)^{n-k} (U01 v1 + U11 v2)^k.
inline ComplexMatrix symmetric_power(const ComplexMatrix& u, int n) {
  const std::size_t d = static_cast<std::size_t>(n) + 1;
  ComplexMatrix out(d, d);
  std::vector<Complex> left;
  std::vector<Complex> right;
  for (int k = 0; k <= n; ++k) {
    // coefficients of v2^a in (U00 v1 + U10 v2)^{n-k}
    left.assign(static_cast<std::size_t>(n - k) + 1, Complex{});
    for (int a = 0; a <= n - k; ++a) {
      left[a] = binomial(n - k, a) * std::pow(u(1, 0), a) * std::pow(u(0, 0), n - k - a);
    }
    right.assign(static_cast<std::size_t>(k) + 1, Complex{});
    for (int b = 0; b <= k; ++b) {
      right[b] = binomial(k, b) * std::pow(u(1, 1), b) * std::pow(u(0, 1), k - b);
    }
    for (int a = 0; a <= n - k; ++a) {
      for (int b = 0; b <= k; ++b) {
        const int m = a + b;
        out(m, k) += left[a] * right[b];
      }
    }
    for (int m = 0; m <= n; ++m) out(m, k) *= std::sqrt(binomial(n, k) / binomial(n, m));
  }
  return out;
}

}  // namespace rep_detail

inline ComplexMatrix evaluate(const Representation& rep, const GroupElement& g);

namespace rep_detail {

struct Evaluator {
  const Representation& rep;
  const GroupElement& g;

  ComplexMatrix operator()(const FiniteTable& t) const { return t.matrices[as_index(g)]; }

  ComplexMatrix operator()(const CircleWeights& w) const {
    const double theta = as_angle(g);
    ComplexMatrix out(w.weights.size(), w.weights.size());
    for (std::size_t k = 0; k < w.weights.size(); ++k) out(k, k) = std::polar(1.0, w.weights[k] * theta);
    return out;
  }

  ComplexMatrix operator()(const Su2Spin& s) const {
    if (s.two_j == 0) return ComplexMatrix::identity(1);
    return symmetric_power(as_su2(g), s.two_j);
  }

  ComplexMatrix operator()(const DirectSum& s) const {
    return block_diagonal(evaluate(s.first, g), evaluate(s.second, g));
  }

  ComplexMatrix operator()(const Conjugated& c) const { return c.a * evaluate(c.inner, g) * c.a_inv; }

  ComplexMatrix operator()(const Projected& p) const {
    const ComplexMatrix full = p.p * evaluate(p.parent, g) * p.p_inv;
    return full.block(p.offset, p.offset, rep.degree(), rep.degree());
  }
};

}  // namespace rep_detail

/// rho(g). Throws KindMismatch when g is not an element of rep.group().
inline ComplexMatrix evaluate(const Representation& rep, const GroupElement& g) {
  detail::require_member(rep.group(), g);
  return std::visit(rep_detail::Evaluator{rep, g}, rep.node().body);
}

inline std::string describe(const Representation& rep) {
  struct Namer {
    std::string operator()(const rep_detail::FiniteTable& t) const {
      return "table(" + std::to_string(t.matrices.empty() ? 0 : t.matrices.front().rows()) + ")";
    }
    std::string operator()(const rep_detail::CircleWeights& w) const {
      std::string s = "weights[";
      for (std::size_t k = 0; k < w.weights.size(); ++k) s += (k ? "," : "") + std::to_string(w.weights[k]);
      return s + "]";
    }
    std::string operator()(const rep_detail::Su2Spin& s) const {
      return s.two_j % 2 == 0 ? "spin(" + std::to_string(s.two_j / 2) + ")"
                              : "spin(" + std::to_string(s.two_j) + "/2)";
    }
    std::string operator()(const rep_detail::DirectSum& s) const {
      return "sum(" + describe(s.first) + ", " + describe(s.second) + ")";
    }
    std::string operator()(const rep_detail::Conjugated& c) const { return "conj(" + describe(c.inner) + ")"; }
    std::string operator()(const rep_detail::Projected& p) const {
      return "block(" + describe(p.parent) + ", " + std::to_string(p.offset) + ")";
    }
  };
  return std::visit(Namer{}, rep.node().body);
}

// --- constructors ----------------------------------------------------------

/// Finite-group representation from its complete matrix table. Checks the
/// shape, finiteness, and that the identity element maps to the identity
/// matrix (within 1e-12); the homomorphism property itself is audited
/// separately (homomorphism_audit) so damaged tables can still be studied.
inline Representation finite_table(const GroupSpec& group, std::vector<ComplexMatrix> matrices) {
  if (group.kind() != GroupKind::finite) throw Error(ErrorKind::KindMismatch, "matrix tables need a finite group");
  if (matrices.size() != group.order()) {
    throw Error(ErrorKind::ShapeMismatch, "table has " + std::to_string(matrices.size()) + " matrices for a group of order " +
                                              std::to_string(group.order()));
  }
  const std::size_t r = matrices.front().rows();
  if (r == 0) throw Error(ErrorKind::ShapeMismatch, "representation degree must be positive");
  for (std::size_t g = 0; g < matrices.size(); ++g) {
    if (matrices[g].rows() != r || matrices[g].cols() != r) {
      throw Error(ErrorKind::ShapeMismatch, "matrix for element " + std::to_string(g) + " is not " + std::to_string(r) +
                                                "x" + std::to_string(r));
    }
    if (!matrices[g].all_finite()) throw Error(ErrorKind::InvalidArgument, "non-finite entry for element " + std::to_string(g));
  }
  const auto& e = matrices[group.table().identity];
  if (max_abs_diff(e, ComplexMatrix::identity(r)) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument,
                "identity element is not represented by the identity matrix (a representation is a homomorphism)");
  }
  auto node = std::make_shared<rep_detail::Node>(rep_detail::Node{rep_detail::FiniteTable{std::move(matrices)}});
  return Representation(group, r, std::move(node));
}

template <class F>
Representation finite_table_from(const GroupSpec& group, F&& f) {
  std::vector<ComplexMatrix> mats;
  for (std::size_t g = 0; g < group.order(); ++g) mats.push_back(f(g));
  return finite_table(group, std::move(mats));
}

inline Representation circle_weights(std::vector<int> weights) {
  if (weights.empty()) throw Error(ErrorKind::InvalidArgument, "circle representation needs at least one weight");
  const std::size_t r = weights.size();
  auto node = std::make_shared<rep_detail::Node>(rep_detail::Node{rep_detail::CircleWeights{std::move(weights)}});
  return Representation(GroupSpec::circle(), r, std::move(node));
}

/// Spin-j irreducible of SU(2), j = two_j / 2, as the 2j-th symmetric power
/// of the defining representation in an orthonormal monomial basis.
inline Representation spin_irrep(int two_j) {
  if (two_j < 0 || two_j > 12) {
    throw Error(ErrorKind::SpinOutOfRange, "2j must lie in [0, 12], got " + std::to_string(two_j));
  }
  auto node = std::make_shared<rep_detail::Node>(rep_detail::Node{rep_detail::Su2Spin{two_j}});
  return Representation(GroupSpec::su2(), static_cast<std::size_t>(two_j) + 1, std::move(node));
}

inline Representation direct_sum(const Representation& a, const Representation& b) {
  if (!same_group(a.group(), b.group())) throw Error(ErrorKind::GroupMismatch, "direct sum of representations of different groups");
  auto node = std::make_shared<rep_detail::Node>(rep_detail::Node{rep_detail::DirectSum{a, b}});
  return Representation(a.group(), a.degree() + b.degree(), std::move(node));
}

inline Representation direct_sum(const std::vector<Representation>& parts) {
  if (parts.empty()) throw Error(ErrorKind::InvalidArgument, "direct sum of nothing");
  Representation acc = parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) acc = direct_sum(acc, parts[k]);
  return acc;
}

/// Equivalent representation x -> A rho(x) A^-1.
inline Representation conjugate(const Representation& rep, const ComplexMatrix& a) {
  if (a.rows() != rep.degree() || a.cols() != rep.degree()) {
    throw Error(ErrorKind::ShapeMismatch, "conjugating matrix is " + a.shape_string() + ", degree is " +
                                              std::to_string(rep.degree()));
  }
  ComplexMatrix a_inv = invert(a);
  auto node = std::make_shared<rep_detail::Node>(rep_detail::Node{rep_detail::Conjugated{rep, a, std::move(a_inv)}});
  return Representation(rep.group(), rep.degree(), std::move(node));
}

/// Diagonal block of P rho P^-1 starting at `offset` with the given degree.
inline Representation projected_block(const Representation& parent, const ComplexMatrix& p, const ComplexMatrix& p_inv,
                                      std::size_t offset, std::size_t degree, double leakage) {
  if (offset + degree > parent.degree() || degree == 0) throw Error(ErrorKind::ShapeMismatch, "block outside parent");
  auto node =
      std::make_shared<rep_detail::Node>(rep_detail::Node{rep_detail::Projected{parent, p, p_inv, offset, leakage}});
  return Representation(parent.group(), degree, std::move(node));
}

inline Representation trivial_representation(const GroupSpec& group) {
  switch (group.kind()) {
    case GroupKind::finite: return finite_table_from(group, [](std::size_t) { return ComplexMatrix::identity(1); });
    case GroupKind::circle: return circle_weights({0});
    case GroupKind::su2: return spin_irrep(0);
  }
  throw Error(ErrorKind::KindMismatch, "unknown group kind");
}

// --- audits ----------------------------------------------------------------

/// max over pairs (x, y) of max |rho(xy) - rho(x) rho(y)|. Finite groups with
/// N^2 <= 10^4 use every pair; otherwise pair_count sampled pairs.
inline double homomorphism_audit(const Representation& rep, std::size_t pair_count, std::uint64_t seed = 7) {
  if (pair_count < 1) throw Error(ErrorKind::InvalidArgument, "pair_count must be at least 1");
  const GroupSpec& group = rep.group();
  double worst = 0.0;
  auto check = [&](const GroupElement& x, const GroupElement& y) {
    const ComplexMatrix lhs = evaluate(rep, multiply(group, x, y));
    worst = std::max(worst, max_abs_diff(lhs, evaluate(rep, x) * evaluate(rep, y)));
  };
  if (group.kind() == GroupKind::finite && group.order() * group.order() <= 10000) {
    for (std::size_t x = 0; x < group.order(); ++x)
      for (std::size_t y = 0; y < group.order(); ++y) check(x, y);
    return worst;
  }
  const auto xs = enumerate_or_sample(group, pair_count, seed);
  const auto ys = enumerate_or_sample(group, pair_count, seed + 1);
  for (std::size_t k = 0; k < pair_count; ++k) check(xs[k % xs.size()], ys[k % ys.size()]);
  return worst;
}

/// max over rule nodes of max |rho(x)* rho(x) - I|
inline double unitarity_audit(const Representation& rep, const HaarRule& rule) {
  double worst = 0.0;
  for (const auto& x : rule.nodes()) worst = std::max(worst, unitarity_defect(evaluate(rep, x)));
  return worst;
}

/// Class function x -> tr rho(x) sampled at the nodes of a rule.
struct Character {
  std::vector<Complex> values;
  std::size_t degree = 0;
  Complex identity_value;  // tr rho(e), equal to the degree
  HaarRule rule;
};

namespace detail {
inline void require_same_group(const Representation& rep, const HaarRule& rule) {
  if (!same_group(rep.group(), rule.group())) {
    throw Error(ErrorKind::GroupMismatch, "representation and rule live on different groups");
  }
}
}  // namespace detail

inline Character character(const Representation& rep, const HaarRule& rule) {
  detail::require_same_group(rep, rule);
  std::vector<Complex> values;
  values.reserve(rule.size());
  for (const auto& x : rule.nodes()) values.push_back(evaluate(rep, x).trace());
  return Character{std::move(values), rep.degree(), evaluate(rep, identity(rep.group())).trace(), rule};
}

/// max over nodes x and shifts a of |tr rho(a^-1 x a) - tr rho(x)|
inline double class_invariance_audit(const Representation& rep, const HaarRule& rule,
                                     const std::vector<GroupElement>& shifts) {
  if (shifts.empty()) throw Error(ErrorKind::InvalidArgument, "class invariance audit needs shifts");
  detail::require_same_group(rep, rule);
  const GroupSpec& group = rep.group();
  double worst = 0.0;
  for (const auto& x : rule.nodes()) {
    const Complex chi = evaluate(rep, x).trace();
    for (const auto& a : shifts) {
      const GroupElement conj = multiply(group, multiply(group, inverse(group, a), x), a);
      worst = std::max(worst, std::abs(evaluate(rep, conj).trace() - chi));
    }
  }
  return worst;
}

// --- built-in finite-group representations ----------------------------------

/// One-dimensional character k of Z_n: g -> exp(2 pi i k g / n).
inline Representation cyclic_character(const GroupSpec& zn, int k) {
  const std::size_t n = zn.order();
  return finite_table_from(zn, [&](std::size_t g) {
    const long long e = (static_cast<long long>(k) * static_cast<long long>(g)) % static_cast<long long>(n);
    ComplexMatrix m(1, 1);
    m(0, 0) = e == 0 ? Complex(1.0) : std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e) / n);
    return m;
  });
}

/// Left regular representation: rho(g) e_h = e_{gh}.
inline Representation regular_representation(const GroupSpec& group) {
  const std::size_t n = group.order();
  return finite_table_from(group, [&](std::size_t g) {
    ComplexMatrix m(n, n);
    for (std::size_t h = 0; h < n; ++h) m(group.table().product(g, h), h) = 1.0;
    return m;
  });
}

/// Sign of the permutation, for S3 as built by symmetric_group_3().
inline Representation s3_sign(const GroupSpec& s3) {
  return finite_table_from(s3, [](std::size_t g) {
    const auto& p = s3_permutations()[g];
    int inversions = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) inversions += p[i] > p[j];
    ComplexMatrix m(1, 1);
    m(0, 0) = inversions % 2 == 0 ? 1.0 : -1.0;
    return m;
  });
}

/// Two-dimensional standard representation of S3: the permutation action on
/// the sum-zero plane of R^3 in the orthonormal basis (1,-1,0)/sqrt2,
/// (1,1,-2)/sqrt6. Real orthogonal matrices.
inline Representation s3_standard(const GroupSpec& s3) {
  const double a = 1.0 / std::sqrt(2.0);
  const double b = 1.0 / std::sqrt(6.0);
  const double basis[3][2] = {{a, b}, {-a, b}, {0.0, -2.0 * b}};
  return finite_table_from(s3, [&](std::size_t g) {
    const auto& p = s3_permutations()[g];
    ComplexMatrix m(2, 2);
    // (B^T P_g B)_{rc} = sum_i B[p(i)][r] B[i][c]
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += basis[p[i]][r] * basis[i][c];
        m(r, c) = std::abs(s) < 1e-15 ? 0.0 : s;
      }
    return m;
  });
}

}  // namespace repkit
