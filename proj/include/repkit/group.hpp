#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "repkit/error.hpp"
#include "repkit/linalg.hpp"

namespace repkit {

enum class GroupKind { finite, circle, su2 };

inline const char* to_string(GroupKind k) {
  switch (k) {
    case GroupKind::finite: return "finite";
    case GroupKind::circle: return "circle";
    case GroupKind::su2: return "su2";
  }
  return "unknown";
}

/// Multiplication data of a finite group. mult[g * order + h] is the index of gh.
struct FiniteGroupTable {
  std::size_t order = 0;
  std::vector<std::size_t> mult;
  std::vector<std::size_t> inverse;
  std::size_t identity = 0;
  std::vector<std::string> labels;
  std::vector<std::size_t> generators;

  std::size_t product(std::size_t g, std::size_t h) const { return mult[g * order + h]; }
};

/// Angle on the circle group, radians in [0, 2 pi).
struct Angle {
  double radians = 0.0;
};

/// A finite-group index, a circle angle, or a 2x2 special-unitary matrix.
using GroupElement = std::variant<std::size_t, Angle, ComplexMatrix>;

inline std::size_t as_index(const GroupElement& g) {
  if (const auto* p = std::get_if<std::size_t>(&g)) return *p;
  throw Error(ErrorKind::KindMismatch, "expected a finite-group element");
}

inline double as_angle(const GroupElement& g) {
  if (const auto* p = std::get_if<Angle>(&g)) return p->radians;
  throw Error(ErrorKind::KindMismatch, "expected a circle element");
}

inline const ComplexMatrix& as_su2(const GroupElement& g) {
  if (const auto* p = std::get_if<ComplexMatrix>(&g)) return *p;
  throw Error(ErrorKind::KindMismatch, "expected an su2 element");
}

inline double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r -= two_pi;
  return r;
}

// --- SU(2) element helpers -------------------------------------------------

/// Unit quaternion (a, b, c, d) -> [[a - i d, -c - i b], [c - i b, a + i d]],
/// i.e. a I - i (b sx + c sy + d sz).
inline ComplexMatrix su2_from_quaternion(double a, double b, double c, double d) {
  const double n = std::sqrt(a * a + b * b + c * c + d * d);
  if (!(n > 0.0)) throw Error(ErrorKind::InvalidArgument, "zero quaternion");
  a /= n;
  b /= n;
  c /= n;
  d /= n;
  return ComplexMatrix{{Complex(a, -d), Complex(-c, -b)}, {Complex(c, -b), Complex(a, d)}};
}

/// exp(-i t/2 n.sigma) = cos(t/2) I - i sin(t/2) n.sigma for a unit axis n.
inline ComplexMatrix su2_from_axis_angle(const std::array<double, 3>& axis, double t) {
  const double s = std::sin(t / 2.0);
  return su2_from_quaternion(std::cos(t / 2.0), s * axis[0], s * axis[1], s * axis[2]);
}

/// Class angle t in [0, 2 pi] with tr U = 2 cos(t/2).
inline double su2_class_angle(const ComplexMatrix& u) {
  const double half_trace = std::clamp(u.trace().real() / 2.0, -1.0, 1.0);
  return 2.0 * std::acos(half_trace);
}

inline double su2_defect(const ComplexMatrix& u) {
  if (u.rows() != 2 || u.cols() != 2) return std::numeric_limits<double>::infinity();
  const Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  return std::max(unitarity_defect(u), std::abs(det - 1.0));
}

/// Nearest special-unitary matrix in the quaternion sense: keep the
/// [[a, -conj b], [b, conj a]] part and renormalize.
inline ComplexMatrix project_to_su2(const ComplexMatrix& m) {
  const Complex a = (m(0, 0) + std::conj(m(1, 1))) * 0.5;
  const Complex b = (m(1, 0) - std::conj(m(0, 1))) * 0.5;
  // a = qa - i qd, b = qc - i qb
  return su2_from_quaternion(a.real(), -b.imag(), b.real(), -a.imag());
}

/// Compact group descriptor: a validated finite group, the circle, or SU(2).
class GroupSpec {
 public:
  static GroupSpec circle() { return GroupSpec(GroupKind::circle, nullptr, "circle"); }
  static GroupSpec su2() { return GroupSpec(GroupKind::su2, nullptr, "su2"); }

  /// Validates the table: Latin square, identity, inverses, associativity
  /// (exhaustive up to 64 elements, 10^4 sampled triples above).
  static GroupSpec finite(FiniteGroupTable table, std::string name = "finite") {
    validate(table);
    return GroupSpec(GroupKind::finite, std::make_shared<const FiniteGroupTable>(std::move(table)), std::move(name));
  }

  GroupKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  const FiniteGroupTable& table() const {
    if (!table_) throw Error(ErrorKind::KindMismatch, "group has no multiplication table");
    return *table_;
  }

  std::size_t order() const { return table().order; }

  friend bool same_group(const GroupSpec& a, const GroupSpec& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ != GroupKind::finite) return true;
    if (a.table_ == b.table_) return true;
    return a.table_->order == b.table_->order && a.table_->mult == b.table_->mult &&
           a.table_->identity == b.table_->identity;
  }

  bool contains(const GroupElement& g) const {
    switch (kind_) {
      case GroupKind::finite: {
        const auto* p = std::get_if<std::size_t>(&g);
        return p && *p < table_->order;
      }
      case GroupKind::circle: return std::holds_alternative<Angle>(g);
      case GroupKind::su2: {
        const auto* p = std::get_if<ComplexMatrix>(&g);
        return p && su2_defect(*p) <= 1e-10;
      }
    }
    return false;
  }

 private:
  GroupSpec(GroupKind kind, std::shared_ptr<const FiniteGroupTable> table, std::string name)
      : kind_(kind), table_(std::move(table)), name_(std::move(name)) {}

  static void validate(const FiniteGroupTable& t) {
    const std::size_t n = t.order;
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidGroup, msg); };
    if (n == 0) fail("group must have at least one element");
    if (t.mult.size() != n * n) fail("multiplication table must be " + std::to_string(n) + "x" + std::to_string(n));
    if (t.inverse.size() != n) fail("inverse table must have " + std::to_string(n) + " entries");
    if (t.identity >= n) fail("identity index out of range");
    if (!t.labels.empty() && t.labels.size() != n) fail("label count differs from group order");
    for (std::size_t x : t.mult)
      if (x >= n) fail("multiplication table entry out of range");
    for (std::size_t g : t.generators)
      if (g >= n) fail("generator index out of range");

    std::vector<char> seen(n);
    for (std::size_t r = 0; r < n; ++r) {
      std::fill(seen.begin(), seen.end(), 0);
      for (std::size_t c = 0; c < n; ++c) {
        if (seen[t.product(r, c)]++) {
          fail("Latin square check failed: row " + std::to_string(r) + " repeats element " +
               std::to_string(t.product(r, c)));
        }
      }
    }
    for (std::size_t c = 0; c < n; ++c) {
      std::fill(seen.begin(), seen.end(), 0);
      for (std::size_t r = 0; r < n; ++r) {
        if (seen[t.product(r, c)]++) {
          fail("Latin square check failed: column " + std::to_string(c) + " repeats element " +
               std::to_string(t.product(r, c)));
        }
      }
    }
    for (std::size_t g = 0; g < n; ++g) {
      if (t.product(t.identity, g) != g || t.product(g, t.identity) != g) {
        fail("element " + std::to_string(t.identity) + " is not a two-sided identity");
      }
      if (t.inverse[g] >= n || t.product(g, t.inverse[g]) != t.identity ||
          t.product(t.inverse[g], g) != t.identity) {
        fail("inverse table wrong for element " + std::to_string(g));
      }
    }
    auto assoc = [&](std::size_t a, std::size_t b, std::size_t c) {
      if (t.product(t.product(a, b), c) != t.product(a, t.product(b, c))) {
        fail("associativity fails for (" + std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(c) +
             ")");
      }
    };
    if (n <= 64) {
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t c = 0; c < n; ++c) assoc(a, b, c);
    } else {
      std::mt19937_64 rng(0x5eed);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (int k = 0; k < 10000; ++k) assoc(pick(rng), pick(rng), pick(rng));
    }
  }

  GroupKind kind_;
  std::shared_ptr<const FiniteGroupTable> table_;
  std::string name_;
};

namespace detail {
inline void require_member(const GroupSpec& group, const GroupElement& g) {
  if (!group.contains(g)) {
    throw Error(ErrorKind::KindMismatch, std::string("element does not belong to the ") + to_string(group.kind()) +
                                             " group");
  }
}
}  // namespace detail

inline GroupElement identity(const GroupSpec& group) {
  switch (group.kind()) {
    case GroupKind::finite: return group.table().identity;
    case GroupKind::circle: return Angle{0.0};
    case GroupKind::su2: return ComplexMatrix::identity(2);
  }
  throw Error(ErrorKind::KindMismatch, "unknown group kind");
}

/// Group product gh. SU(2) products are re-projected onto the group when
/// their unitarity or determinant drift exceeds 1e-12.
inline GroupElement multiply(const GroupSpec& group, const GroupElement& g, const GroupElement& h) {
  switch (group.kind()) {
    case GroupKind::finite: {
      const std::size_t a = as_index(g);
      const std::size_t b = as_index(h);
      if (a >= group.order() || b >= group.order()) throw Error(ErrorKind::KindMismatch, "index out of range");
      return group.table().product(a, b);
    }
    case GroupKind::circle: return Angle{wrap_angle(as_angle(g) + as_angle(h))};
    case GroupKind::su2: {
      ComplexMatrix p = as_su2(g) * as_su2(h);
      if (su2_defect(p) > 1e-12) p = project_to_su2(p);
      return p;
    }
  }
  throw Error(ErrorKind::KindMismatch, "unknown group kind");
}

inline GroupElement inverse(const GroupSpec& group, const GroupElement& g) {
  switch (group.kind()) {
    case GroupKind::finite: {
      const std::size_t a = as_index(g);
      if (a >= group.order()) throw Error(ErrorKind::KindMismatch, "index out of range");
      return group.table().inverse[a];
    }
    case GroupKind::circle: return Angle{wrap_angle(-as_angle(g))};
    case GroupKind::su2: return as_su2(g).adjoint();
  }
  throw Error(ErrorKind::KindMismatch, "unknown group kind");
}

/// Haar-random SU(2) element: a normalized Gaussian quaternion.
template <class Rng>
ComplexMatrix random_su2(Rng& rng) {
  std::normal_distribution<double> gauss;
  return su2_from_quaternion(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
}

/// Finite groups: every element when count is 0 or at least the order,
/// otherwise count elements drawn with replacement. Circle and SU(2):
/// count uniformly (Haar) random elements. Deterministic in seed.
inline std::vector<GroupElement> enumerate_or_sample(const GroupSpec& group, std::size_t count,
                                                     std::uint64_t seed = 1) {
  std::vector<GroupElement> out;
  std::mt19937_64 rng(seed);
  switch (group.kind()) {
    case GroupKind::finite: {
      const std::size_t n = group.order();
      if (count == 0 || count >= n) {
        for (std::size_t g = 0; g < n; ++g) out.emplace_back(g);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t k = 0; k < count; ++k) out.emplace_back(pick(rng));
      }
      break;
    }
    case GroupKind::circle: {
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      for (std::size_t k = 0; k < count; ++k) out.emplace_back(Angle{wrap_angle(angle(rng))});
      break;
    }
    case GroupKind::su2: {
      for (std::size_t k = 0; k < count; ++k) out.emplace_back(random_su2(rng));
      break;
    }
  }
  return out;
}

inline std::string describe(const GroupElement& g) {
  if (const auto* p = std::get_if<std::size_t>(&g)) return "#" + std::to_string(*p);
  if (const auto* p = std::get_if<Angle>(&g)) return "theta=" + std::to_string(p->radians);
  const auto& u = std::get<ComplexMatrix>(g);
  return "su2(t=" + std::to_string(su2_class_angle(u)) + ")";
}

// --- built-in finite groups ------------------------------------------------

inline GroupSpec cyclic_group(std::size_t n) {
  FiniteGroupTable t;
  t.order = n;
  t.mult.resize(n * n);
  t.inverse.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) t.mult[a * n + b] = (a + b) % n;
    t.inverse[a] = (n - a) % n;
    t.labels.push_back("g^" + std::to_string(a));
  }
  t.identity = 0;
  if (n > 1) t.generators = {1};
  return GroupSpec::finite(std::move(t), "z" + std::to_string(n));
}

/// The six permutations of {0,1,2}, listed as images (p(0), p(1), p(2)).
inline const std::array<std::array<int, 3>, 6>& s3_permutations() {
  static const std::array<std::array<int, 3>, 6> perms{{
      {0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}, {1, 2, 0}, {2, 0, 1},
  }};
  return perms;
}

/// Symmetric group S3, elements ordered e, (01), (12), (02), (012), (021);
/// product gh means "apply h, then g".
inline GroupSpec symmetric_group_3() {
  const auto& perms = s3_permutations();
  auto index_of = [&](const std::array<int, 3>& p) {
    for (std::size_t k = 0; k < perms.size(); ++k)
      if (perms[k] == p) return k;
    throw Error(ErrorKind::InvalidGroup, "permutation not found");
  };
  FiniteGroupTable t;
  t.order = 6;
  t.mult.resize(36);
  t.inverse.resize(6);
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
      t.mult[a * 6 + b] = index_of(c);
    }
    std::array<int, 3> inv{};
    for (int i = 0; i < 3; ++i) inv[perms[a][i]] = i;
    t.inverse[a] = index_of(inv);
  }
  t.identity = 0;
  t.labels = {"e", "(01)", "(12)", "(02)", "(012)", "(021)"};
  t.generators = {1, 4};
  return GroupSpec::finite(std::move(t), "s3");
}

}  // namespace repkit
