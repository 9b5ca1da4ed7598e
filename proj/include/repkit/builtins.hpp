#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "repkit/error.hpp"
#include "repkit/group.hpp"
#include "repkit/haar.hpp"
#include "repkit/representation.hpp"

namespace repkit {

/// Named groups available without an input file: z2, z3, s3, circle, su2.
inline GroupSpec builtin_group(const std::string& name) {
  if (name == "z2") return cyclic_group(2);
  if (name == "z3") return cyclic_group(3);
  if (name == "s3") return symmetric_group_3();
  if (name == "circle") return GroupSpec::circle();
  if (name == "su2") return GroupSpec::su2();
  throw Error(ErrorKind::InvalidArgument, "unknown builtin group '" + name + "' (expected z2, z3, s3, circle, su2)");
}

/// Default rule resolution: circle 64, su2 16; finite groups ignore it.
inline std::size_t default_resolution(const GroupSpec& group) {
  switch (group.kind()) {
    case GroupKind::circle: return 64;
    case GroupKind::su2: return 16;
    case GroupKind::finite: return 1;
  }
  return 1;
}

/// Complete list of irreducibles when the group's table is that of Z_n
/// (characters chi_k) or of S3 as ordered by symmetric_group_3() (trivial,
/// sign, standard). Throws InvalidArgument for other finite groups.
inline std::vector<Representation> builtin_irreps(const GroupSpec& group) {
  if (group.kind() != GroupKind::finite) {
    throw Error(ErrorKind::KindMismatch, "builtin irreducible lists exist only for finite groups");
  }
  if (same_group(group, symmetric_group_3())) return {trivial_representation(group), s3_sign(group), s3_standard(group)};
  if (same_group(group, cyclic_group(group.order()))) {
    std::vector<Representation> out;
    for (std::size_t k = 0; k < group.order(); ++k) out.push_back(cyclic_character(group, static_cast<int>(k)));
    return out;
  }
  throw Error(ErrorKind::InvalidArgument, "no builtin irreducible list for group '" + group.name() + "'");
}

inline bool has_builtin_irreps(const GroupSpec& group) {
  return group.kind() == GroupKind::finite &&
         (same_group(group, symmetric_group_3()) || same_group(group, cyclic_group(group.order())));
}

/// Names aligned with builtin_irreps.
inline std::vector<std::string> builtin_irrep_names(const GroupSpec& group) {
  if (same_group(group, symmetric_group_3())) return {"trivial", "sign", "standard"};
  std::vector<std::string> names;
  for (std::size_t k = 0; k < group.order(); ++k) names.push_back(k == 0 ? "trivial" : "chi" + std::to_string(k));
  if (group.order() == 2) names[1] = "sign";
  return names;
}

/// Probe set for the axiom audit.
///   finite: indicator of each element, plus the constant 1
///   circle: e^{ik theta}, |k| <= 8
///   su2:    every matrix entry of spin 1/2 and spin 1
inline std::vector<Probe> standard_probes(const GroupSpec& group) {
  std::vector<Probe> probes;
  switch (group.kind()) {
    case GroupKind::finite:
      for (std::size_t g = 0; g < group.order(); ++g) {
        const auto& labels = group.table().labels;
        probes.push_back({"1[" + (labels.empty() ? std::to_string(g) : labels[g]) + "]",
                          [g](const GroupElement& x) { return Complex(as_index(x) == g ? 1.0 : 0.0); }});
      }
      probes.push_back({"1", [](const GroupElement&) { return Complex(1.0); }});
      break;
    case GroupKind::circle:
      for (int k = -8; k <= 8; ++k) {
        probes.push_back({"exp(" + std::to_string(k) + "i t)",
                          [k](const GroupElement& x) { return std::polar(1.0, k * as_angle(x)); }});
      }
      break;
    case GroupKind::su2:
      for (int two_j : {1, 2}) {
        const Representation rep = spin_irrep(two_j);
        for (std::size_t i = 0; i < rep.degree(); ++i)
          for (std::size_t j = 0; j < rep.degree(); ++j) {
            probes.push_back({describe(rep) + "[" + std::to_string(i) + "," + std::to_string(j) + "]",
                              [rep, i, j](const GroupElement& x) { return evaluate(rep, x)(i, j); }});
          }
      }
      break;
  }
  return probes;
}

/// Shift set for the axiom audit: every element of a finite group, else
/// eight fixed pseudo-random elements.
inline std::vector<GroupElement> standard_shifts(const GroupSpec& group, std::uint64_t seed = 2024) {
  if (group.kind() == GroupKind::finite) return enumerate_or_sample(group, 0, seed);
  return enumerate_or_sample(group, 8, seed);
}

/// Random invertible complex matrix, kept well conditioned by adding a
/// multiple of the identity.
template <class Rng>
ComplexMatrix random_invertible(std::size_t n, Rng& rng, double shift = 2.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(gauss(rng), gauss(rng)) / std::sqrt(2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) m(i, i) += shift;
  return m;
}

}  // namespace repkit
