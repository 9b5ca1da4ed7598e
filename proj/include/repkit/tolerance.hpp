#pragma once

namespace repkit::tol {

// Residual thresholds. Every identity the library checks numerically is
// compared against one of these unless the caller passes its own.
inline constexpr double kernel = 1e-12;        // dense kernel reconstruction defects
inline constexpr double structural = 1e-10;    // hermiticity, Jacobi identity, commutation
inline constexpr double definiteness = 1e-10;  // min eigenvalue / max |H| for "positive definite"
inline constexpr double rank = 1e-7;           // singular value / largest singular value
inline constexpr double cluster_gap = 1e-6;    // eigenvalue gap separating split blocks
inline constexpr double multiplicity_window = 0.05;
inline constexpr double singular_condition = 1e12;  // 1-norm condition estimate

}  // namespace repkit::tol
