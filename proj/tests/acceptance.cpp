// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "eigen_oracles.hpp"
#include "oracles.hpp"
#include "repkit/builtins.hpp"
#include "repkit/haar.hpp"
#include "repkit/lie_algebra.hpp"
#include "repkit/schur.hpp"
#include "repkit/unitarize.hpp"

using namespace repkit;

namespace {

// Collects failed checks for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void at_most(double value, double limit, const std::string& what) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " = %.3e > %.1e", value, limit);
    expect(std::isfinite(value) && value <= limit, what + buf);
  }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<void(Check&)> body;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Complex trace_at(const Representation& rep, const GroupElement& x) { return evaluate(rep, x).trace(); }

double spin_character(int two_j, double t) {
  const double s = std::sin(t / 2.0);
  if (std::abs(s) < 1e-9) return std::cos(t / 2.0) > 0 || two_j % 2 == 0 ? two_j + 1.0 : -(two_j + 1.0);
  return std::sin((two_j + 1) * t / 2.0) / s;
}

std::vector<ComplexMatrix> generator_images(const Representation& rep) {
  std::vector<GroupElement> gens;
  switch (rep.group().kind()) {
    case GroupKind::finite: gens = enumerate_or_sample(rep.group(), 0); break;
    case GroupKind::circle: gens = {Angle{1.0}, Angle{2.5}}; break;
    case GroupKind::su2: gens = enumerate_or_sample(rep.group(), 2, 99); break;
  }
  std::vector<ComplexMatrix> out;
  for (const auto& g : gens) out.push_back(evaluate(rep, g));
  return out;
}

HaarRule default_rule(const GroupSpec& g) { return haar_rule(g, default_resolution(g)); }

struct Shell {
  int code;
  std::string out;
};

Shell shell(const std::string& args) {
  const std::string cmd = std::string(REPKIT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

// --- criteria -----------------------------------------------------------------

void su2_orthonormality(Check& c) {
  const auto alg = su2_standard();
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      const double v = trace_scalar_product(alg.basis[a], alg.basis[b]);
      c.at_most(std::abs(v - (a == b ? 1.0 : 0.0)), 1e-14, "-tr(XY) gram entry");
    }
  // adjoint matrices written out from [H,E] = r F, [H,F] = -r E, [E,F] = r H
  const double r = std::sqrt(2.0);
  const std::array<RealMatrix, 3> hand{
      RealMatrix{{0, 0, 0}, {0, 0, -r}, {0, r, 0}},
      RealMatrix{{0, 0, r}, {0, 0, 0}, {-r, 0, 0}},
      RealMatrix{{0, -r, 0}, {r, 0, 0}, {0, 0, 0}},
  };
  const auto spec = structure_constants(alg);
  const auto tf = trace_form(spec);
  for (std::size_t a = 0; a < 3; ++a) {
    c.at_most(max_abs_diff(adjoint_matrix(spec, spec.basis_vector(a)), hand[a]), 1e-12, "adjoint vs hand oracle");
    for (std::size_t b = 0; b < 3; ++b) {
      const double oracle = -(hand[a] * hand[b]).trace();
      c.at_most(std::abs(tf.gram(a, b) - oracle), 1e-12, "adjoint gram vs hand oracle");
      c.at_most(std::abs(tf.gram(a, b) - (a == b ? 4.0 : 0.0)), 1e-12, "adjoint gram vs diag(4,4,4)");
    }
  }
}

void compactness(Check& c) {
  const auto su2 = trace_form(structure_constants(su2_standard()));
  c.expect(su2.classification == Compactness::compact_semisimple, "su(2) verdict");
  c.expect(trace_form(sl2r()).classification == Compactness::not_compact_type, "sl(2,R) verdict");
  const auto ab = trace_form(abelian(3));
  c.expect(ab.classification == Compactness::compact_with_center, "abelian R^3 verdict");
  c.expect(ab.center_basis.size() == 3, "abelian R^3 center is the whole space");
}

void haar_axioms(Check& c) {
  auto audit = [](const GroupSpec& g, std::size_t res) { return axiom_audit(haar_rule(g, res), standard_probes(g), standard_shifts(g)); };
  for (const char* name : {"z2", "z3", "s3"}) {
    const auto r = audit(builtin_group(name), 1);
    for (double v : {r.homogeneity, r.additivity, r.normalization, r.translation, r.inversion})
      c.expect(v == 0.0, std::string(name) + " residual not exactly 0");
    c.expect(r.positivity_margin > 0.0, std::string(name) + " positivity");
  }
  const auto circle = audit(GroupSpec::circle(), 64);
  for (double v : {circle.homogeneity, circle.additivity, circle.normalization, circle.translation, circle.inversion})
    c.at_most(v, 1e-12, "circle residual");
  c.expect(circle.positivity_margin > 0.0, "circle positivity");
  const auto fine = audit(GroupSpec::su2(), 16);
  for (double v : {fine.homogeneity, fine.additivity, fine.normalization, fine.translation, fine.inversion})
    c.at_most(v, 1e-6, "su2 residual");
  c.expect(fine.positivity_margin > 0.0, "su2 positivity");
  const auto coarse = audit(GroupSpec::su2(), 8);
  c.expect(coarse.translation > fine.translation, "su2 resolution 8 does not worsen axiom (v)");
}

void unitarization(Check& c) {
  std::mt19937_64 rng(0xacce4);
  const auto z3 = cyclic_group(3);
  const auto s3 = symmetric_group_3();
  const std::vector<std::vector<Representation>> pools{
      {regular_representation(z3), direct_sum(cyclic_character(z3, 1), cyclic_character(z3, 2)), cyclic_character(z3, 1)},
      {s3_standard(s3), regular_representation(s3), direct_sum(s3_standard(s3), s3_sign(s3))},
      {circle_weights({1, -1}), circle_weights({0, 2, -3}), circle_weights({4})},
      {spin_irrep(1), spin_irrep(2), direct_sum(spin_irrep(0), spin_irrep(1)), direct_sum(spin_irrep(1), spin_irrep(2))},
  };
  for (const auto& pool : pools) {
    const GroupSpec& g = pool.front().group();
    const bool su2 = g.kind() == GroupKind::su2;
    const auto rule = default_rule(g);
    for (int trial = 0; trial < 20; ++trial) {
      const Representation& base = pool[static_cast<std::size_t>(trial) % pool.size()];
      const auto rep = conjugate(base, random_invertible(base.degree(), rng));
      const auto u = unitarize(rep, rule);
      c.at_most(u.unitarity_residual, su2 ? 1e-5 : 1e-8, g.name() + " unitarity residual");
      double chi = 0.0;
      for (const auto& x : rule.nodes()) chi = std::max(chi, std::abs(trace_at(u.unitary_rep, x) - trace_at(base, x)));
      c.at_most(chi, 1e-9, g.name() + " character change");
    }
  }
  const auto z2 = cyclic_group(2);
  const auto m = finite_table(z2, {ComplexMatrix::identity(2), ComplexMatrix{{0.0, 2.0}, {0.5, 0.0}}});
  const auto form = averaged_form(m, haar_rule(z2, 1));
  c.at_most(max_abs_diff(form.gram, ComplexMatrix::diagonal({5.0 / 8.0, 5.0 / 2.0})), 1e-12, "Z2 hand oracle H");
}

void schur_dichotomy(Check& c) {
  std::mt19937_64 rng(0xd1c0);
  const auto s3 = symmetric_group_3();
  const std::vector<std::pair<Representation, Representation>> pairs{
      {circle_weights({1}), circle_weights({2})},
      {spin_irrep(1), spin_irrep(2)},
      {trivial_representation(s3), s3_sign(s3)},
      {trivial_representation(s3), s3_standard(s3)},
      {s3_sign(s3), s3_standard(s3)},
  };
  for (const auto& [phi, psi] : pairs) {
    const auto rule = default_rule(phi.group());
    const double tol = phi.group().kind() == GroupKind::su2 ? 1e-6 : 1e-10;
    for (int trial = 0; trial < 10; ++trial) {
      const auto t = averaged_intertwiner(phi, psi, oracle::gaussian(phi.degree(), psi.degree(), rng), rule);
      c.at_most(t.t.max_abs(), tol, describe(phi) + " vs " + describe(psi));
    }
  }
}

void scalar_commutant(Check& c) {
  std::mt19937_64 rng(0x5ca1);
  const auto s3 = symmetric_group_3();
  const auto z3 = cyclic_group(3);
  const std::vector<Representation> irreps{circle_weights({2}), cyclic_character(z3, 1), s3_standard(s3), s3_sign(s3),
                                           spin_irrep(1), spin_irrep(2)};
  for (const auto& rep : irreps) {
    const auto rule = default_rule(rep.group());
    const double tol = rep.group().kind() == GroupKind::su2 ? 1e-6 : 1e-10;
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexMatrix a = oracle::gaussian(rep.degree(), rep.degree(), rng);
      const auto t = averaged_intertwiner(rep, rep, a, rule);
      const Complex alpha = a.trace() / static_cast<double>(rep.degree());
      c.at_most(max_abs_diff(t.t, alpha * ComplexMatrix::identity(rep.degree())), tol, describe(rep) + " self-intertwiner");
    }
  }
  std::vector<std::pair<Representation, std::size_t>> cases;
  for (const auto& rep : irreps) cases.push_back({rep, 1});
  cases.push_back({direct_sum(s3_standard(s3), s3_standard(s3)), 4});
  cases.push_back({direct_sum(spin_irrep(1), spin_irrep(1)), 4});
  cases.push_back({circle_weights({3, 3}), 4});
  cases.push_back({direct_sum(s3_standard(s3), s3_sign(s3)), 2});
  cases.push_back({direct_sum(spin_irrep(1), spin_irrep(2)), 2});
  cases.push_back({circle_weights({1, 2}), 2});
  for (const auto& [rep, expected] : cases) {
    const std::size_t dim = commutant(rep, default_rule(rep.group())).dimension;
    const std::size_t brute = oracle::commutant_dimension(generator_images(rep));
    c.expect(dim == expected, describe(rep) + " commutant dimension " + std::to_string(dim));
    c.expect(dim == brute, describe(rep) + " disagrees with linear-system oracle");
  }
}

void character_orthogonality(Check& c) {
  const auto circle = orthogonality_audit({circle_weights({0}), circle_weights({1}), circle_weights({2})},
                                          haar_rule(GroupSpec::circle(), 64));
  c.at_most(circle.max_residual, 1e-12, "circle gram");
  const auto s3 = symmetric_group_3();
  const auto exact = orthogonality_audit({trivial_representation(s3), s3_sign(s3), s3_standard(s3)}, haar_rule(s3, 1));
  c.at_most(exact.max_residual, 1e-12, "S3 gram");
  c.expect(exact.gram(2, 2) == Complex((4.0 + 1.0 + 1.0) / 6.0), "S3 standard diagonal not exactly (4+1+1)/6");
  const auto su2 = orthogonality_audit({spin_irrep(0), spin_irrep(1), spin_irrep(2)}, haar_rule(GroupSpec::su2(), 16));
  c.at_most(su2.max_residual, 1e-6, "su2 gram");
}

void matrix_elements(Check& c) {
  const auto half = matrix_element_audit(spin_irrep(1), haar_rule(GroupSpec::su2(), 16));
  c.at_most(half.max_deviation, 1e-8, "spin 1/2 deviation");
  const auto s3 = symmetric_group_3();
  const auto std2 = matrix_element_audit(s3_standard(s3), haar_rule(s3, 1));
  c.at_most(std2.max_deviation, 1e-12, "S3 standard deviation");
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      c.at_most(std::abs(half.diagonal(i, j) - 0.5), 1e-8, "spin 1/2 diagonal");
      c.at_most(std::abs(std2.diagonal(i, j) - 0.5), 1e-12, "S3 standard diagonal");
    }
}

void decomposition(Check& c) {
  std::mt19937_64 rng(12);
  const auto z2 = cyclic_group(2);
  const auto z2_rule = haar_rule(z2, 1);
  const auto sign = cyclic_character(z2, 1);
  const auto mixed = conjugate(direct_sum({trivial_representation(z2), sign, sign}), oracle::random_unitary(3, rng));
  const auto d1 = decompose(mixed, z2_rule);
  c.expect(d1.degrees == std::vector<std::size_t>{1, 1, 1}, "Z2 degrees");
  int trivial = 0, signs = 0;
  for (const auto& chi : d1.block_characters) {
    const Complex at_g = chi.values[1];
    const bool is_triv = std::abs(chi.values[0] - 1.0) <= 1e-8 && std::abs(at_g - 1.0) <= 1e-8;
    const bool is_sign = std::abs(chi.values[0] - 1.0) <= 1e-8 && std::abs(at_g + 1.0) <= 1e-8;
    trivial += is_triv;
    signs += is_sign;
  }
  c.expect(trivial == 1 && signs == 2, "Z2 block characters are not {trivial, sign, sign}");
  c.at_most(d1.character_residual, 1e-8, "Z2 character sum");

  std::mt19937_64 rng5(0x55);
  const auto su2_rule = haar_rule(GroupSpec::su2(), 16);
  const auto rep = conjugate(direct_sum(spin_irrep(1), spin_irrep(2)), random_invertible(5, rng5));
  const auto d2 = decompose(rep, su2_rule);
  auto degrees = d2.degrees;
  std::sort(degrees.begin(), degrees.end());
  c.expect(degrees == std::vector<std::size_t>{2, 3}, "spin block degrees");
  for (std::size_t b = 0; b < d2.blocks.size(); ++b) {
    const int two_j = static_cast<int>(d2.degrees[b]) - 1;
    double worst = 0.0;
    for (std::size_t k = 0; k < su2_rule.size(); ++k) {
      const double t = su2_class_angle(as_su2(su2_rule.nodes()[k]));
      worst = std::max(worst, std::abs(d2.block_characters[b].values[k] - spin_character(two_j, t)));
    }
    c.at_most(worst, 1e-8, "spin block character vs Weyl formula");
  }
  double sum_err = 0.0;
  for (std::size_t k = 0; k < su2_rule.size(); ++k) {
    Complex s = 0.0;
    for (const auto& chi : d2.block_characters) s += chi.values[k];
    sum_err = std::max(sum_err, std::abs(s - trace_at(rep, su2_rule.nodes()[k])));
  }
  c.at_most(sum_err, 1e-8, "spin character sum");
}

void specialness(Check& c) {
  for (const char* name : {"z2", "z3", "s3"}) {
    const auto g = builtin_group(name);
    for (const auto& rep : builtin_irreps(g)) {
      c.expect(specialness_report(rep, haar_rule(g, 1)).d == 1, describe(rep) + " d != 1");
    }
  }
  const auto su2 = haar_rule(GroupSpec::su2(), 16);
  for (int two_j = 0; two_j <= 2; ++two_j) c.expect(specialness_report(spin_irrep(two_j), su2).d == 1, "spin d != 1");
  const auto circle = haar_rule(GroupSpec::circle(), 64);
  c.expect(specialness_report(circle_weights({3}), circle).d == 1, "circle weight d != 1");
  c.expect(specialness_report(direct_sum(spin_irrep(1), spin_irrep(1)), su2).d == 4, "spin 1/2 twice d != 4");
  const auto s3 = symmetric_group_3();
  c.expect(specialness_report(direct_sum(s3_standard(s3), s3_standard(s3)), haar_rule(s3, 1)).d == 4, "S3 standard twice d != 4");

  const std::string data = REPKIT_DATA_DIR;
  const std::vector<std::string> inputs{
      data + "/z3_chi1.json --builtin z3",
      data + "/s3_standard.json --group " + data + "/s3.json",
      "--spin 0 --spin 1 --spin 2",
      "--weights=3",
      data + "/spin_half_twice.json --builtin su2",
  };
  std::vector<std::string> runs;
  for (const char* command : {"irreducible", "decompose", "unitarize"})
    for (const auto& in : inputs) runs.push_back(std::string(command) + " " + in + " --format json");
  for (const auto& args : runs) {
    const Shell a = shell(args);
    const Shell b = shell(args);
    c.expect(a.code == 0, "exit " + std::to_string(a.code) + ": repkit " + args);
    c.expect(!a.out.empty() && a.out == b.out, "JSON differs between runs: repkit " + args);
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "su(2) orthonormality and adjoint gram", 1.0, su2_orthonormality},
      {2, "compactness classification", 1.0, compactness},
      {3, "Haar axioms", 10.0, haar_axioms},
      {4, "unitarization by averaging", 30.0, unitarization},
      {5, "Schur dichotomy", 10.0, schur_dichotomy},
      {6, "scalar commutant", 10.0, scalar_commutant},
      {7, "character orthogonality", 10.0, character_orthogonality},
      {8, "matrix-element orthogonality", 5.0, matrix_elements},
      {9, "decomposition", 20.0, decomposition},
      {10, "specialness and CLI determinism", 5.0, specialness},
  };
  int failed = 0;
  for (const auto& crit : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      crit.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(start);
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2f s (budget %.0f s)", elapsed, crit.budget_seconds);
    check.expect(elapsed < crit.budget_seconds, std::string("runtime ") + timing);
    const bool ok = check.failures().empty();
    failed += ok ? 0 : 1;
    std::printf("criterion %2d %-40s %s  %s\n", crit.id, crit.title.c_str(), ok ? "PASS" : "FAIL", timing);
    for (const auto& f : check.failures()) std::printf("    %s\n", f.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
