#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "repkit/builtins.hpp"
#include "repkit/error.hpp"
#include "repkit/group.hpp"
#include "repkit/haar.hpp"
#include "repkit/io.hpp"
#include "repkit/lie_algebra.hpp"
#include "repkit/representation.hpp"
#include "repkit/schur.hpp"
#include "repkit/unitarize.hpp"

namespace repkit::cli {

using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kInputError = 1, kToleranceFailure = 2 };

struct Options {
  std::string command;
  std::string group_path;
  std::string builtin;
  std::vector<std::string> rep_paths;
  std::vector<int> spins;
  std::vector<std::string> weights;
  std::vector<std::string> positional;
  std::size_t resolution = 0;  // 0: per-group default
  double tol = -1.0;           // negative: per-command default
  std::string out;
  std::string format = "text";
};

/// One checked quantity. kind "max": value must not exceed limit;
/// kind "min": value must exceed limit.
struct Residual {
  std::string name;
  double value;
  double limit;
  bool is_min = false;
  bool ok() const { return std::isfinite(value) && (is_min ? value > limit : value <= limit); }
};

struct Outcome {
  json payload = json::object();
  std::vector<Residual> residuals;
  std::vector<std::string> lines;  // human-readable body
};

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

inline std::string fixed(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, std::abs(v) < 0.5 * std::pow(10.0, -digits) ? 0.0 : v);
  return buf;
}

inline std::string complex_text(Complex z) {
  if (std::abs(z.imag()) < 5e-7) return fixed(z.real(), 6);
  return fixed(z.real(), 6) + (z.imag() < 0 ? "-" : "+") + fixed(std::abs(z.imag()), 6) + "i";
}

/// Characters and other per-node lists are written out in full only for
/// rules up to this many nodes.
inline constexpr std::size_t kMaxListedNodes = 512;

// --- input assembly ----------------------------------------------------------

struct Inputs {
  std::optional<GroupSpec> group;
  std::optional<HaarRule> rule;
  std::vector<Representation> reps;
  std::vector<std::string> rep_sources;
};

inline std::vector<int> parse_weight_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int w = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(w);
    } catch (const std::exception&) {
      io::parse_fail("--weights " + text, "\"" + item + "\" is not an integer");
    }
  }
  if (out.empty()) io::parse_fail("--weights", "empty weight list");
  return out;
}

inline Inputs load_inputs(const Options& o, const std::vector<std::string>& rep_files) {
  Inputs in;
  if (!o.group_path.empty() && !o.builtin.empty()) io::parse_fail("--group/--builtin", "give at most one of them");
  if (!o.group_path.empty()) {
    in.group = io::group_from_json(io::read_json_file(o.group_path), o.group_path);
  } else if (!o.builtin.empty()) {
    try {
      in.group = builtin_group(o.builtin);
    } catch (const Error& e) {
      io::parse_fail("--builtin", e.what());
    }
  } else if (!o.spins.empty()) {
    in.group = GroupSpec::su2();
  } else if (!o.weights.empty()) {
    in.group = GroupSpec::circle();
  }

  for (const auto& path : rep_files) {
    in.reps.push_back(io::rep_from_json(io::read_json_file(path), in.group, path));
    in.rep_sources.push_back(path);
    if (!in.group) in.group = in.reps.back().group();
  }
  for (int two_j : o.spins) {
    if (in.group && in.group->kind() != GroupKind::su2) io::parse_fail("--spin", "spin representations live on su2");
    try {
      in.reps.push_back(spin_irrep(two_j));
    } catch (const Error& e) {
      io::parse_fail("--spin " + std::to_string(two_j), e.what());
    }
    in.rep_sources.push_back("--spin " + std::to_string(two_j));
  }
  for (const auto& w : o.weights) {
    if (in.group && in.group->kind() != GroupKind::circle) io::parse_fail("--weights", "weight representations live on the circle");
    in.reps.push_back(circle_weights(parse_weight_list(w)));
    in.rep_sources.push_back("--weights " + w);
  }
  for (std::size_t k = 0; k < in.reps.size(); ++k) {
    if (!same_group(in.reps[k].group(), *in.group)) {
      io::parse_fail(in.rep_sources[k], "representation group differs from " + in.group->name());
    }
  }
  if (in.group) {
    const std::size_t res = o.resolution ? o.resolution : default_resolution(*in.group);
    in.rule = haar_rule(*in.group, res);
  }
  return in;
}

inline const GroupSpec& need_group(const Inputs& in) {
  if (!in.group) io::parse_fail("inputs", "no group given (use --group PATH or --builtin NAME)");
  return *in.group;
}

inline void need_reps(const Inputs& in) {
  if (in.reps.empty()) io::parse_fail("inputs", "no representation given (use --rep PATH, --spin TWO_J or --weights W1,W2)");
}

inline bool exact_group(const GroupSpec& g) { return g.kind() != GroupKind::su2; }

inline double pick_tol(const Options& o, double exact, double su2, const GroupSpec& g) {
  if (o.tol >= 0.0) return o.tol;
  return exact_group(g) ? exact : su2;
}

inline json rep_json(const Inputs& in, std::size_t k) {
  json j = io::rep_to_json(in.reps[k]);
  j["source"] = in.rep_sources[k];
  return j;
}

inline std::string rep_title(const Inputs& in, std::size_t k) {
  return in.rep_sources[k] + " [" + describe(in.reps[k]) + ", degree " + std::to_string(in.reps[k].degree()) + "]";
}

inline json character_values_json(const Character& c) {
  if (c.values.size() > kMaxListedNodes) return json(nullptr);
  return io::complex_list_to_json(c.values);
}

inline std::vector<std::string> matrix_lines(const ComplexMatrix& m, const std::string& indent) {
  std::vector<std::string> out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::string line = indent;
    for (std::size_t c = 0; c < m.cols(); ++c) line += (c ? "  " : "") + complex_text(m(r, c));
    out.push_back(line);
  }
  return out;
}

/// Label an irreducible block by comparing characters with known irreducibles.
inline std::string identify_block(const Character& chi, const Representation& block, const HaarRule& rule) {
  const GroupSpec& g = block.group();
  auto matches = [&](const Representation& irrep) {
    const Complex ip = character_inner(chi, character(irrep, rule), rule);
    return std::abs(ip - Complex(1.0)) <= tol::multiplicity_window;
  };
  switch (g.kind()) {
    case GroupKind::finite: {
      if (!has_builtin_irreps(g)) return "";
      const auto irreps = builtin_irreps(g);
      const auto names = builtin_irrep_names(g);
      for (std::size_t k = 0; k < irreps.size(); ++k)
        if (irreps[k].degree() == block.degree() && matches(irreps[k])) return names[k];
      return "";
    }
    case GroupKind::circle: {
      if (block.degree() != 1) return "";
      const int span = static_cast<int>(rule.size() / 2);
      for (int w = -span; w <= span; ++w)
        if (matches(circle_weights({w}))) return "weight " + std::to_string(w);
      return "";
    }
    case GroupKind::su2: {
      const int two_j = static_cast<int>(block.degree()) - 1;
      if (two_j > 12 || !matches(spin_irrep(two_j))) return "";
      return two_j % 2 == 0 ? "spin " + std::to_string(two_j / 2) : "spin " + std::to_string(two_j) + "/2";
    }
  }
  return "";
}

// --- commands ----------------------------------------------------------------

inline Outcome cmd_analyze_algebra(const Options& o) {
  if (o.positional.size() != 1) io::parse_fail("analyze-algebra", "expected exactly one algebra file");
  const std::string& path = o.positional.front();
  const LieAlgebraSpec alg = io::algebra_from_json(io::read_json_file(path), path);
  const TraceFormReport tf = trace_form(alg);
  const double t = o.tol >= 0.0 ? o.tol : tol::structural;

  Outcome out;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < alg.dim(); ++k) labels.push_back(alg.labels().empty() ? "e" + std::to_string(k) : alg.labels()[k]);
  json centers = json::array();
  for (const auto& v : tf.center_basis) centers.push_back(v);
  out.payload = {{"algebra", path},
                 {"dim", alg.dim()},
                 {"labels", labels},
                 {"gram", io::matrix_to_json(tf.gram)},
                 {"eigenvalues", tf.eigenvalues},
                 {"classification", to_string(tf.classification)},
                 {"center_basis", centers},
                 {"center_dimension", tf.center_basis.size()},
                 {"invariance_residual", tf.invariance_residual},
                 {"jacobi_residual", alg.jacobi_residual()},
                 {"center_commutator", tf.center_commutator}};
  out.residuals.push_back({"invariance", tf.invariance_residual, t});
  out.residuals.push_back({"jacobi", alg.jacobi_residual(), tol::structural});
  if (tf.classification == Compactness::compact_with_center) {
    out.residuals.push_back({"center_commutator", tf.center_commutator, 1e-9});
  }

  std::string label_text;
  for (std::size_t k = 0; k < labels.size(); ++k) label_text += (k ? ", " : "") + labels[k];
  out.lines.push_back("algebra " + path + ": dim " + std::to_string(alg.dim()) + " (" + label_text + ")");
  out.lines.push_back("trace form -tr(ad u ad v):");
  for (std::size_t r = 0; r < tf.gram.rows(); ++r) {
    std::string line = "  ";
    for (std::size_t c = 0; c < tf.gram.cols(); ++c) line += (c ? "  " : "") + fixed(tf.gram(r, c));
    out.lines.push_back(line);
  }
  std::string ev = "eigenvalues:";
  for (double e : tf.eigenvalues) ev += " " + fixed(e);
  out.lines.push_back(ev);
  out.lines.push_back("classification: " + std::string(to_string(tf.classification)));
  out.lines.push_back("center dimension: " + std::to_string(tf.center_basis.size()));
  return out;
}

inline Outcome cmd_haar_audit(const Options& o) {
  if (!o.positional.empty()) io::parse_fail("haar-audit", "unexpected positional argument " + o.positional.front());
  const Inputs in = load_inputs(o, o.rep_paths);
  const GroupSpec& g = need_group(in);
  const HaarRule& rule = *in.rule;
  const double t = pick_tol(o, 1e-12, 1e-6, g);

  const auto report = axiom_audit(rule, standard_probes(g), standard_shifts(g));
  const double weight_sum = exact_sum(rule.weights());
  double min_weight = rule.weights().front();
  for (double w : rule.weights()) min_weight = std::min(min_weight, w);

  Outcome out;
  out.payload = {{"group", io::group_to_json(g)},
                 {"resolution", rule.resolution()},
                 {"nodes", rule.size()},
                 {"weight_sum", weight_sum},
                 {"min_weight", min_weight},
                 {"probes", report.probe_names},
                 {"shifts", report.shift_labels},
                 {"axioms",
                  {{"homogeneity", report.homogeneity},
                   {"additivity", report.additivity},
                   {"positivity_margin", report.positivity_margin},
                   {"normalization", report.normalization},
                   {"translation", report.translation},
                   {"inversion", report.inversion}}}};
  out.residuals = {{"(i) homogeneity", report.homogeneity, t},
                   {"(ii) additivity", report.additivity, t},
                   {"(iii) positivity margin", report.positivity_margin, 0.0, true},
                   {"(iv) normalization", report.normalization, t},
                   {"(v) translation", report.translation, t},
                   {"(vi) inversion", report.inversion, t},
                   {"weight sum - 1", std::abs(weight_sum - 1.0), 1e-14},
                   {"min weight", min_weight, 0.0, true}};
  out.lines.push_back("group " + g.name() + ", resolution " + std::to_string(rule.resolution()) + ", " +
                      std::to_string(rule.size()) + " nodes");
  out.lines.push_back(std::to_string(report.probe_names.size()) + " probes, " + std::to_string(report.shift_labels.size()) +
                      " shifts");
  return out;
}

inline std::vector<std::string> rep_files(const Options& o) {
  std::vector<std::string> files = o.positional;
  files.insert(files.end(), o.rep_paths.begin(), o.rep_paths.end());
  return files;
}

inline Outcome cmd_unitarize(const Options& o) {
  const Inputs in = load_inputs(o, rep_files(o));
  const GroupSpec& g = need_group(in);
  need_reps(in);
  const HaarRule& rule = *in.rule;
  const double t = pick_tol(o, 1e-8, 1e-5, g);

  Outcome out;
  json results = json::array();
  out.lines.push_back("group " + g.name() + ", resolution " + std::to_string(rule.resolution()));
  for (std::size_t k = 0; k < in.reps.size(); ++k) {
    const SpecialnessReport sp = specialness_report(in.reps[k], rule);
    const UnitarizationResult& u = sp.unitarization;
    const double scale = std::max(1.0, u.form.gram.max_abs());
    results.push_back({{"rep", rep_json(in, k)},
                       {"a", io::matrix_to_json(u.a)},
                       {"gram", io::matrix_to_json(u.form.gram)},
                       {"min_eigenvalue", u.form.min_eigenvalue},
                       {"invariance_residual", u.invariance_residual},
                       {"unitarity_residual", u.unitarity_residual},
                       {"character_residual", u.character_residual},
                       {"invariant_form_dimension", sp.d},
                       {"special", sp.special}});
    const std::string tag = "rep " + std::to_string(k) + " ";
    out.residuals.push_back({tag + "unitarity", u.unitarity_residual, t});
    out.residuals.push_back({tag + "character", u.character_residual, t});
    out.residuals.push_back({tag + "form invariance", u.invariance_residual, t * scale});
    out.lines.push_back("rep " + std::to_string(k) + ": " + rep_title(in, k));
    out.lines.push_back("  averaged form H (min eigenvalue " + fixed(u.form.min_eigenvalue) + "):");
    for (auto& l : matrix_lines(u.form.gram, "    ")) out.lines.push_back(l);
    out.lines.push_back("  A with H = A*A:");
    for (auto& l : matrix_lines(u.a, "    ")) out.lines.push_back(l);
    out.lines.push_back("  invariant forms d = " + std::to_string(sp.d) + (sp.special ? " (special)" : " (not special)"));
  }
  out.payload = {{"group", io::group_to_json(g)}, {"resolution", rule.resolution()}, {"results", results}};
  return out;
}

inline Outcome cmd_irreducible(const Options& o) {
  const Inputs in = load_inputs(o, rep_files(o));
  const GroupSpec& g = need_group(in);
  need_reps(in);
  const HaarRule& rule = *in.rule;
  const double t = pick_tol(o, 1e-10, 1e-6, g);

  Outcome out;
  json results = json::array();
  out.lines.push_back("group " + g.name() + ", resolution " + std::to_string(rule.resolution()));
  for (std::size_t k = 0; k < in.reps.size(); ++k) {
    const IrreducibilityReport ir = irreducibility_report(in.reps[k], rule);
    const InvariantFormSpace forms = invariant_form_space(in.reps[k], rule);
    results.push_back({{"rep", rep_json(in, k)},
                       {"irreducible", ir.irreducible},
                       {"commutant_dimension", ir.commutant_dimension},
                       {"commutant_residual", ir.commutant_residual},
                       {"unitarized", ir.unitarized},
                       {"unitarity_residual", ir.unitarity_residual},
                       {"invariant_form_dimension", forms.dimension},
                       {"invariant_form_residual", forms.max_residual},
                       {"special", forms.dimension == 1}});
    const std::string tag = "rep " + std::to_string(k) + " ";
    out.residuals.push_back({tag + "commutant", ir.commutant_residual, t});
    out.residuals.push_back({tag + "invariant forms", forms.max_residual, std::max(t, tol::structural)});
    out.lines.push_back("rep " + std::to_string(k) + ": " + rep_title(in, k));
    out.lines.push_back(std::string("  ") + (ir.irreducible ? "irreducible" : "reducible") + ", commutant dimension " +
                        std::to_string(ir.commutant_dimension) + (ir.unitarized ? " (unitarized first)" : "") +
                        ", invariant forms d = " + std::to_string(forms.dimension));
  }
  out.payload = {{"group", io::group_to_json(g)}, {"resolution", rule.resolution()}, {"results", results}};
  return out;
}

inline Outcome cmd_decompose(const Options& o) {
  const Inputs in = load_inputs(o, rep_files(o));
  const GroupSpec& g = need_group(in);
  need_reps(in);
  const HaarRule& rule = *in.rule;
  const double t = o.tol >= 0.0 ? o.tol : 1e-8;

  Outcome out;
  json results = json::array();
  out.lines.push_back("group " + g.name() + ", resolution " + std::to_string(rule.resolution()));
  for (std::size_t k = 0; k < in.reps.size(); ++k) {
    const DecompositionReport d = decompose(in.reps[k], rule);
    json blocks = json::array();
    out.lines.push_back("rep " + std::to_string(k) + ": " + rep_title(in, k));
    out.lines.push_back("  " + std::to_string(d.blocks.size()) + " irreducible block(s)" +
                        (d.unitarized ? " after unitarization" : ""));
    for (std::size_t b = 0; b < d.blocks.size(); ++b) {
      const Character& chi = d.block_characters[b];
      const std::string name = identify_block(chi, d.blocks[b], rule);
      blocks.push_back({{"degree", d.degrees[b]},
                        {"identified_as", name},
                        {"character", character_values_json(chi)}});
      std::string line = "  block " + std::to_string(b) + ": degree " + std::to_string(d.degrees[b]);
      if (!name.empty()) line += ", " + name;
      if (chi.values.size() <= 16) {
        line += ", character (";
        for (std::size_t n = 0; n < chi.values.size(); ++n) line += (n ? ", " : "") + complex_text(chi.values[n]);
        line += ")";
      }
      out.lines.push_back(line);
    }
    results.push_back({{"rep", rep_json(in, k)},
                       {"degrees", d.degrees},
                       {"unitarized", d.unitarized},
                       {"p", io::matrix_to_json(d.p)},
                       {"leakage", d.residual},
                       {"character_residual", d.character_residual},
                       {"blocks", blocks}});
    const std::string tag = "rep " + std::to_string(k) + " ";
    out.residuals.push_back({tag + "block leakage", d.residual, t});
    out.residuals.push_back({tag + "character sum", d.character_residual, t});
  }
  out.payload = {{"group", io::group_to_json(g)}, {"resolution", rule.resolution()}, {"results", results}};
  return out;
}

inline Outcome cmd_characters(const Options& o) {
  const Inputs in = load_inputs(o, rep_files(o));
  const GroupSpec& g = need_group(in);
  need_reps(in);
  const HaarRule& rule = *in.rule;
  const double t = pick_tol(o, 1e-10, 1e-8, g);
  const auto shifts = standard_shifts(g);

  Outcome out;
  std::vector<Character> chars;
  json results = json::array();
  out.lines.push_back("group " + g.name() + ", resolution " + std::to_string(rule.resolution()) + ", " +
                      std::to_string(rule.size()) + " nodes");
  for (std::size_t k = 0; k < in.reps.size(); ++k) {
    chars.push_back(character(in.reps[k], rule));
    const Character& c = chars.back();
    const double inv = class_invariance_audit(in.reps[k], rule, shifts);
    const double id_err = std::abs(c.identity_value - Complex(static_cast<double>(c.degree)));
    results.push_back({{"rep", rep_json(in, k)},
                       {"degree", c.degree},
                       {"identity_value", io::complex_to_json(c.identity_value)},
                       {"class_invariance_residual", inv},
                       {"values", character_values_json(c)}});
    const std::string tag = "rep " + std::to_string(k) + " ";
    out.residuals.push_back({tag + "class invariance", inv, t});
    out.residuals.push_back({tag + "chi(e) - degree", id_err, t});
    out.lines.push_back("rep " + std::to_string(k) + ": " + rep_title(in, k));
    if (c.values.size() <= 16) {
      std::string line = "  chi = (";
      for (std::size_t n = 0; n < c.values.size(); ++n) line += (n ? ", " : "") + complex_text(c.values[n]);
      out.lines.push_back(line + ")");
    }
  }
  const std::size_t n = chars.size();
  ComplexMatrix inner(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inner(i, j) = character_inner(chars[i], chars[j], rule);
  out.lines.push_back("character inner products <chi_i, chi_j>:");
  for (auto& l : matrix_lines(inner, "  ")) out.lines.push_back(l);
  out.payload = {{"group", io::group_to_json(g)},
                 {"resolution", rule.resolution()},
                 {"nodes", rule.size()},
                 {"results", results},
                 {"inner_products", io::matrix_to_json(inner)}};
  return out;
}

inline Outcome cmd_orthogonality(const Options& o) {
  Inputs in = load_inputs(o, rep_files(o));
  const GroupSpec& g = need_group(in);
  const HaarRule& rule = *in.rule;
  if (in.reps.empty()) {
    switch (g.kind()) {
      case GroupKind::finite: {
        if (!has_builtin_irreps(g)) io::parse_fail("orthogonality", "no builtin irreducibles for this group; pass representations");
        const auto names = builtin_irrep_names(g);
        in.reps = builtin_irreps(g);
        for (const auto& nm : names) in.rep_sources.push_back("builtin " + nm);
        break;
      }
      case GroupKind::circle:
        for (int w : {0, 1, 2}) {
          in.reps.push_back(circle_weights({w}));
          in.rep_sources.push_back("builtin weight " + std::to_string(w));
        }
        break;
      case GroupKind::su2:
        for (int two_j : {0, 1, 2}) {
          in.reps.push_back(spin_irrep(two_j));
          in.rep_sources.push_back("builtin spin 2j=" + std::to_string(two_j));
        }
        break;
    }
  }
  const double t = pick_tol(o, 1e-10, 1e-6, g);
  const OrthogonalityReport report = orthogonality_audit(in.reps, rule);

  Outcome out;
  out.lines.push_back("group " + g.name() + ", resolution " + std::to_string(rule.resolution()));
  for (std::size_t k = 0; k < in.reps.size(); ++k) out.lines.push_back("rep " + std::to_string(k) + ": " + rep_title(in, k));
  out.lines.push_back("character Gram matrix <chi_i, chi_j>:");
  for (auto& l : matrix_lines(report.gram, "  ")) out.lines.push_back(l);
  out.residuals.push_back({"character orthogonality", report.max_residual, t});

  json elements = json::array();
  for (std::size_t k = 0; k < in.reps.size(); ++k) {
    if (unitarity_audit(in.reps[k], rule) > kUnitaryThreshold) {
      elements.push_back({{"rep", rep_json(in, k)}, {"skipped", "not unitary"}});
      continue;
    }
    const MatrixElementReport me = matrix_element_audit(in.reps[k], rule);
    elements.push_back({{"rep", rep_json(in, k)},
                        {"max_deviation", me.max_deviation},
                        {"diagonal", io::matrix_to_json(me.diagonal)}});
    out.residuals.push_back({"rep " + std::to_string(k) + " matrix elements", me.max_deviation, t});
  }
  json reps = json::array();
  for (std::size_t k = 0; k < in.reps.size(); ++k) reps.push_back(rep_json(in, k));
  out.payload = {{"group", io::group_to_json(g)},
                 {"resolution", rule.resolution()},
                 {"reps", reps},
                 {"gram", io::matrix_to_json(report.gram)},
                 {"residuals", io::matrix_to_json(report.residuals)},
                 {"max_residual", report.max_residual},
                 {"matrix_elements", elements}};
  return out;
}

// --- driver ------------------------------------------------------------------

inline void add_common(CLI::App* sub, Options& o, bool with_reps) {
  sub->add_option("inputs", o.positional, with_reps ? "representation file(s)" : "input file");
  sub->add_option("--group", o.group_path, "group file (JSON)");
  sub->add_option("--builtin", o.builtin, "builtin group")->check(CLI::IsMember({"z2", "z3", "s3", "circle", "su2"}));
  if (with_reps) {
    sub->add_option("--rep", o.rep_paths, "representation file (repeatable)");
    sub->add_option("--spin", o.spins, "su2 spin irreducible by 2j (repeatable)");
    sub->add_option("--weights", o.weights, "circle representation W1,W2,... (repeatable; use --weights=-1,1 for negatives)");
  }
  sub->add_option("--resolution", o.resolution, "quadrature resolution (circle 64, su2 16)")->check(CLI::PositiveNumber);
  sub->add_option("--tol", o.tol, "tolerance override")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", o.out, "write the JSON report to this path");
  sub->add_option("--format", o.format, "stdout format")->check(CLI::IsMember({"text", "json"}));
}

inline bool is_input_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::InputParseError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidGroup:
    case ErrorKind::InvalidStructureConstants:
    case ErrorKind::InvalidResolution:
    case ErrorKind::KindMismatch:
    case ErrorKind::GroupMismatch:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::SpinOutOfRange:
    case ErrorKind::NotSquare:
      return true;
    default:
      return false;
  }
}

inline bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path);
  if (!f) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  f << text;
  return static_cast<bool>(f);
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Compact-group representation numerics: Haar quadrature, unitarization, Schur analysis"};
  app.require_subcommand(1);
  const std::pair<const char*, const char*> commands[] = {
      {"analyze-algebra", "trace form, compactness class and center of a Lie algebra file"},
      {"haar-audit", "invariant-integral axiom residuals of the group's quadrature rule"},
      {"unitarize", "averaged invariant form and the equivalent unitary representation"},
      {"irreducible", "commutant dimension and invariant-form count"},
      {"decompose", "split into irreducible blocks"},
      {"characters", "characters on the rule nodes, class invariance, inner products"},
      {"orthogonality", "character and matrix-element orthogonality of irreducibles"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, o, std::string(name) != "analyze-algebra" && std::string(name) != "haar-audit");
    sub->callback([&o, name = std::string(name)] { o.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  const auto start = std::chrono::steady_clock::now();
  Outcome result;
  json report{{"command", o.command}};
  report["inputs"] = {{"group_file", o.group_path},
                      {"builtin", o.builtin},
                      {"files", rep_files(o)},
                      {"spins", o.spins},
                      {"weights", o.weights},
                      {"resolution_flag", o.resolution},
                      {"tol_flag", o.tol}};
  try {
    if (o.command == "analyze-algebra") result = cmd_analyze_algebra(o);
    else if (o.command == "haar-audit") result = cmd_haar_audit(o);
    else if (o.command == "unitarize") result = cmd_unitarize(o);
    else if (o.command == "irreducible") result = cmd_irreducible(o);
    else if (o.command == "decompose") result = cmd_decompose(o);
    else if (o.command == "characters") result = cmd_characters(o);
    else result = cmd_orthogonality(o);
  } catch (const Error& e) {
    const int code = is_input_error(e.kind()) ? kInputError : kToleranceFailure;
    err << "error: " << e.what() << "\n";
    report["status"] = code == kInputError ? "input_error" : "failure";
    report["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    report["exit_code"] = code;
    if (!o.out.empty()) write_file(o.out, report.dump(2) + "\n", err);
    if (o.format == "json" && o.out.empty()) out << report.dump(2) << "\n";
    return code;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  bool ok = true;
  json residuals = json::array();
  for (const auto& r : result.residuals) {
    ok = ok && r.ok();
    residuals.push_back({{"name", r.name},
                         {"value", std::isfinite(r.value) ? json(r.value) : json(nullptr)},
                         {"limit", r.limit},
                         {"bound", r.is_min ? "min" : "max"},
                         {"ok", r.ok()}});
  }
  const int code = ok ? kOk : kToleranceFailure;
  report["residuals"] = residuals;
  report["payload"] = result.payload;
  report["status"] = ok ? "ok" : "tolerance_failure";
  report["exit_code"] = code;

  const std::string json_text = report.dump(2) + "\n";
  if (!o.out.empty() && !write_file(o.out, json_text, err)) return kInputError;
  if (o.format == "json") {
    if (o.out.empty()) out << json_text;
  } else {
    out << o.command << "\n";
    for (const auto& l : result.lines) out << l << "\n";
    out << "residuals:\n";
    for (const auto& r : result.residuals) {
      out << "  " << std::left << std::setw(32) << r.name << " " << sci(r.value) << (r.is_min ? "  > " : "  <= ")
          << sci(r.limit) << (r.ok() ? "  ok" : "  FAIL") << "\n";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", elapsed);
    out << "elapsed " << buf << " s\n";
    out << "status: " << (ok ? "ok" : "tolerance failure") << "\n";
  }
  return code;
}

}  // namespace repkit::cli
