#pragma once

#include <complex>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repkit/error.hpp"
#include "repkit/group.hpp"
#include "repkit/lie_algebra.hpp"
#include "repkit/linalg.hpp"
#include "repkit/representation.hpp"

namespace repkit::io {

using json = nlohmann::json;

/// Representations read from files are rejected when the homomorphism
/// residual over all (or sampled) pairs exceeds this.
inline constexpr double kLoadHomomorphismTol = 1e-8;

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::InputParseError, where + ": " + what);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    parse_fail(path, e.what());
  }
}

inline const json& require_field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) parse_fail(where, "missing field \"" + key + "\"");
  return *it;
}

inline std::size_t as_count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) parse_fail(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

inline double as_real(const json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where, "expected a number");
  return j.get<double>();
}

/// A complex entry is [re, im] or a bare real number.
inline Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  parse_fail(where, "expected a number or an [re, im] pair");
}

inline ComplexMatrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) parse_fail(where, "expected a non-empty list of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) parse_fail(where + "[0]", "expected a non-empty row");
  const std::size_t cols = j[0].size();
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) parse_fail(row_where, "row length differs from row 0");
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = complex_from_json(j[r][c], row_where + "[" + std::to_string(c) + "]");
    }
  }
  if (!m.all_finite()) parse_fail(where, "non-finite entry");
  return m;
}

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json matrix_to_json(const RealMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json complex_list_to_json(const std::vector<Complex>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(complex_to_json(z));
  return out;
}

// --- Lie algebras ----------------------------------------------------------

/// {"dim": n, "structure_constants": [[a, b, k, value], ...], "labels": [...]}
/// with a < b; the antisymmetric completion is applied here.
inline LieAlgebraSpec algebra_from_json(const json& j, const std::string& where = "algebra") {
  const std::size_t dim = as_count(require_field(j, "dim", where), where + ".dim");
  if (dim == 0) parse_fail(where + ".dim", "dimension must be positive");
  const json& sc = require_field(j, "structure_constants", where);
  if (!sc.is_array()) parse_fail(where + ".structure_constants", "expected a list");
  std::vector<StructureConstant> entries;
  for (std::size_t n = 0; n < sc.size(); ++n) {
    const std::string w = where + ".structure_constants[" + std::to_string(n) + "]";
    const json& e = sc[n];
    if (!e.is_array() || e.size() != 4) parse_fail(w, "expected [alpha, beta, k, value]");
    const std::size_t a = as_count(e[0], w + "[0]");
    const std::size_t b = as_count(e[1], w + "[1]");
    const std::size_t k = as_count(e[2], w + "[2]");
    if (a >= dim || b >= dim || k >= dim) parse_fail(w, "index out of range for dim " + std::to_string(dim));
    entries.push_back({a, b, k, as_real(e[3], w + "[3]")});
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    const json& l = j["labels"];
    if (!l.is_array() || l.size() != dim) parse_fail(where + ".labels", "expected " + std::to_string(dim) + " strings");
    for (const auto& s : l) {
      if (!s.is_string()) parse_fail(where + ".labels", "expected strings");
      labels.push_back(s.get<std::string>());
    }
  }
  try {
    return LieAlgebraSpec::from_upper(dim, entries, labels);
  } catch (const Error& e) {
    parse_fail(where + ".structure_constants", e.what());
  }
}

// --- groups ----------------------------------------------------------------

inline std::vector<std::size_t> index_list(const json& j, const std::string& where) {
  if (!j.is_array()) parse_fail(where, "expected a list of element indices");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_count(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

/// {"kind": "finite", "mult_table", "inverse", "identity", "labels"} |
/// {"kind": "circle"} | {"kind": "su2"}
inline GroupSpec group_from_json(const json& j, const std::string& where = "group") {
  const json& kind = require_field(j, "kind", where);
  if (!kind.is_string()) parse_fail(where + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "circle") return GroupSpec::circle();
  if (k == "su2") return GroupSpec::su2();
  if (k != "finite") parse_fail(where + ".kind", "unknown group kind \"" + k + "\" (finite, circle, su2)");

  FiniteGroupTable t;
  const json& mult = require_field(j, "mult_table", where);
  if (!mult.is_array() || mult.empty()) parse_fail(where + ".mult_table", "expected a non-empty list of rows");
  t.order = mult.size();
  for (std::size_t r = 0; r < t.order; ++r) {
    const std::string w = where + ".mult_table[" + std::to_string(r) + "]";
    auto row = index_list(mult[r], w);
    if (row.size() != t.order) parse_fail(w, "row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(t.order));
    for (auto v : row)
      if (v >= t.order) parse_fail(w, "element index " + std::to_string(v) + " out of range");
    t.mult.insert(t.mult.end(), row.begin(), row.end());
  }
  t.inverse = index_list(require_field(j, "inverse", where), where + ".inverse");
  if (t.inverse.size() != t.order) parse_fail(where + ".inverse", "length differs from group order");
  t.identity = as_count(require_field(j, "identity", where), where + ".identity");
  if (j.contains("labels")) {
    for (const auto& s : j["labels"]) {
      if (!s.is_string()) parse_fail(where + ".labels", "expected strings");
      t.labels.push_back(s.get<std::string>());
    }
  }
  if (j.contains("generators")) t.generators = index_list(j["generators"], where + ".generators");
  const std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "finite";
  try {
    return GroupSpec::finite(std::move(t), name);
  } catch (const Error& e) {
    parse_fail(where, e.what());
  }
}

inline json group_to_json(const GroupSpec& g) {
  json out{{"kind", to_string(g.kind())}, {"name", g.name()}};
  if (g.kind() == GroupKind::finite) out["order"] = g.order();
  return out;
}

// --- representations -------------------------------------------------------

namespace detail {

inline Representation rep_from_json_unchecked(const json& j, const std::optional<GroupSpec>& group,
                                              const std::string& where) {
  const json& kind = require_field(j, "kind", where);
  if (!kind.is_string()) parse_fail(where + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  try {
    if (k == "finite_table") {
      if (!group || group->kind() != GroupKind::finite) {
        parse_fail(where, "finite_table needs a finite group (--group or --builtin)");
      }
      const json& ms = require_field(j, "matrices", where);
      if (!ms.is_array()) parse_fail(where + ".matrices", "expected one matrix per group element");
      std::vector<ComplexMatrix> mats;
      for (std::size_t g = 0; g < ms.size(); ++g) {
        mats.push_back(matrix_from_json(ms[g], where + ".matrices[" + std::to_string(g) + "]"));
      }
      return finite_table(*group, std::move(mats));
    }
    if (k == "circle_weights") {
      if (group && group->kind() != GroupKind::circle) parse_fail(where, "circle_weights on a " + group->name() + " group");
      const json& ws = require_field(j, "weights", where);
      if (!ws.is_array()) parse_fail(where + ".weights", "expected a list of integers");
      std::vector<int> weights;
      for (const auto& w : ws) {
        if (!w.is_number_integer()) parse_fail(where + ".weights", "expected integers");
        weights.push_back(w.get<int>());
      }
      return circle_weights(std::move(weights));
    }
    if (k == "su2_spin") {
      if (group && group->kind() != GroupKind::su2) parse_fail(where, "su2_spin on a " + group->name() + " group");
      const json& tj = require_field(j, "two_j", where);
      if (!tj.is_number_integer()) parse_fail(where + ".two_j", "expected an integer");
      return spin_irrep(tj.get<int>());
    }
    if (k == "direct_sum") {
      const json& parts = require_field(j, "parts", where);
      if (!parts.is_array() || parts.empty()) parse_fail(where + ".parts", "expected a non-empty list");
      std::vector<Representation> reps;
      for (std::size_t p = 0; p < parts.size(); ++p) {
        reps.push_back(rep_from_json_unchecked(parts[p], group, where + ".parts[" + std::to_string(p) + "]"));
      }
      return direct_sum(reps);
    }
    if (k == "conjugate") {
      Representation inner = rep_from_json_unchecked(require_field(j, "inner", where), group, where + ".inner");
      return conjugate(inner, matrix_from_json(require_field(j, "matrix", where), where + ".matrix"));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InputParseError) throw;
    parse_fail(where, e.what());
  }
  parse_fail(where + ".kind", "unknown representation kind \"" + k +
                                  "\" (finite_table, circle_weights, su2_spin, direct_sum, conjugate)");
}

}  // namespace detail

/// Parse and validate a representation. Finite tables are rejected when
/// the identity is not mapped to I or rho(xy) = rho(x) rho(y) fails.
inline Representation rep_from_json(const json& j, const std::optional<GroupSpec>& group,
                                    const std::string& where = "representation") {
  Representation rep = detail::rep_from_json_unchecked(j, group, where);
  const double hom = homomorphism_audit(rep, 200);
  if (hom > kLoadHomomorphismTol) {
    parse_fail(where, "not a homomorphism: max |rho(xy) - rho(x) rho(y)| = " + std::to_string(hom));
  }
  return rep;
}

inline json rep_to_json(const Representation& rep) {
  return json{{"description", describe(rep)}, {"degree", rep.degree()}, {"group", rep.group().name()}};
}

}  // namespace repkit::io
