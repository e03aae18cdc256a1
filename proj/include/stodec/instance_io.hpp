#pragma once

#include "stodec/model.hpp"
#include "stodec/types.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace stodec {

/**
 * Instance files are JSON with the exact field set
 *
 *   { format_version, m1, n1, m2, n2, A, b, c,
 *     scenarios: [ { T, W, h, q, probability }, ... ] }
 *
 * Matrices are arrays of row arrays (row-major), numbers in decimal text.
 * Serialization uses shortest-round-trip formatting, so save followed by
 * load reproduces every double bit for bit.
 *
 * ParseError reports structural problems (missing field, wrong type, ragged
 * rows) naming the offending field; ValidationError reports semantic ones
 * (dimension mismatch, probability sum).
 */

namespace detail {

using nlohmann::json;

inline const json& require_field(const json& j, const char* name, const std::string& where) {
  const auto it = j.find(name);
  if (it == j.end())
    throw ParseError("missing field '" + std::string(name) + "' in " + where);
  return *it;
}

inline Index index_from(const json& j, const char* name, const std::string& where) {
  const json& v = require_field(j, name, where);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ParseError("field '" + std::string(name) + "' in " + where +
                     " must be a nonnegative integer");
  return static_cast<Index>(v.get<long long>());
}

inline double real_from(const json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError(what + " must be a number");
  return v.get<double>();
}

inline json to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Vector vector_from(const json& j, const char* name, Index size,
                          const std::string& where) {
  const json& arr = require_field(j, name, where);
  if (!arr.is_array())
    throw ParseError("field '" + std::string(name) + "' in " + where + " must be an array");
  if (static_cast<Index>(arr.size()) != size)
    throw ParseError("field '" + std::string(name) + "' in " + where + " has " +
                     std::to_string(arr.size()) + " entries, expected " +
                     std::to_string(size));
  Vector v(size);
  for (Index i = 0; i < size; ++i)
    v[i] = real_from(arr[static_cast<size_t>(i)],
                     "entry " + std::to_string(i) + " of field '" + name + "' in " + where);
  return v;
}

inline Matrix matrix_from(const json& j, const char* name, Index rows, Index cols,
                          const std::string& where) {
  const json& arr = require_field(j, name, where);
  if (!arr.is_array())
    throw ParseError("field '" + std::string(name) + "' in " + where +
                     " must be an array of rows");
  if (static_cast<Index>(arr.size()) != rows)
    throw ParseError("field '" + std::string(name) + "' in " + where + " has " +
                     std::to_string(arr.size()) + " rows, expected " + std::to_string(rows));
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = arr[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ParseError("row " + std::to_string(i) + " of field '" + name + "' in " +
                       where + " must be an array of " + std::to_string(cols) + " numbers");
    for (Index k = 0; k < cols; ++k)
      m(i, k) = real_from(row[static_cast<size_t>(k)],
                          "entry (" + std::to_string(i) + ", " + std::to_string(k) +
                              ") of field '" + name + "' in " + where);
  }
  return m;
}

}  // namespace detail

inline void save_instance(const StochasticProgram& prog, std::ostream& out) {
  const ValidationReport rep = validate(prog);
  if (!rep.valid()) {
    std::string msg = "save_instance: program is invalid:";
    for (const auto& v : rep.violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  detail::json j;
  j["format_version"] = 1;
  j["m1"] = prog.m1();
  j["n1"] = prog.n1();
  j["m2"] = prog.m2();
  j["n2"] = prog.n2();
  j["A"] = detail::to_json(prog.first_stage.A);
  j["b"] = detail::to_json(prog.first_stage.b);
  j["c"] = detail::to_json(prog.first_stage.c);
  detail::json scenarios = detail::json::array();
  for (const auto& sc : prog.scenarios) {
    detail::json s;
    s["T"] = detail::to_json(sc.T);
    s["W"] = detail::to_json(sc.W);
    s["h"] = detail::to_json(sc.h);
    s["q"] = detail::to_json(sc.q);
    s["probability"] = sc.probability;
    scenarios.push_back(std::move(s));
  }
  j["scenarios"] = std::move(scenarios);
  out << j.dump(1) << '\n';
  if (!out.good()) throw std::runtime_error("save_instance: write failed");
}

inline void save_instance(const StochasticProgram& prog, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_instance: cannot open '" + path + "'");
  save_instance(prog, out);
}

inline StochasticProgram load_instance(std::istream& in) {
  detail::json j;
  try {
    j = detail::json::parse(in);
  } catch (const detail::json::parse_error& err) {
    throw ParseError(std::string("instance file is not valid JSON: ") + err.what());
  }
  if (!j.is_object()) throw ParseError("instance file root must be an object");

  const std::string root = "instance root";
  const detail::json& ver = detail::require_field(j, "format_version", root);
  if (!ver.is_number_integer() || ver.get<long long>() != 1)
    throw ParseError("unsupported format_version (expected 1)");
  const Index m1 = detail::index_from(j, "m1", root);
  const Index n1 = detail::index_from(j, "n1", root);
  const Index m2 = detail::index_from(j, "m2", root);
  const Index n2 = detail::index_from(j, "n2", root);

  StochasticProgram prog;
  prog.first_stage.A = detail::matrix_from(j, "A", m1, n1, root);
  prog.first_stage.b = detail::vector_from(j, "b", m1, root);
  prog.first_stage.c = detail::vector_from(j, "c", n1, root);

  const detail::json& scen = detail::require_field(j, "scenarios", root);
  if (!scen.is_array()) throw ParseError("field 'scenarios' must be an array");
  prog.scenarios.reserve(scen.size());
  for (size_t s = 0; s < scen.size(); ++s) {
    const std::string where = "scenarios[" + std::to_string(s) + "]";
    const detail::json& js = scen[s];
    if (!js.is_object()) throw ParseError(where + " must be an object");
    Scenario sc;
    sc.T = detail::matrix_from(js, "T", m2, n1, where);
    sc.W = detail::matrix_from(js, "W", m2, n2, where);
    sc.h = detail::vector_from(js, "h", m2, where);
    sc.q = detail::vector_from(js, "q", n2, where);
    sc.probability =
        detail::real_from(detail::require_field(js, "probability", where),
                          "field 'probability' in " + where);
    prog.scenarios.push_back(std::move(sc));
  }

  const ValidationReport rep = validate(prog);
  if (!rep.valid()) {
    std::string msg = "load_instance: program is invalid:";
    for (const auto& v : rep.violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  return prog;
}

inline StochasticProgram load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("load_instance: cannot open '" + path + "'");
  return load_instance(in);
}

}  // namespace stodec
