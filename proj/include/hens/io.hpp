#pragma once

// JSON files for algebras, pointed samples, matrices and polynomials, and a
// deterministic JSON writer (sorted keys, 17 significant digits).

#include "hens/algebra.hpp"
#include "hens/builtins.hpp"
#include "hens/gh.hpp"
#include "hens/polynomial.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace hens {

using Json = nlohmann::json;

namespace detail {

inline void write_json(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << Json(it.key()).dump() << sep;
        write_json(os, it.value(), indent, depth + 1);
      }
      os << nl << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // numeric rows stay on one line
      bool flat = true;
      for (const auto& v : j)
        if (v.is_structured()) flat = false;
      if (flat || indent == 0) {
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << (indent > 0 ? ", " : ",");
          write_json(os, j[i], 0, 0);
        }
        os << ']';
        return;
      }
      os << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ',' << nl;
        os << pad;
        write_json(os, j[i], indent, depth + 1);
      }
      os << nl << close << ']';
      return;
    }
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
      } else {
        os << fmt::format("{:.17g}", v);
      }
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Keys sorted, floats with 17 significant digits, non-finite floats as null.
inline std::string dump_json(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_json(os, j, indent, 0);
  return os.str();
}

inline Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Json to_json(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

inline Vec vec_from_json(const Json& j, const char* what = "vector") {
  if (!j.is_array()) throw DomainError(std::string(what) + ": expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw DomainError(std::string(what) + ": expected an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Mat mat_from_json(const Json& j, const char* what = "matrix") {
  if (!j.is_array()) throw DomainError(std::string(what) + ": expected an array of rows");
  if (j.empty()) return Mat(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw DimensionError(std::string(what) + ": ragged rows");
    m.row(static_cast<Eigen::Index>(r)) = vec_from_json(j[r], what).transpose();
  }
  return m;
}

/// Comma separated numbers, e.g. "1,0,0".
inline Vec parse_vector(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw DomainError("not a number: '" + tok + "'");
    }
  }
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

// ---------------------------------------------------------------------------
// Algebras

inline Json algebra_to_json(const GradedAlgebra& alg) {
  Json j;
  j["name"] = alg.name();
  j["grades"] = Json::array();
  for (const auto& g : alg.grades()) j["grades"].push_back({{"label", g.label}, {"dim", g.dim}});
  j["structure"] = Json::array();
  for (const auto& e : alg.structure()) j["structure"].push_back({e.i, e.j, e.k, e.value});
  j["metric"] = to_json(alg.metric());
  if (alg.has_d0_rep()) {
    j["d0_rep"] = Json::array();
    for (const auto& q : alg.d0_rep()) j["d0_rep"].push_back(to_json(q));
  }
  if (!alg.labels().empty()) {
    for (const auto& [k, v] : alg.labels()) j["labels"][k] = v;
  }
  return j;
}

inline GradedAlgebra algebra_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("algebra: expected a JSON object");
  for (const char* key : {"grades", "structure", "metric"})
    if (!j.contains(key)) throw DomainError(std::string("algebra: missing key '") + key + "'");
  std::vector<Grade> grades;
  for (const auto& g : j.at("grades")) {
    if (!g.is_object() || !g.contains("label") || !g.contains("dim")) {
      throw DomainError("algebra: grades entries need 'label' and 'dim'");
    }
    grades.push_back({g.at("label").get<std::string>(), g.at("dim").get<int>()});
  }
  std::vector<StructureEntry> s;
  for (const auto& e : j.at("structure")) {
    if (!e.is_array() || e.size() != 4) throw DomainError("algebra: structure entries are [i, j, k, value]");
    s.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), e[3].get<double>()});
  }
  std::vector<Mat> rep;
  if (j.contains("d0_rep") && !j.at("d0_rep").is_null()) {
    for (const auto& q : j.at("d0_rep")) rep.push_back(mat_from_json(q, "d0_rep"));
  }
  GradedAlgebra alg(j.value("name", std::string("algebra")), grades, s, mat_from_json(j.at("metric"), "metric"),
                    rep);
  if (j.contains("labels")) {
    for (auto it = j.at("labels").begin(); it != j.at("labels").end(); ++it)
      alg = alg.with_label(it.key(), it.value().get<double>());
  }
  return alg;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DomainError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << text;
}

/// A JSON file path, or a built-in name such as "contact3(1,0,1)".
inline GradedAlgebra load_algebra(const std::string& spec) {
  if (std::filesystem::is_regular_file(spec)) {
    try {
      return algebra_from_json(read_json_file(spec));
    } catch (const Json::exception& e) {
      throw DomainError("'" + spec + "': " + e.what());
    }
  }
  if (auto b = parse_builtin(spec)) return *b;
  throw DomainError("'" + spec + "' is neither a file nor a built-in algebra");
}

inline void save_algebra(const GradedAlgebra& alg, const std::string& path) {
  write_text_file(path, dump_json(algebra_to_json(alg)) + "\n");
}

// ---------------------------------------------------------------------------
// Pointed samples and polynomials

inline Json sample_to_json(const PointedSample& s) {
  return {{"distances", to_json(s.distances)}, {"base", s.base}, {"eps", s.eps},
          {"solver_residual", s.solver_residual}};
}

inline PointedSample sample_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("distances")) throw DomainError("sample: missing 'distances'");
  PointedSample s;
  s.distances = mat_from_json(j.at("distances"), "distances");
  s.base = j.value("base", 0);
  s.eps = j.value("eps", 1.0);
  s.solver_residual = j.value("solver_residual", 0.0);
  check_sample(s);
  return s;
}

/// [{"exponents": [...], "coefficient": c}, ...] (or {"monomials": [...]}).
inline Poly polynomial_from_json(const Json& j) {
  const Json& list = j.is_object() && j.contains("monomials") ? j.at("monomials") : j;
  if (!list.is_array()) throw DomainError("polynomial: expected a list of monomials");
  Poly p;
  for (const auto& m : list) {
    if (!m.is_object() || !m.contains("exponents") || !m.contains("coefficient")) {
      throw DomainError("polynomial: monomials need 'exponents' and 'coefficient'");
    }
    std::vector<std::uint32_t> exps;
    for (const auto& e : m.at("exponents")) {
      int v = e.get<int>();
      if (v < 0) throw DomainError("polynomial: negative exponent");
      exps.push_back(static_cast<std::uint32_t>(v));
    }
    p += Poly::monomial(Monomial(exps), m.at("coefficient").get<double>());
  }
  return p;
}

}  // namespace hens
