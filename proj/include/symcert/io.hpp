#pragma once

// File formats: JSON for groups, actions, decompositions, representations
// and reports; CSV for representation tables; plain file helpers.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "symcert/action.hpp"
#include "symcert/certifier.hpp"
#include "symcert/errors.hpp"
#include "symcert/group.hpp"
#include "symcert/representation.hpp"
#include "symcert/table.hpp"

namespace symcert::io {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kReportSchema = 1;

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write " + p.string());
  out.write(data.data(), std::streamsize(data.size()));
  if (!out) throw IoFailure("write failed for " + p.string());
}

inline json read_json(const fs::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw InvalidArgument(p.string() + ": " + e.what());
  }
}

/// Rounds to 12 significant digits so reports stay stable across platforms.
inline double round12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

template <class T>
T get_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("field \"") + key + "\": " + e.what());
  }
}

// ------------------------------------------------------------------ groups

inline json group_to_json(const FiniteGroup& g) {
  return {{"order", g.order()},
          {"labels", g.labels()},
          {"cayley", std::vector<Element>(g.cayley().begin(), g.cayley().end())}};
}

inline FiniteGroup group_from_json(const json& j) {
  const auto n = get_field<std::size_t>(j, "order");
  const auto cayley = get_field<std::vector<long long>>(j, "cayley");
  if (cayley.size() != n * n) throw SizeMismatch(n * n, cayley.size());
  std::vector<Element> t;
  t.reserve(cayley.size());
  for (auto v : cayley) {
    if (v < 0 || std::size_t(v) >= n) throw InvalidArgument("Cayley table entry out of range: " + std::to_string(v));
    t.push_back(Element(v));
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = get_field<std::vector<std::string>>(j, "labels");
  return validate_group(t, std::move(labels));
}

/// A group reference is either an inline object or a path relative to `base`.
inline GroupPtr resolve_group(const json& ref, const fs::path& base) {
  if (ref.is_string()) return std::make_shared<const FiniteGroup>(group_from_json(read_json(base / ref.get<std::string>())));
  if (ref.is_object()) return std::make_shared<const FiniteGroup>(group_from_json(ref));
  throw InvalidArgument("group reference must be a path or an inline object");
}

inline GroupPtr load_group(const fs::path& p) {
  return std::make_shared<const FiniteGroup>(group_from_json(read_json(p)));
}

// ------------------------------------------------------------------ actions

inline json action_to_json(const FiniteAction& a, const json& group_ref) {
  return {{"group", group_ref},
          {"set_size", a.set_size()},
          {"table", std::vector<Point>(a.table().begin(), a.table().end())}};
}

inline FiniteAction action_from_json(const json& j, const fs::path& base) {
  auto g = resolve_group(j.contains("group") ? j.at("group") : json(), base);
  const auto m = get_field<std::size_t>(j, "set_size");
  const auto raw = get_field<std::vector<long long>>(j, "table");
  std::vector<Point> t;
  t.reserve(raw.size());
  for (auto v : raw) {
    if (v < 0 || std::size_t(v) >= m) throw InvalidArgument("action table entry out of range: " + std::to_string(v));
    t.push_back(Point(v));
  }
  return validate_action(g, m, t);
}

inline FiniteAction load_action(const fs::path& p) { return action_from_json(read_json(p), p.parent_path()); }

// ------------------------------------------------------------------ decompositions

inline json decomposition_to_json(const DirectProductDecomposition& d, const json& group_ref,
                                  const std::vector<std::string>& names = {}) {
  json factors = json::array();
  for (const auto& f : d.factors()) factors.push_back(f.members());
  json j{{"factors", factors}};
  if (!group_ref.is_null()) j["group"] = group_ref;
  if (!names.empty()) j["names"] = names;
  return j;
}

/// Factors are member lists of `g`; a "group" entry in the file, if present,
/// must describe the same group.
inline DirectProductDecomposition decomposition_from_json(const json& j, const GroupPtr& g, const fs::path& base) {
  if (j.is_object() && j.contains("group")) {
    auto declared = resolve_group(j.at("group"), base);
    if (!same_group(declared, g)) throw DecompositionMismatch("decomposition file refers to a different group");
  }
  const auto lists = get_field<std::vector<std::vector<long long>>>(j, "factors");
  std::vector<Subgroup> factors;
  for (const auto& l : lists) {
    std::vector<Element> members;
    for (auto v : l) {
      if (v < 0 || std::size_t(v) >= g->order()) throw InvalidArgument("factor member out of range");
      members.push_back(Element(v));
    }
    factors.emplace_back(g, std::move(members));
  }
  return DirectProductDecomposition(g, std::move(factors));
}

inline DirectProductDecomposition load_decomposition(const fs::path& p, const GroupPtr& g) {
  return decomposition_from_json(read_json(p), g, p.parent_path());
}

/// Loads a decomposition whose file names its own group.
inline DirectProductDecomposition load_decomposition(const fs::path& p) {
  const auto j = read_json(p);
  if (!j.contains("group")) throw InvalidArgument(p.string() + ": decomposition file has no group reference");
  return decomposition_from_json(j, resolve_group(j.at("group"), p.parent_path()), p.parent_path());
}

// ------------------------------------------------------------------ representations

inline json representation_to_json(const LinearRepresentation& r, const json& group_ref) {
  json mats = json::array();
  for (const auto& m : r.matrices()) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index k = 0; k < m.cols(); ++k) {
        if (r.field() == Field::Real)
          row.push_back(m(i, k).real());
        else
          row.push_back({m(i, k).real(), m(i, k).imag()});
      }
      rows.push_back(std::move(row));
    }
    mats.push_back(std::move(rows));
  }
  return {{"group", group_ref},
          {"dim", r.dim()},
          {"field", r.field() == Field::Real ? "real" : "complex"},
          {"matrices", std::move(mats)}};
}

inline LinearRepresentation representation_from_json(const json& j, const fs::path& base,
                                                     double tol_rep = kDefaultTolRep) {
  auto g = resolve_group(j.contains("group") ? j.at("group") : json(), base);
  const auto d = get_field<std::size_t>(j, "dim");
  const auto field_name = get_field<std::string>(j, "field");
  if (field_name != "real" && field_name != "complex") throw InvalidArgument("field must be \"real\" or \"complex\"");
  const Field field = field_name == "real" ? Field::Real : Field::Complex;
  const auto& mats = j.at("matrices");
  if (!mats.is_array() || mats.size() != g->order()) throw SizeMismatch(g->order(), mats.is_array() ? mats.size() : 0);
  std::vector<CMatrix> out;
  try {
    for (const auto& m : mats) {
      if (!m.is_array() || m.size() != d) throw InvalidArgument("matrix must have dim rows");
      CMatrix a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (std::size_t r = 0; r < d; ++r) {
        if (!m[r].is_array() || m[r].size() != d) throw InvalidArgument("matrix row must have dim entries");
        for (std::size_t c = 0; c < d; ++c) {
          const auto& v = m[r][c];
          if (field == Field::Real)
            a(Eigen::Index(r), Eigen::Index(c)) = v.get<double>();
          else {
            if (!v.is_array() || v.size() != 2) throw InvalidArgument("complex entries are [re, im] pairs");
            a(Eigen::Index(r), Eigen::Index(c)) = Complex(v[0].get<double>(), v[1].get<double>());
          }
        }
      }
      out.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("representation matrices: ") + e.what());
  }
  return validate_representation(g, std::move(out), field, tol_rep);
}

inline LinearRepresentation load_representation(const fs::path& p, double tol_rep = kDefaultTolRep) {
  return representation_from_json(read_json(p), p.parent_path(), tol_rep);
}

// ------------------------------------------------------------------ tables

/// Header `state_id,z_0,...,z_{d-1}`; one row per state in order.
inline std::string table_to_csv(const RepresentationTable& f) {
  std::ostringstream out;
  out << "state_id";
  for (std::size_t k = 0; k < f.dim(); ++k) out << ",z_" << k;
  out << "\n";
  char buf[64];
  for (std::size_t s = 0; s < f.size(); ++s) {
    out << s;
    for (std::size_t k = 0; k < f.dim(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", f.rows()(Eigen::Index(s), Eigen::Index(k)));
      out << "," << buf;
    }
    out << "\n";
  }
  return out.str();
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("line " + std::to_string(line) + ": not a number: \"" + s + "\"");
  }
}

}  // namespace detail

/// Parses a table CSV; `expected_states` (when nonzero) must match the row count.
inline RepresentationTable table_from_csv(const std::string& text, std::size_t expected_states = 0) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty representation table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv(line);
  if (header.empty() || header[0] != "state_id") throw InvalidArgument("table header must start with state_id");
  const std::size_t d = header.size() - 1;
  for (std::size_t k = 0; k < d; ++k)
    if (header[k + 1] != "z_" + std::to_string(k)) throw InvalidArgument("table header column " + std::to_string(k + 1) + " must be z_" + std::to_string(k));
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != d + 1)
      throw InvalidArgument("line " + std::to_string(lineno) + ": expected " + std::to_string(d + 1) + " fields");
    if (detail::parse_double(cells[0], lineno) != double(rows.size()))
      throw InvalidArgument("line " + std::to_string(lineno) + ": state ids must be 0, 1, 2, ... in order");
    std::vector<double> r;
    for (std::size_t k = 0; k < d; ++k) r.push_back(detail::parse_double(cells[k + 1], lineno));
    rows.push_back(std::move(r));
  }
  if (expected_states && rows.size() != expected_states) throw SizeMismatch(expected_states, rows.size());
  Eigen::MatrixXd m(Eigen::Index(rows.size()), Eigen::Index(d));
  for (std::size_t s = 0; s < rows.size(); ++s)
    for (std::size_t k = 0; k < d; ++k) m(Eigen::Index(s), Eigen::Index(k)) = rows[s][k];
  return RepresentationTable(std::move(m));
}

inline RepresentationTable load_table(const fs::path& p, std::size_t expected_states = 0) {
  return table_from_csv(read_file(p), expected_states);
}

// ------------------------------------------------------------------ reports

namespace detail {

inline json matrix_to_json(const CMatrix& m, bool real) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (real)
        row.push_back(round12(m(i, k).real()));
      else
        row.push_back({round12(m(i, k).real()), round12(m(i, k).imag())});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json matrix_to_json(const RMatrix& m) { return matrix_to_json(CMatrix(m.cast<Complex>()), true); }

}  // namespace detail

inline json subspace_decomposition_to_json(const SubspaceDecomposition& d, bool real) {
  json blocks = json::array();
  for (const auto& b : d.blocks) {
    json jb{{"dim", b.basis.cols()},
            {"assignment", b.factor ? json(*b.factor) : json("trivial")},
            {"basis", detail::matrix_to_json(b.basis, real)}};
    if (!b.character.empty()) {
      json chi = json::array();
      for (const auto& c : b.character) chi.push_back({round12(c.real()), round12(c.imag())});
      jb["character"] = std::move(chi);
    }
    blocks.push_back(std::move(jb));
  }
  return blocks;
}

inline json report_to_json(const CertificationReport& r) {
  const auto& wd = r.well_definedness;
  json collisions = json::array();
  for (const auto& [a, b] : wd.collisions) collisions.push_back({a, b});
  json well{{"well_defined", wd.well_defined},
            {"collisions", std::move(collisions)},
            {"image_points", wd.representative.size()}};
  if (wd.witness) well["witness"] = {{"w1", wd.witness->w1}, {"w2", wd.witness->w2}, {"element", wd.witness->g}};

  json fit = nullptr;
  if (r.linear_fit) {
    const auto& lf = *r.linear_fit;
    json mats = json::array();
    for (const auto& m : lf.generator_matrices) mats.push_back(detail::matrix_to_json(m));
    json gres = json::array();
    for (double v : lf.generator_residuals) gres.push_back(round12(v));
    fit = {{"source", lf.supplied ? "supplied" : "least_squares"},
           {"generators", lf.generators},
           {"generator_matrices", std::move(mats)},
           {"generator_residuals", std::move(gres)},
           {"homomorphism_residual", round12(lf.homomorphism_residual)},
           {"equivariance_residual", round12(lf.equivariance_residual)},
           {"relative_equivariance_residual", round12(lf.relative_equivariance_residual)},
           {"data_rank", lf.rank},
           {"passed", r.linear_fit_passed}};
  }
  if (r.linear_fit_failure) {
    if (fit.is_null()) fit = json::object();
    fit["failure"] = *r.linear_fit_failure;
    fit["passed"] = false;
  }

  json decomposition;
  if (r.linear_verdict) {
    decomposition = {{"kind", "subspaces"},
                     {"blocks", subspace_decomposition_to_json(r.linear_verdict->decomposition, true)},
                     {"block_dims", r.linear_verdict->decomposition.block_dims()},
                     {"deficit", r.linear_verdict->deficit},
                     {"orthonormality_residual", round12(r.linear_verdict->orthonormality_residual)},
                     {"invariance_residual", round12(r.linear_verdict->invariance_residual)}};
  } else {
    json assign = json::array();
    for (const auto& a : r.coordinate_assignment) assign.push_back(a ? json(*a) : json("trivial"));
    decomposition = {{"kind", "coordinates"}, {"assignment", std::move(assign)}};
  }

  json sens = json::array();
  for (const auto& row : r.sensitivity) {
    json jr = json::array();
    for (double v : row) jr.push_back(round12(v));
    sens.push_back(std::move(jr));
  }
  json coord_assign = json::array();
  for (const auto& a : r.coordinate_assignment) coord_assign.push_back(a ? json(*a) : json("trivial"));

  json modularity = json::array();
  for (const auto& m : r.metrics.modularity) modularity.push_back(m ? json(round12(*m)) : json(nullptr));

  return {{"schema", kReportSchema},
          {"well_defined", std::move(well)},
          {"equivariance_residual", round12(r.equivariance_residual())},
          {"induced_equivariance_residual", round12(r.induced_equivariance_residual)},
          {"linear_fit", std::move(fit)},
          {"decomposition_found", std::move(decomposition)},
          {"sensitivity", std::move(sens)},
          {"coordinate_assignment", std::move(coord_assign)},
          {"coordinate_verdict", r.coordinate_verdict},
          {"verdict_disentangled", r.verdict_disentangled},
          {"verdict_linear_disentangled", r.verdict_linear_disentangled},
          {"metrics",
           {{"modularity", std::move(modularity)},
            {"dropped_dimensions", r.metrics.dropped_dimensions},
            {"compactness", r.metrics.compactness},
            {"explicitness", r.metrics.explicitness ? json(round12(*r.metrics.explicitness)) : json(nullptr)}}}};
}

/// Structural check of a report document against schema 1. Returns an empty
/// string when valid, else the first problem found.
inline std::string check_report_schema(const json& j) {
  auto need = [&](const json& obj, const char* key, auto pred, const char* what) -> std::string {
    if (!obj.is_object() || !obj.contains(key)) return std::string("missing ") + key;
    if (!pred(obj.at(key))) return std::string(key) + " must be " + what;
    return {};
  };
  auto is_bool = [](const json& v) { return v.is_boolean(); };
  auto is_num = [](const json& v) { return v.is_number(); };
  auto is_arr = [](const json& v) { return v.is_array(); };
  auto is_obj = [](const json& v) { return v.is_object(); };
  auto is_obj_or_null = [](const json& v) { return v.is_object() || v.is_null(); };
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != kReportSchema) return "schema must be 1";
  for (auto msg : {need(j, "well_defined", is_obj, "an object"), need(j, "equivariance_residual", is_num, "a number"),
                   need(j, "linear_fit", is_obj_or_null, "an object or null"),
                   need(j, "decomposition_found", is_obj, "an object"), need(j, "sensitivity", is_arr, "an array"),
                   need(j, "verdict_disentangled", is_bool, "a boolean"),
                   need(j, "verdict_linear_disentangled", is_bool, "a boolean"), need(j, "metrics", is_obj, "an object")})
    if (!msg.empty()) return msg;
  for (auto msg : {need(j.at("well_defined"), "well_defined", is_bool, "a boolean"),
                   need(j.at("well_defined"), "collisions", is_arr, "an array"),
                   need(j.at("metrics"), "modularity", is_arr, "an array"),
                   need(j.at("metrics"), "compactness", is_arr, "an array")})
    if (!msg.empty()) return msg;
  if (j.at("verdict_linear_disentangled").get<bool>() && !j.at("verdict_disentangled").get<bool>())
    return "linear verdict without the plain verdict";
  for (const auto& m : j.at("metrics").at("modularity"))
    if (!m.is_null() && (!m.is_number() || m.get<double>() < 0.0 || m.get<double>() > 1.0))
      return "modularity scores must lie in [0, 1]";
  const auto& e = j.at("metrics").value("explicitness", json(nullptr));
  if (!e.is_null() && (!e.is_number() || e.get<double>() < 0.0 || e.get<double>() > 1.0))
    return "explicitness must lie in [0, 1]";
  return {};
}

}  // namespace symcert::io
