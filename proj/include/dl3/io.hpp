#pragma once

/**
 * @file io.hpp
 * @brief File formats: sampled-table and Frenet CSVs, curve-spec JSON, and
 * report JSON.
 *
 * Numbers are written with 17 significant digits and '\n' line endings, so
 * outputs are byte-identical across runs. All writes go through a temporary
 * file that is renamed into place.
 *
 * Coordinates: the first component is the timelike axis.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dl3/curve.hpp"
#include "dl3/error.hpp"
#include "dl3/expr.hpp"
#include "dl3/frenet.hpp"
#include "dl3/mannheim.hpp"

namespace dl3::io {

using Json = nlohmann::ordered_json;

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file_atomic(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(Errc::Io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, p, ec);
  if (ec) throw Error(Errc::Io, "cannot rename '" + tmp.string() + "' to '" + p.string() + "': " + ec.message());
}

// ---------------------------------------------------------------------------
// JSON output with fixed number formatting

inline void dump_json(const Json& j, std::string& out, int indent, int depth) {
  auto newline = [&](int d) {
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += ": ";
        dump_json(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = std::all_of(j.begin(), j.end(), [](const Json& x) { return x.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& x : j) {
        if (!first) out += scalars ? ", " : ",";
        first = false;
        if (!scalars) newline(depth + 1);
        dump_json(x, out, indent, depth + 1);
      }
      if (!scalars) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      double v = j.get<double>();
      out += std::isfinite(v) ? fmt(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

inline std::string to_json_text(const Json& j) {
  std::string out;
  dump_json(j, out, 2, 0);
  out += '\n';
  return out;
}

inline Json dual_json(const DualScalar& x) { return Json{{"re", x.re}, {"du", x.du}}; }

inline Json optional_dual_json(const std::optional<DualScalar>& x) { return x ? dual_json(*x) : Json(nullptr); }

// ---------------------------------------------------------------------------
// CSV

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    throw Error(Errc::Input, "table: bad number '" + cell + "' on line " + std::to_string(row));
  }
  return v;
}

inline constexpr const char* kTableHeader = "t,x1,x2,x3,x1d,x2d,x3d";

/// Reads a sampled table: header `t,x1,x2,x3,x1d,x2d,x3d`, real parts then
/// dual parts.
inline SampledTable read_table_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::Input, "table: empty file");
  std::vector<std::string> header = split_csv_line(line);
  if (header != split_csv_line(kTableHeader)) {
    throw Error(Errc::Input, std::string("table: header must be '") + kTableHeader + "'");
  }
  std::vector<double> t;
  std::vector<DualVec3> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> c = split_csv_line(line);
    if (c.size() != 7) throw Error(Errc::Input, "table: expected 7 columns on line " + std::to_string(lineno));
    double v[7];
    for (int k = 0; k < 7; ++k) v[k] = parse_cell(c[static_cast<std::size_t>(k)], lineno);
    t.push_back(v[0]);
    pts.push_back(make_dual({v[1], v[2], v[3]}, {v[4], v[5], v[6]}));
  }
  return SampledTable(std::move(t), std::move(pts));
}

inline std::string table_csv(const std::vector<double>& t, const std::vector<DualVec3>& pts) {
  std::string out = std::string(kTableHeader) + "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    const DualVec3& p = pts[i];
    out += fmt(t[i]);
    for (double v : {p.x1.re, p.x2.re, p.x3.re, p.x1.du, p.x2.du, p.x3.du}) {
      out += ',';
      out += fmt(v);
    }
    out += '\n';
  }
  return out;
}

inline std::string table_csv(const SampledTable& tab) { return table_csv(tab.t(), tab.points()); }

inline std::string frenet_csv_header() {
  std::string h = "t,s_re,s_du";
  for (const char* v : {"p", "t", "n", "b"}) {
    for (const char* part : {"re", "du"}) {
      for (const char* axis : {"x", "y", "z"}) {
        h += ',';
        h += v;
        h += axis;
        h += '_';
        h += part;
      }
    }
  }
  return h + ",kappa_re,kappa_du,tau_re,tau_du";
}

inline std::string frenet_csv(const std::vector<double>& ts, const std::vector<DualFrame>& frames) {
  std::string out = frenet_csv_header() + "\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const DualFrame& f = frames[i];
    std::vector<double> row{ts[i], f.s.re, f.s.du};
    for (const DualVec3* v : {&f.position, &f.T, &f.N, &f.B}) {
      RealVec3 re = real_part(*v);
      RealVec3 du = dual_part(*v);
      row.insert(row.end(), {re.x1, re.x2, re.x3, du.x1, du.x2, du.x3});
    }
    row.insert(row.end(), {f.kappa.re, f.kappa.du, f.tau.re, f.tau.du});
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += fmt(row[k]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curve-spec JSON

/// A validated curve-spec document.
struct SpecFile {
  std::string source;
  CurveSpec spec;  ///< for "invariants", the source holds P (if given), Q and the standard frame
  std::optional<expr::Expr> P;
  std::optional<expr::Expr> Q;
  std::optional<DualScalar> lambda;
};

namespace detail {

inline Error field_error(const std::string& field, const std::string& what) {
  return Error(Errc::Validation, "field '" + field + "': " + what);
}

inline double number_field(const Json& j, const std::string& field) {
  if (!j.is_number()) throw field_error(field, "must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw field_error(field, "must be finite");
  return v;
}

inline expr::Expr expr_field(const Json& j, const std::string& field) {
  if (!j.is_string()) throw field_error(field, "must be an expression string");
  try {
    return expr::parse(j.get<std::string>());
  } catch (const SourceError& e) {
    throw SourceError(e.code(), "field '" + field + "': " + std::string(e.what()), e.offset(), e.length());
  }
}

}  // namespace detail

/// Parses and validates a curve-spec document. `base` resolves a relative
/// `table_path`.
inline SpecFile parse_spec(const std::string& text, const std::filesystem::path& base = {}) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::Parse, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(Errc::Validation, "spec must be a JSON object");
  if (!j.contains("source") || !j["source"].is_string()) {
    throw detail::field_error("source", "required, one of builtin, expressions, invariants, table");
  }
  SpecFile out;
  out.source = j["source"].get<std::string>();

  std::vector<std::string> allowed{"source", "range", "samples"};
  std::vector<std::string> required{"source", "range", "samples"};
  if (out.source == "builtin") {
    required.insert(required.end(), {"family", "params"});
  } else if (out.source == "expressions") {
    required.push_back("components");
  } else if (out.source == "invariants") {
    required.push_back("Q");
    allowed.insert(allowed.end(), {"P", "lambda"});
    if (j.contains("P") == j.contains("lambda")) {
      throw Error(Errc::Validation, "invariants source needs exactly one of 'P' (curve) or 'lambda' (partner pair)");
    }
  } else if (out.source == "table") {
    required.push_back("table_path");
  } else {
    throw detail::field_error("source", "unknown source '" + out.source + "'");
  }
  allowed.insert(allowed.end(), required.begin() + 3, required.end());
  for (const auto& name : required) {
    if (!j.contains(name)) throw detail::field_error(name, "required for source '" + out.source + "'");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw detail::field_error(it.key(), "not allowed for source '" + out.source + "'");
    }
  }

  const Json& range = j["range"];
  if (!range.is_array() || range.size() != 2) throw detail::field_error("range", "must be [t0, t1]");
  out.spec.range = {detail::number_field(range[0], "range[0]"), detail::number_field(range[1], "range[1]")};
  if (!(out.spec.range.t0 < out.spec.range.t1)) throw detail::field_error("range", "must satisfy t0 < t1");
  const Json& samples = j["samples"];
  if (!samples.is_number_integer() || samples.get<long long>() < 8) {
    throw detail::field_error("samples", "must be an integer >= 8");
  }
  out.spec.samples = static_cast<std::size_t>(samples.get<long long>());

  if (out.source == "builtin") {
    if (!j["family"].is_string()) throw detail::field_error("family", "must be a string");
    if (!j["params"].is_object()) throw detail::field_error("params", "must be an object of numbers");
    std::map<std::string, double> params;
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it) {
      params[it.key()] = detail::number_field(it.value(), "params." + it.key());
    }
    out.spec.source = make_builtin(j["family"].get<std::string>(), std::move(params));
  } else if (out.source == "expressions") {
    const Json& c = j["components"];
    if (!c.is_object()) throw detail::field_error("components", "must be an object");
    static const char* names[6] = {"x1", "x2", "x3", "x1d", "x2d", "x3d"};
    Expressions ex;
    for (int k = 0; k < 6; ++k) {
      std::string key = names[k];
      if (!c.contains(key)) throw detail::field_error("components." + key, "required");
      ex.components[static_cast<std::size_t>(k)] = detail::expr_field(c[key], "components." + key);
    }
    if (c.size() != 6) throw detail::field_error("components", "must have exactly x1, x2, x3, x1d, x2d, x3d");
    out.spec.source = std::move(ex);
  } else if (out.source == "invariants") {
    out.Q = detail::expr_field(j["Q"], "Q");
    Invariants inv;
    inv.Q = *out.Q;
    if (j.contains("P")) {
      out.P = detail::expr_field(j["P"], "P");
      inv.P = *out.P;
    } else {
      const Json& l = j["lambda"];
      if (!l.is_object() || !l.contains("re") || !l.contains("du") || l.size() != 2) {
        throw detail::field_error("lambda", "must be {\"re\": number, \"du\": number}");
      }
      out.lambda = DualScalar(detail::number_field(l["re"], "lambda.re"), detail::number_field(l["du"], "lambda.du"));
    }
    out.spec.source = std::move(inv);
  } else {
    if (!j["table_path"].is_string()) throw detail::field_error("table_path", "must be a string");
    std::filesystem::path p = j["table_path"].get<std::string>();
    if (p.is_relative()) p = base / p;
    SampledTable tab = read_table_csv(read_file(p));
    Range r = tab.range();
    double slack = 1e-12 * std::max(1.0, r.span());
    if (out.spec.range.t0 < r.t0 - slack || out.spec.range.t1 > r.t1 + slack) {
      throw detail::field_error("range", "must lie within the table's parameter range");
    }
    out.spec.source = std::move(tab);
  }
  return out;
}

inline SpecFile load_spec(const std::filesystem::path& path) {
  return parse_spec(read_file(path), path.parent_path());
}

// ---------------------------------------------------------------------------
// Report JSON

inline Json pair_check_json(const PairCheck& c) {
  return Json{{"is_pair", c.is_pair},
              {"collinearity_error_re", c.collinearity_error_re},
              {"collinearity_error_du", c.collinearity_error_du},
              {"distance_spread_re", c.distance_spread_re},
              {"distance_spread_du", c.distance_spread_du}};
}

inline Json range_json(const ValueRange& r) {
  return Json{{"min", r.min}, {"max", r.max}, {"spread", r.spread()}};
}

inline Json meta_json(const DualScalar& lambda, double tol, std::size_t samples, const std::string& command) {
  return Json{{"command", command},
              {"lambda", dual_json(lambda)},
              {"tol", tol},
              {"samples", samples},
              {"frames", "B = N^T and V3 = V2^V1; identities use frames adapted so that V2 = B"}};
}

/// Report for a pair that failed verification: collinearity and distance only.
inline Json failed_pair_json(const PairCheck& c, const Correspondence& corr, const DualScalar& lambda,
                             const std::string& command) {
  Json samples = Json::array();
  for (std::size_t i = 0; i < c.distance.size(); ++i) {
    samples.push_back(Json{{"t", corr.t_alpha[i]},
                           {"collinearity", dual_json(c.collinearity[i])},
                           {"distance", dual_json(c.distance[i])}});
  }
  return Json{{"meta", meta_json(lambda, c.tol, c.distance.size(), command)},
              {"identities", Json::array()},
              {"verdicts", pair_check_json(c)},
              {"samples", samples}};
}

inline Json report_json(const MannheimReport& rep, const std::string& command,
                        const std::optional<SplitReport>& splits = std::nullopt) {
  Json identities = Json::array();
  for (const auto& s : rep.identities) {
    identities.push_back(Json{{"name", s.name},
                              {"max_residual_re", s.max_residual_re},
                              {"max_residual_du", s.max_residual_du},
                              {"mean_residual_re", s.mean_residual_re},
                              {"mean_residual_du", s.mean_residual_du},
                              {"undefined", s.undefined}});
  }
  const Verdicts& v = rep.verdicts;
  Json verdicts{{"is_pair", v.is_pair},
                {"collinearity_error_re", v.collinearity_error_re},
                {"collinearity_error_du", v.collinearity_error_du},
                {"distance_spread_re", v.distance_spread_re},
                {"distance_spread_du", v.distance_spread_du},
                {"schell_product_range", range_json(v.schell_product_range)},
                {"mannheim_ratio_range", v.mannheim_ratio_range ? range_json(*v.mannheim_ratio_range) : Json(nullptr)},
                {"torsion_sign_product", Json{{"all_negative", v.torsion_sign_negative},
                                              {"max_re", v.torsion_sign_product_max}}}};
  Json samples = Json::array();
  for (const auto& s : rep.samples) {
    Json res = Json::object();
    for (std::size_t k = 0; k < rep.identity_names.size(); ++k) {
      res[rep.identity_names[k]] = optional_dual_json(s.residuals[k]);
    }
    samples.push_back(Json{{"t", s.t_alpha},
                           {"s", dual_json(s.s)},
                           {"s_star", dual_json(s.s_star)},
                           {"phi", dual_json(s.phi)},
                           {"kappa", dual_json(s.kappa)},
                           {"tau", dual_json(s.tau)},
                           {"P", dual_json(s.P)},
                           {"Q", dual_json(s.Q)},
                           {"ds_star_ds", dual_json(s.ds_star_ds)},
                           {"binormal_sign", s.binormal_sign},
                           {"v3_sign", s.v3_sign},
                           {"residuals", res}});
  }
  Json out{{"meta", meta_json(rep.lambda, rep.tol, rep.samples.size(), command)},
           {"identities", identities},
           {"verdicts", verdicts},
           {"samples", samples}};

  if (!rep.centers.empty()) {
    Json centers = Json::array();
    for (std::size_t i = 0; i < rep.centers.size(); ++i) {
      const CenterRecord& c = rep.centers[i];
      std::optional<DualScalar> r_product, r_root;
      if (c.closed_form_product) r_product = c.ratio - *c.closed_form_product;
      if (c.closed_form_root) r_root = c.ratio - *c.closed_form_root;
      centers.push_back(Json{{"t", rep.samples[i].t_alpha},
                             {"beta_M", dual_json(c.beta_M)},
                             {"alpha_M", dual_json(c.alpha_M)},
                             {"beta_M_star", dual_json(c.beta_M_star)},
                             {"alpha_M_star", dual_json(c.alpha_M_star)},
                             {"ratio", dual_json(c.ratio)},
                             {"closed_form_product", optional_dual_json(c.closed_form_product)},
                             {"closed_form_root", optional_dual_json(c.closed_form_root)},
                             {"residual_product", optional_dual_json(r_product)},
                             {"residual_root", optional_dual_json(r_root)}});
    }
    out["curvature_centers"] = centers;
  }
  if (splits) {
    auto pair_json = [](const std::optional<ComponentPair>& p) {
      return p ? Json{{"re", p->re}, {"du", p->du}} : Json(nullptr);
    };
    Json rows = Json::array();
    for (std::size_t i = 0; i < splits->samples.size(); ++i) {
      const SplitSample& s = splits->samples[i];
      rows.push_back(Json{{"t", rep.samples[i].t_alpha},
                          {"torsion_ratio", pair_json(s.torsion_ratio)},
                          {"mannheim_quadratic", pair_json(s.mannheim_quadratic)},
                          {"torsion_from_partner", pair_json(s.partner.torsion_from_partner)},
                          {"partner_curvature", pair_json(s.partner.partner_curvature)},
                          {"partner_torsion", pair_json(s.partner.partner_torsion)}});
    }
    out["splits"] = Json{{"real_lambda", splits->real_lambda},
                         {"torsion_ratio_deviation", splits->torsion_ratio_deviation},
                         {"mannheim_quadratic_deviation", splits->mannheim_quadratic_deviation},
                         {"partner_deviation", splits->partner_deviation},
                         {"samples", rows}};
  }
  return out;
}

}  // namespace dl3::io
