#pragma once

// JSON and CSV formats. Rationals are always strings of the form "num/den".

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "verilocal/corners.hpp"
#include "verilocal/error.hpp"
#include "verilocal/graph.hpp"
#include "verilocal/probability.hpp"
#include "verilocal/rational.hpp"

namespace verilocal::io {

using Json = nlohmann::ordered_json;

struct GraphDocument {
  MeasurementGraph graph;
  std::optional<std::vector<std::vector<Rational>>> epsilon;
  std::optional<SignedOutlierSupport> support;
};

inline Rational rational_from_json(const Json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(mpz_class(v.dump()));
  throw Error(ErrorCode::Parse, "expected a \"num/den\" string, got " + v.dump());
}

inline std::string rational_to_json(const Rational& r) { return to_string(r); }

inline Json rationals_to_json(const std::vector<Rational>& values) {
  Json arr = Json::array();
  for (const auto& v : values) arr.push_back(to_string(v));
  return arr;
}

inline SignedOutlierSupport support_from_json(const Json& arr) {
  if (!arr.is_array()) throw Error(ErrorCode::Parse, "\"support\" must be an array");
  SignedOutlierSupport s;
  for (const auto& item : arr) {
    if (!item.is_object() || !item.contains("edge") || !item.contains("sign") ||
        !item["edge"].is_number_integer() || !item["sign"].is_string()) {
      throw Error(ErrorCode::Parse, "support entries look like {\"edge\": k, \"sign\": \"+\"}");
    }
    const auto k = item["edge"].get<long long>();
    const auto sign = item["sign"].get<std::string>();
    if (k < 1) throw Error(ErrorCode::BadSupport, "support edge ids are 1-based");
    if (sign != "+" && sign != "-") throw Error(ErrorCode::Parse, "sign must be \"+\" or \"-\"");
    s.entries.push_back({static_cast<std::size_t>(k - 1), sign == "+" ? Sign::Plus : Sign::Minus});
  }
  return s;
}

inline Json support_to_json(const SignedOutlierSupport& s) {
  Json arr = Json::array();
  for (const auto& e : s.entries) {
    arr.push_back(Json{{"edge", e.edge + 1}, {"sign", std::string(1, to_char(e.sign))}});
  }
  return arr;
}

inline std::vector<std::vector<Rational>> epsilon_from_json(const Json& arr) {
  if (!arr.is_array()) throw Error(ErrorCode::Parse, "\"epsilon\" must be an array of rows");
  std::vector<std::vector<Rational>> rows;
  for (const auto& row : arr) {
    if (!row.is_array()) throw Error(ErrorCode::Parse, "each epsilon row must be an array");
    std::vector<Rational> values;
    for (const auto& v : row) values.push_back(rational_from_json(v));
    rows.push_back(std::move(values));
  }
  return rows;
}

/// Parses the document shape only; graph invariants are checked by validate_graph.
inline GraphDocument graph_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "graph document must be a JSON object");
  GraphDocument doc;
  if (j.contains("num_nodes") || j.contains("edges")) {
    if (!j.contains("num_nodes") || !j["num_nodes"].is_number_integer()) {
      throw Error(ErrorCode::Parse, "\"num_nodes\" must be an integer");
    }
    if (!j.contains("edges") || !j["edges"].is_array()) {
      throw Error(ErrorCode::Parse, "\"edges\" must be an array");
    }
    doc.graph.num_nodes = j["num_nodes"].get<int>();
    for (const auto& e : j["edges"]) {
      if (!e.is_object() || !e.contains("i") || !e.contains("j") || !e["i"].is_number_integer() ||
          !e["j"].is_number_integer()) {
        throw Error(ErrorCode::Parse, "edges look like {\"i\": 1, \"j\": 2}");
      }
      doc.graph.edges.push_back({e["i"].get<int>(), e["j"].get<int>()});
    }
  }
  if (j.contains("epsilon")) doc.epsilon = epsilon_from_json(j["epsilon"]);
  if (j.contains("support")) doc.support = support_from_json(j["support"]);
  return doc;
}

inline Json graph_to_json(const MeasurementGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges) edges.push_back(Json{{"i", e.i}, {"j", e.j}});
  return Json{{"num_nodes", g.num_nodes}, {"edges", std::move(edges)}};
}

inline Json instance_to_json(const ProblemInstance& inst) {
  Json j = graph_to_json(inst.graph);
  Json rows = Json::array();
  for (const auto& row : inst.epsilon) rows.push_back(rationals_to_json(row));
  j["epsilon"] = std::move(rows);
  return j;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Parse, origin + ": " + e.what());
  }
}

inline GraphDocument load_graph_document(const std::string& path) {
  return graph_from_json(parse_json_text(read_file(path), path));
}

inline Json components_to_json(const ComponentReport& report) {
  Json arr = Json::array();
  for (const auto& c : report.components) arr.push_back(c.nodes);
  return arr;
}

inline Json corner_to_json(const Corner& c) {
  return Json{{"x", rationals_to_json(c.x)}, {"edge_costs", rationals_to_json(c.edge_costs)}};
}

/// Corner report: classification, optimal cost, corners and components.
inline Json corner_report_json(const CornerSet& cs, const ComponentReport& components) {
  Json corners = Json::array();
  for (const auto& c : cs.corners) corners.push_back(corner_to_json(c));
  return Json{{"classification", to_string(cs.classification)},
              {"optimal_cost", to_string(cs.optimal_cost)},
              {"corners", std::move(corners)},
              {"components", components_to_json(components)}};
}

inline std::string census_csv(const SupportCensus& census) {
  std::ostringstream out;
  out << "k,total,verifiable,uniquely_verifiable\n";
  for (const auto& r : census.rows) {
    out << r.k << ',' << r.total << ',' << r.verifiable << ',' << r.uniquely_verifiable << '\n';
  }
  return out.str();
}

inline Json census_json(const SupportCensus& census) {
  Json arr = Json::array();
  for (const auto& r : census.rows) {
    arr.push_back(Json{{"k", r.k},
                       {"total", r.total},
                       {"verifiable", r.verifiable},
                       {"uniquely_verifiable", r.uniquely_verifiable}});
  }
  return arr;
}

inline Json polynomial_json(const PverPolynomial& poly) { return Json{{"coeffs", poly.coeffs}}; }

/// Fixed 12-significant-digit decimal so output is stable across runs.
inline std::string decimal(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

struct CurvePoint {
  Rational p;
  double p_ver = 0;
};

inline std::string curve_csv(const std::vector<CurvePoint>& points) {
  std::ostringstream out;
  out << "p,p_ver\n";
  for (const auto& pt : points) out << decimal(pt.p.get_d()) << ',' << decimal(pt.p_ver) << '\n';
  return out.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path);
  out << contents;
}

/// 64-bit FNV-1a, hex encoded; identifies the bytes of an input file.
inline std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace verilocal::io
