// SPDX-License-Identifier: Apache-2.0
#include "hnet/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hnet/error.hpp"

namespace hnet::io {

std::string format_number(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::internal, "cannot serialize a non-finite number");
  if (x == 0.0) return "0";  // also folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void emit(const Json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
  if (j.is_number_float()) {
    out += format_number(j.get<double>());
  } else if (is_scalar(j)) {
    out += j.dump();
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    const bool flat = std::all_of(j.begin(), j.end(), [](const Json& v) { return is_scalar(v); });
    out += "[";
    bool first = true;
    for (const auto& v : j) {
      if (!first) out += flat ? ", " : ",";
      first = false;
      if (!flat) out += "\n" + inner;
      emit(v, indent + 2, out);
    }
    if (!flat) out += "\n" + pad;
    out += "]";
  } else {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{";
    bool first = true;
    for (const auto& [key, v] : j.items()) {
      if (!first) out += ",";
      first = false;
      out += "\n" + inner + Json(key).dump() + ": ";
      emit(v, indent + 2, out);
    }
    out += "\n" + pad + "}";
  }
}

Labels labels_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::parse_error, what + " must be an array of labels");
  Labels out;
  for (const auto& v : j) {
    if (v.is_string())
      out.push_back(v.get<std::string>());
    else if (v.is_number_integer())
      out.push_back(v.dump());
    else
      throw Error(ErrorCode::parse_error, what + " entries must be strings or integers");
  }
  return out;
}

const Json& field(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorCode::parse_error, what + " is missing \"" + key + "\"");
  return j.at(key);
}

Json parse_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, what + ": " + e.what());
  }
}

}  // namespace

std::string dump(const Json& value) {
  std::string out;
  emit(value, 0, out);
  out += "\n";
  return out;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Vector vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::parse_error, what + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::parse_error, what + " must contain only numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::parse_error, what + " must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const Vector r = vector_from_json(j[i], what + " row " + std::to_string(i));
    if (static_cast<std::size_t>(r.size()) != cols)
      throw Error(ErrorCode::parse_error, what + " rows have different lengths");
    m.row(static_cast<Eigen::Index>(i)) = r.transpose();
  }
  return m;
}

Json hypernetwork_json(const MeasureHypernetwork& h) {
  Json out;
  out["nodes"] = h.node_ids();
  out["hyperedges"] = h.hyperedge_ids();
  out["mu"] = to_json(h.mu());
  out["nu"] = to_json(h.nu());
  out["omega"] = to_json(h.omega());
  return out;
}

MeasureHypernetwork hypernetwork_from_json(const Json& j) {
  const std::string what = "hypernetwork JSON";
  const Vector mu = vector_from_json(field(j, "mu", what), "mu");
  const Vector nu = vector_from_json(field(j, "nu", what), "nu");
  Matrix w = matrix_from_json(field(j, "omega", what), "omega");
  Labels nodes = j.contains("nodes") ? labels_from_json(j.at("nodes"), "nodes") : Labels{};
  Labels edges = j.contains("hyperedges") ? labels_from_json(j.at("hyperedges"), "hyperedges") : Labels{};
  return MeasureHypernetwork(std::move(nodes), mu, std::move(edges), nu, std::move(w));
}

MeasureHypernetwork parse_hypernetwork(const std::string& text) {
  return hypernetwork_from_json(parse_text(text, "hypernetwork JSON"));
}

Json network_json(const MeasureNetwork& n) {
  Json out;
  out["nodes"] = n.ids();
  out["mu"] = to_json(n.mu());
  out["omega"] = to_json(n.omega());
  return out;
}

Json network_json(const LabeledBipartiteNetwork& b) {
  Json out = network_json(b.network());
  Json labels = Json::array();
  for (bool l : b.left()) labels.push_back(l ? "left" : "right");
  out["bipartite_labels"] = std::move(labels);
  return out;
}

ParsedNetwork parse_network(const std::string& text) {
  const std::string what = "network JSON";
  const Json j = parse_text(text, what);
  const Vector mu = vector_from_json(field(j, "mu", what), "mu");
  Matrix w = matrix_from_json(field(j, "omega", what), "omega");
  Labels ids = j.contains("nodes") ? labels_from_json(j.at("nodes"), "nodes") : Labels{};
  ParsedNetwork out{MeasureNetwork(std::move(ids), mu, std::move(w)), std::nullopt};
  if (j.contains("bipartite_labels")) {
    std::vector<bool> left;
    for (const auto& v : j.at("bipartite_labels")) {
      const std::string s = v.is_string() ? v.get<std::string>() : "";
      if (s != "left" && s != "right")
        throw Error(ErrorCode::parse_error, "bipartite_labels entries must be \"left\" or \"right\"");
      left.push_back(s == "left");
    }
    out.left = std::move(left);
  }
  return out;
}

Json coupling_json(const Coupling& c) { return to_json(c.matrix()); }

Json restarts_json(const std::vector<RestartRecord>& records) {
  Json out = Json::array();
  for (const auto& r : records) {
    Json item;
    item["objective"] = r.objective;
    item["iters"] = r.iterations;
    item["converged"] = r.converged;
    out.push_back(std::move(item));
  }
  return out;
}

namespace {

Json order_json(Order p) {
  if (p.is_infinite()) return "inf";
  return p.value();
}

}  // namespace

Json coot_result_json(const CootResult& r) {
  Json out;
  out["distance"] = r.distance;
  out["p"] = order_json(r.params.p);
  out["method"] = r.method;
  out["certified_local"] = r.certified_local;
  out["best_restart"] = r.best_restart;
  out["pi"] = coupling_json(r.pi);
  out["xi"] = coupling_json(r.xi);
  out["restarts"] = restarts_json(r.per_restart);
  return out;
}

Json gw_result_json(const GwResult& r) {
  Json out;
  out["distance"] = r.distance;
  out["p"] = order_json(r.params.p);
  out["method"] = r.method;
  out["certified_local"] = r.certified_local;
  out["certification"] = r.certification;
  out["best_restart"] = r.best_restart;
  out["pi"] = coupling_json(r.pi);
  out["restarts"] = restarts_json(r.per_restart);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error(ErrorCode::io_error, "write to '" + path + "' failed");
}

}  // namespace hnet::io
