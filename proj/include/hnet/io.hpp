// SPDX-License-Identifier: Apache-2.0
//
// File formats. Every floating-point number is written with 17 significant
// digits, so output round-trips and is byte-stable.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hnet/coot.hpp"
#include "hnet/gw.hpp"
#include "hnet/hypernetwork.hpp"

namespace hnet::io {

using Json = nlohmann::ordered_json;

// %.17g; throws for non-finite values, which JSON cannot carry.
std::string format_number(double x);

// Pretty-printed JSON with numbers in format_number. Arrays of scalars stay on
// one line, so matrices print one row per line.
std::string dump(const Json& value);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Vector vector_from_json(const Json& j, const std::string& what);
Matrix matrix_from_json(const Json& j, const std::string& what);

// {"nodes", "hyperedges", "mu", "nu", "omega"}.
Json hypernetwork_json(const MeasureHypernetwork& h);
MeasureHypernetwork hypernetwork_from_json(const Json& j);
MeasureHypernetwork parse_hypernetwork(const std::string& text);

// {"nodes", "mu", "omega"} plus "bipartite_labels" ("left"/"right" per node)
// for labeled bipartite networks.
Json network_json(const MeasureNetwork& n);
Json network_json(const LabeledBipartiteNetwork& b);
struct ParsedNetwork {
  MeasureNetwork network;
  std::optional<std::vector<bool>> left;
};
ParsedNetwork parse_network(const std::string& text);

Json coupling_json(const Coupling& c);
Json restarts_json(const std::vector<RestartRecord>& records);
// {"distance", "p", "method", "certified_local", "pi", "xi", "restarts", ...}.
Json coot_result_json(const CootResult& r);
// Same layout without "xi".
Json gw_result_json(const GwResult& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace hnet::io
