#pragma once

#include "netdiff/aggregation.hpp"
#include "netdiff/configuration.hpp"
#include "netdiff/contagion.hpp"
#include "netdiff/network.hpp"
#include "netdiff/reachability.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace netdiff {

using Json = nlohmann::ordered_json;

// Lattice ids as coordinate arrays, indexed ids as integers, named ids as strings.
Json node_to_json(const NodeId& n);
NodeId node_from_json(const Json& j);
Json nodes_to_json(const NodeList& nodes, size_t cap = SIZE_MAX);
NodeList nodes_from_json(const Json& j);

// {"base": "AllInactive", "active": [...], "inactive": [...]}
Json descriptor_to_json(const ConfigDescriptor& c);
ConfigDescriptor descriptor_from_json(const Json& j, const Network& frame);

Json cylinder_to_json(const Cylinder& c);
Cylinder cylinder_from_json(const Json& j);

Json trajectory_to_json(const Trajectory& t, const std::optional<ProbabilityBound>& bound = std::nullopt,
                        const TrajectoryCheck* certificates = nullptr);
Trajectory trajectory_from_json(const Json& j);

Json block_to_json(const BlockDescriptor& b);
Json plain_block_to_json(const PlainBlock& b);

// Throws InvalidInput for unreadable or malformed files.
Json read_json_file(const std::string& path);

// {"nodes": [...], "edges": [[a, b], ...]}; throws InvalidNetwork when validation fails.
Network graph_from_json(const Json& j);

// z2-l1, z2-linf, zd-l1:D, zd-linf:D, hex, hierarchy:M, line:N, example4[:R], file:PATH
Network parse_network(const std::string& spec);

// proportion, threshold:Q, table:PATH; PATH holds {"gamma": G, "rows": {"k": [...]}}.
AggregationFunction parse_aggregation(const std::string& spec, size_t gamma);

// [{"name", "net", "bounds", "boundary", "rows", "q", "expected_absorbing"}]
std::vector<GalleryFixture> gallery_from_json(const Json& j);

} // namespace netdiff
