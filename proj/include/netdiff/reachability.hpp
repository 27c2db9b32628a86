#pragma once

#include "netdiff/aggregation.hpp"
#include "netdiff/configuration.hpp"
#include "netdiff/network.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace netdiff {

struct ComplexStar {
    NodeId s_star;
    std::array<NodeId, 3> s;  // branches
    std::array<NodeId, 3> sp; // second level, sp[i] adjacent to s[i]

    NodeList nodes() const;
    bool operator==(const ComplexStar&) const = default;
};

bool is_complex_star(const Window& w, const ComplexStar& star);
// One star per center, centers ascending.
std::vector<ComplexStar> find_complex_stars(const Window& w, size_t cap = SIZE_MAX);

struct CaterpillarDecomposition {
    bool caterpillar = false;
    NodeList spine;                   // consecutive spine nodes
    bool closed = false;              // spine closes into a cycle
    std::map<NodeId, NodeId> antennas; // leaf -> spine node
};

CaterpillarDecomposition is_caterpillar(const Network& explicit_net);

struct StoringMap {
    std::map<NodeId, NodeId> theta;
    bool injective = true;
};

struct NoStoring {
    NodeList S;       // Hall violator
    NodeList gamma_S; // its neighborhood, smaller than S
    std::string reason;
};

using StoringResult = std::variant<StoringMap, NoStoring>;

// `prefer(a, b)` true when image a should be tried before b.
StoringResult storing_function(const Window& w, const NodeList& X, const NodeList& Y,
                               std::function<bool(const NodeId&, const NodeId&)> prefer = {});

struct RichnessSample {
    Cylinder cylinder;
    bool storable = true;
    std::optional<NoStoring> witness;
};

struct RichnessReport {
    size_t star_count = 0;
    size_t threshold = 1;
    std::vector<RichnessSample> samples;
    bool consistent = false;
    std::string violated_clause; // "complex-stars", "storing" or empty
};

RichnessReport check_richness(const Window& w, const std::vector<Cylinder>& samples, size_t threshold = 1);

struct Trajectory {
    std::vector<Cylinder> steps;
    size_t length() const { return steps.empty() ? 0 : steps.size() - 1; }
};

struct Certificate {
    NodeId node;
    NodeId witness; // neighbor carrying the same status one step earlier
    Status status;
};

struct TrajectoryCheck {
    bool valid = true;
    std::optional<size_t> failing_step;
    std::string reason;
    std::vector<std::vector<Certificate>> certificates; // per transition
};

TrajectoryCheck validate_trajectory(const Network& net, const Trajectory& traj);

struct ProbabilityBound {
    double log10 = 0.0; // -inf never occurs for valid trajectories under strict A
    double value() const;
};

ProbabilityBound probability_lower_bound(const Network& net, const AggregationFunction& A, const Trajectory& traj);

Trajectory synth_store(const Window& w, const NodeList& X, const NodeList& Y, size_t n_steps);
Trajectory synth_propagate(const Window& w, const NodeId& from, const NodeId& to, Status carry);

// Status on each of the three branches; family members carry both statuses.
using StarPattern = std::array<std::optional<Status>, 3>;
Trajectory synth_star(const Window& w, const ComplexStar& star, const StarPattern& from, const StarPattern& to);

Trajectory synth_centrage(const Window& w, const ConfigDescriptor& config, const ComplexStar& star);

struct BuildResult {
    Trajectory trajectory;
    std::optional<ComplexStar> star;
    std::optional<Parity> witness_parity;
    Parity target_parity = Parity::Even;
    bool store_only = false;
};

BuildResult build_trajectory(const Window& w, const ConfigDescriptor& config, const Cylinder& target);

} // namespace netdiff
