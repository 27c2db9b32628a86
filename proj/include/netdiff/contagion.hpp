#pragma once

#include "netdiff/configuration.hpp"
#include "netdiff/network.hpp"
#include "netdiff/rational.hpp"
#include "netdiff/setops.hpp"

#include <optional>
#include <string>
#include <vector>

namespace netdiff {

// Number of neighbors of a frontier node inside X; throws NotFrontier otherwise.
size_t frontier_eta(const Network& net, const NodeSet& X, const NodeId& x);
// Out-of-region neighbors count through the window boundary.
size_t frontier_eta(const Window& w, const WindowConfig& X, const NodeId& x);

struct SpreadVerdict {
    enum class Kind { Spreads, Stalls, Cycles, Undecided };
    Kind kind = Kind::Undecided;
    size_t radius_reached = 0; // largest covered ball around the origin, capped at the target
    size_t steps = 0;
    NodeSet fixed_point;       // Stalls
    size_t period = 0;         // Cycles
    size_t budget = 0;
};
const char* spread_kind_name(SpreadVerdict::Kind k);

SpreadVerdict spread_test(const Network& net, const Rational& q, const NodeSet& X0, size_t target_radius, size_t budget);

struct ThresholdEstimate {
    std::optional<Rational> xi;             // nullopt: below the smallest grid value
    std::optional<size_t> witness_seed;
    std::vector<std::pair<Rational, bool>> scanned; // grid values tried, largest first
    bool morris_violation = false;          // estimate above 1/2
    std::string summary() const;
};

// Sorted ascending: k/d for every degree d occurring at the origin and for gamma, 0 < k <= d.
std::vector<Rational> default_q_grid(const Network& net);
// Rectangles up to 4x4 at the origin on planar nets, cubes on other lattices, balls elsewhere.
std::vector<NodeSet> default_seed_family(const Network& net);

ThresholdEstimate contagion_threshold_estimate(const Network& net, const std::vector<NodeSet>& seeds, std::vector<Rational> q_grid,
                                               size_t target_radius, size_t budget, unsigned threads = 0);

struct GalleryFixture {
    std::string name;
    WindowConfig config; // shape on its window; the window boundary continues it
    Rational q;
    bool expected_absorbing = true;
};

struct GalleryRow {
    std::string name;
    Rational q;
    bool expected = true;
    bool observed = true;
    bool agrees = true;
    std::optional<size_t> min_inner_eta; // over active frontier nodes
    size_t violations = 0;
};

std::vector<GalleryRow> shape_gallery_check(const std::vector<GalleryFixture>& fixtures);
std::vector<GalleryFixture> builtin_gallery();

} // namespace netdiff
