#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace netdiff {

class NodeId {
public:
    using Coords = std::vector<int64_t>;

    NodeId() = default;
    static NodeId lattice(Coords coords);
    static NodeId indexed(uint64_t index);
    static NodeId named(std::string label);

    bool is_lattice() const { return v_.index() == 0; }
    bool is_indexed() const { return v_.index() == 1; }
    bool is_named() const { return v_.index() == 2; }

    const Coords& coords() const;
    uint64_t index() const;
    const std::string& label() const;

    std::string str() const;
    size_t hash() const;

    auto operator<=>(const NodeId&) const = default;
    bool operator==(const NodeId&) const = default;

private:
    std::variant<Coords, uint64_t, std::string> v_;
};

struct NodeIdHash {
    size_t operator()(const NodeId& n) const { return n.hash(); }
};

using NodeList = std::vector<NodeId>;

// Shorthand for 2-D lattice ids.
NodeId P(int64_t x, int64_t y);

// Sorts and removes duplicates in place.
void normalize(NodeList& nodes);

enum class Parity : uint8_t { Even = 0, Odd = 1 };
inline Parity flip(Parity p) { return p == Parity::Even ? Parity::Odd : Parity::Even; }
inline Parity parity_of_int(int64_t v) { return (v % 2 == 0) ? Parity::Even : Parity::Odd; }
const char* parity_name(Parity p);

enum class Neighborhood { L1, Linf };

using Adjacency = std::map<NodeId, NodeList>;

class Network {
public:
    enum class Kind { SquareLattice, HexPavement, Hierarchy, Explicit, Subnetwork };

    static Network square_lattice(int dim, Neighborhood nb);
    static Network hex_pavement();
    // Constant arity m at every node.
    static Network hierarchy(uint32_t m);
    // arity[k] children for each node of depth k; deeper layers use `tail`.
    static Network hierarchy(std::vector<uint32_t> arity_by_depth, uint32_t tail);
    // Throws InvalidNetwork unless the adjacency passes validate().
    static Network explicit_graph(const Adjacency& adjacency);
    static Network from_edges(const NodeList& nodes, const std::vector<std::pair<NodeId, NodeId>>& edges);

    Kind kind() const;
    std::string describe() const;
    size_t gamma() const;
    bool is_finite() const { return kind() == Kind::Explicit; }
    bool contains(const NodeId& x) const;

    // Sorted ascending. Throws UnknownNode for ids outside the universe.
    NodeList neighbors(const NodeId& x) const;
    size_t degree(const NodeId& x) const { return neighbors(x).size(); }

    // Finite node list (Explicit only).
    const NodeList& nodes() const;

    // Canonical root: origin for lattices, 0 for hierarchies, first node for explicit graphs.
    NodeId origin() const;

    bool is_bipartite() const;
    // Canonical block of x, nullopt when the network is not bipartite.
    std::optional<Parity> parity(const NodeId& x) const;

    // Side of a fixed bisection into two infinite halves, each meeting both parity blocks.
    bool split_side(const NodeId& x) const;

    // Graph distance, exact for lattices; throws for other kinds.
    std::optional<uint64_t> analytic_distance(const NodeId& a, const NodeId& b) const;

    int dim() const;
    Neighborhood neighborhood() const;
    uint32_t hierarchy_depth(const NodeId& x) const;

    bool same_as(const Network& other) const;

    struct Impl;

private:
    explicit Network(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;

    friend Network bipartite_subnetwork(const Network& net, const NodeId& c);
};

struct ValidationReport {
    bool irreflexive = true;
    bool symmetric = true;
    bool bounded = true;
    bool connected = true;
    size_t max_degree = 0;
    std::vector<std::string> failures;
    bool ok() const { return irreflexive && symmetric && bounded && connected; }
};

ValidationReport validate(const Adjacency& adjacency, std::optional<size_t> gamma = std::nullopt);

enum class BoundaryKind { FrozenInactive, FrozenActive, Torus, Extend };

struct BoundaryPolicy {
    BoundaryKind kind = BoundaryKind::FrozenInactive;
    // Status of out-of-region nodes for Extend.
    std::function<bool(const NodeId&)> pattern;

    static BoundaryPolicy frozen_inactive() { return {BoundaryKind::FrozenInactive, {}}; }
    static BoundaryPolicy frozen_active() { return {BoundaryKind::FrozenActive, {}}; }
    static BoundaryPolicy torus() { return {BoundaryKind::Torus, {}}; }
    static BoundaryPolicy extend(std::function<bool(const NodeId&)> f) { return {BoundaryKind::Extend, std::move(f)}; }
    BoundaryPolicy complemented() const;
    std::string name() const;
};

class Window {
public:
    using Bounds = std::vector<std::pair<int64_t, int64_t>>; // inclusive, per dimension

    // Axis-aligned box on a lattice or hex pavement.
    static Window box(const Network& base, Bounds bounds, BoundaryPolicy boundary = {});
    // Square box [-r, r]^d.
    static Window centered_box(const Network& base, int64_t r, BoundaryPolicy boundary = {});
    // Breadth-first ball around center.
    static Window ball(const Network& base, const NodeId& center, size_t radius, BoundaryPolicy boundary = {});
    // Every node of a finite network.
    static Window whole(const Network& finite_net);

    const Network& base() const { return *base_; }
    const BoundaryPolicy& boundary() const { return boundary_; }
    Window with_boundary(BoundaryPolicy b) const;

    const NodeList& nodes() const { return nodes_; }
    size_t size() const { return nodes_.size(); }
    bool contains(const NodeId& x) const { return index_.count(x) > 0; }
    size_t index_of(const NodeId& x) const;

    bool is_box() const { return box_.has_value(); }
    const Bounds& bounds() const;

    // In-region node standing for base node y (identity inside, wrapped on a torus).
    std::optional<NodeId> resolve(const NodeId& y) const;
    // Status the boundary assigns to an unresolvable y.
    bool ghost_active(const NodeId& y) const;

    // Induced neighbors inside the region (torus wraps included), sorted.
    NodeList neighbors(const NodeId& x) const;
    size_t induced_degree(const NodeId& x) const { return neighbors(x).size(); }

    Adjacency induced_adjacency() const;
    Network as_network() const;

private:
    Window() = default;
    void build_index();
    void check_connected() const;

    std::shared_ptr<const Network> base_;
    BoundaryPolicy boundary_;
    NodeList nodes_;
    std::map<NodeId, size_t> index_;
    std::optional<Bounds> box_;
};

struct Bipartition {
    std::function<Parity(const NodeId&)> parity;
    NodeList evens;
    NodeList odds;
    Parity of(const NodeId& x) const { return parity(x); }
};

struct OddCycle {
    NodeList cycle; // consecutive nodes adjacent, last adjacent to first
};

using BipartitionResult = std::variant<Bipartition, OddCycle>;

BipartitionResult bipartition(const Network& net);
BipartitionResult bipartition(const Window& window);

// Keeps edges {x,y} with |d(x,c) - d(y,c)| = 1.
Network bipartite_subnetwork(const Network& net, const NodeId& c);
Network bipartite_subnetwork(const Window& window, const NodeId& c);

// Edge of the original relation inside one block; scans a ball of the given radius on infinite nets.
std::optional<std::pair<NodeId, NodeId>> intra_block_edge(const Network& net, const Bipartition& bip, size_t scan_radius = 4);
std::optional<std::pair<NodeId, NodeId>> intra_block_edge(const Window& window, const Bipartition& bip);

// Breadth-first distances from src, limited to max_radius.
std::map<NodeId, uint64_t> bfs_distances(const Network& net, const NodeId& src, uint64_t max_radius);
std::map<NodeId, uint64_t> bfs_distances(const Window& window, const NodeId& src);

// Nodes within distance r of center, sorted.
NodeList ball_nodes(const Network& net, const NodeId& center, uint64_t r);

// Path of the example-3 line (explicit, n nodes, ids (0)..(n-1)).
Network line_graph(size_t n);
// Z^2 box of radius r plus auxiliary nodes alpha, beta attached to (0,0); optional alpha-beta edge.
Network example4_graph(int64_t r, bool with_alpha_beta_edge = false);

} // namespace netdiff
