#include "netdiff/network.hpp"

#include "netdiff/error.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace netdiff {

const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::InvalidNetwork: return "InvalidNetwork";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ArityExceeded: return "ArityExceeded";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::EndpointViolation: return "EndpointViolation";
    case ErrorKind::NotBipartite: return "NotBipartite";
    case ErrorKind::OutOfRegion: return "OutOfRegion";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NotStrict: return "NotStrict";
    case ErrorKind::UnsupportedBase: return "UnsupportedBase";
    case ErrorKind::NotSingleParity: return "NotSingleParity";
    case ErrorKind::BlocksMixed: return "BlocksMixed";
    case ErrorKind::NoStoring: return "NoStoring";
    case ErrorKind::NotInFamily: return "NotInFamily";
    case ErrorKind::RichnessViolated: return "RichnessViolated";
    case ErrorKind::StarOverlap: return "StarOverlap";
    case ErrorKind::TargetTooLarge: return "TargetTooLarge";
    case ErrorKind::InvalidTrajectory: return "InvalidTrajectory";
    case ErrorKind::NotFrontier: return "NotFrontier";
    case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

// ---------------------------------------------------------------- NodeId

NodeId NodeId::lattice(Coords coords) {
    NodeId n;
    n.v_ = std::move(coords);
    return n;
}

NodeId NodeId::indexed(uint64_t index) {
    NodeId n;
    n.v_ = index;
    return n;
}

NodeId NodeId::named(std::string label) {
    NodeId n;
    n.v_ = std::move(label);
    return n;
}

const NodeId::Coords& NodeId::coords() const {
    if (!is_lattice()) throw Error(ErrorKind::InvalidInput, "node " + str() + " has no coordinates");
    return std::get<0>(v_);
}

uint64_t NodeId::index() const {
    if (!is_indexed()) throw Error(ErrorKind::InvalidInput, "node " + str() + " has no index");
    return std::get<1>(v_);
}

const std::string& NodeId::label() const {
    if (!is_named()) throw Error(ErrorKind::InvalidInput, "node " + str() + " has no label");
    return std::get<2>(v_);
}

std::string NodeId::str() const {
    if (is_lattice()) {
        std::string s = "(";
        const auto& c = std::get<0>(v_);
        for (size_t i = 0; i < c.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(c[i]);
        }
        return s + ")";
    }
    if (is_indexed()) return "#" + std::to_string(std::get<1>(v_));
    return std::get<2>(v_);
}

size_t NodeId::hash() const {
    uint64_t h = 0xcbf29ce484222325ULL ^ v_.index();
    auto mix = [&h](uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    if (is_lattice()) {
        for (int64_t c : std::get<0>(v_)) mix(static_cast<uint64_t>(c));
    } else if (is_indexed()) {
        mix(std::get<1>(v_));
    } else {
        mix(std::hash<std::string>{}(std::get<2>(v_)));
    }
    return static_cast<size_t>(h);
}

NodeId P(int64_t x, int64_t y) { return NodeId::lattice({x, y}); }

void normalize(NodeList& nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
}

const char* parity_name(Parity p) { return p == Parity::Even ? "Even" : "Odd"; }

// ---------------------------------------------------------------- 2-coloring

namespace {

using NeighborFn = std::function<NodeList(const NodeId&)>;

struct Coloring {
    std::map<NodeId, Parity> color;
    std::optional<NodeList> odd_cycle;
};

Coloring two_color(const NodeList& nodes, const NeighborFn& nb, const NodeId& root, Parity root_color) {
    Coloring out;
    std::map<NodeId, NodeId> parent;
    std::map<NodeId, uint64_t> depth;
    auto path_to_root = [&](NodeId v) {
        NodeList p{v};
        while (parent.count(v)) {
            v = parent.at(v);
            p.push_back(v);
        }
        return p;
    };
    auto run_from = [&](const NodeId& r, Parity c) {
        std::deque<NodeId> queue{r};
        out.color[r] = c;
        depth[r] = 0;
        while (!queue.empty()) {
            NodeId u = queue.front();
            queue.pop_front();
            for (const NodeId& v : nb(u)) {
                auto it = out.color.find(v);
                if (it == out.color.end()) {
                    out.color[v] = flip(out.color[u]);
                    parent[v] = u;
                    depth[v] = depth[u] + 1;
                    queue.push_back(v);
                } else if (it->second == out.color[u] && !out.odd_cycle) {
                    NodeList pu = path_to_root(u);
                    NodeList pv = path_to_root(v);
                    // Trim the common ancestry down to the lowest common ancestor.
                    while (pu.size() > 1 && pv.size() > 1 && pu[pu.size() - 2] == pv[pv.size() - 2]) {
                        pu.pop_back();
                        pv.pop_back();
                    }
                    NodeList cycle(pu.begin(), pu.end());
                    for (size_t i = pv.size() - 1; i-- > 0;) cycle.push_back(pv[i]);
                    std::reverse(cycle.begin(), cycle.end());
                    out.odd_cycle = cycle;
                }
            }
        }
    };
    run_from(root, root_color);
    for (const NodeId& n : nodes) {
        if (!out.color.count(n)) run_from(n, Parity::Even);
    }
    return out;
}

constexpr uint64_t kHierarchyIndexLimit = uint64_t{1} << 62;
constexpr size_t kHierarchyMaxLayers = 4096;

} // namespace

// ---------------------------------------------------------------- Network

struct Network::Impl {
    Kind kind = Kind::Explicit;
    size_t gamma = 0;

    int dim = 0;
    Neighborhood nb = Neighborhood::L1;

    std::vector<uint32_t> arity; // per depth, tail appended lazily
    uint32_t tail = 2;
    std::vector<uint64_t> offsets; // first index of each depth

    Adjacency adj;
    NodeList nodes;
    std::map<NodeId, Parity> coloring;
    bool bipartite = true;

    std::shared_ptr<const Impl> base;
    NodeId center;

    uint32_t arity_at(size_t depth) const { return depth < arity.size() ? arity[depth] : tail; }

    uint32_t depth_of(uint64_t i) const {
        auto it = std::upper_bound(offsets.begin(), offsets.end(), i);
        if (it == offsets.end()) throw Error(ErrorKind::TooLarge, "hierarchy index beyond representable depth");
        return static_cast<uint32_t>((it - offsets.begin()) - 1);
    }
};

namespace {

std::shared_ptr<Network::Impl> make_impl(Network::Kind k) {
    auto impl = std::make_shared<Network::Impl>();
    impl->kind = k;
    return impl;
}

NodeList lattice_neighbors(const Network::Impl& im, const NodeId& x) {
    const auto& c = x.coords();
    if (static_cast<int>(c.size()) != im.dim) throw Error(ErrorKind::UnknownNode, "node " + x.str() + " has wrong dimension");
    NodeList out;
    if (im.nb == Neighborhood::L1) {
        for (int d = 0; d < im.dim; ++d) {
            for (int s : {-1, 1}) {
                auto y = c;
                y[d] += s;
                out.push_back(NodeId::lattice(std::move(y)));
            }
        }
    } else {
        size_t total = 1;
        for (int d = 0; d < im.dim; ++d) total *= 3;
        for (size_t code = 0; code < total; ++code) {
            auto y = c;
            size_t rest = code;
            bool moved = false;
            for (int d = 0; d < im.dim; ++d) {
                int delta = static_cast<int>(rest % 3) - 1;
                rest /= 3;
                y[d] += delta;
                moved = moved || delta != 0;
            }
            if (moved) out.push_back(NodeId::lattice(std::move(y)));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

NodeList hex_neighbors(const NodeId& x) {
    const auto& c = x.coords();
    if (c.size() != 2) throw Error(ErrorKind::UnknownNode, "hex node " + x.str() + " must be 2-D");
    int64_t i = c[0], j = c[1];
    NodeList out{P(i - 1, j), P(i + 1, j)};
    out.push_back(((i + j) % 2 == 0) ? P(i, j + 1) : P(i, j - 1));
    std::sort(out.begin(), out.end());
    return out;
}

NodeList hierarchy_neighbors(const Network::Impl& im, const NodeId& x) {
    if (!x.is_indexed()) throw Error(ErrorKind::UnknownNode, "hierarchy node " + x.str() + " must be indexed");
    uint64_t i = x.index();
    uint32_t k = im.depth_of(i);
    uint64_t pos = i - im.offsets[k];
    NodeList out;
    if (k > 0) {
        uint64_t parent_pos = pos / im.arity_at(k - 1);
        out.push_back(NodeId::indexed(im.offsets[k - 1] + parent_pos));
    }
    if (k + 2 >= im.offsets.size()) throw Error(ErrorKind::TooLarge, "hierarchy children beyond representable depth");
    uint32_t a = im.arity_at(k);
    for (uint32_t j = 0; j < a; ++j) out.push_back(NodeId::indexed(im.offsets[k + 1] + pos * a + j));
    std::sort(out.begin(), out.end());
    return out;
}

uint64_t lattice_distance(Neighborhood nb, const NodeId& a, const NodeId& b) {
    const auto& ca = a.coords();
    const auto& cb = b.coords();
    uint64_t sum = 0, mx = 0;
    for (size_t d = 0; d < ca.size(); ++d) {
        uint64_t diff = static_cast<uint64_t>(ca[d] > cb[d] ? ca[d] - cb[d] : cb[d] - ca[d]);
        sum += diff;
        mx = std::max(mx, diff);
    }
    return nb == Neighborhood::L1 ? sum : mx;
}

NodeList impl_neighbors(const Network::Impl& im, const NodeId& x) {
    switch (im.kind) {
    case Network::Kind::SquareLattice: return lattice_neighbors(im, x);
    case Network::Kind::HexPavement: return hex_neighbors(x);
    case Network::Kind::Hierarchy: return hierarchy_neighbors(im, x);
    case Network::Kind::Explicit: {
        auto it = im.adj.find(x);
        if (it == im.adj.end()) throw Error(ErrorKind::UnknownNode, "unknown node " + x.str());
        return it->second;
    }
    case Network::Kind::Subnetwork: {
        uint64_t dx = lattice_distance(im.base->nb, x, im.center);
        NodeList out;
        for (const NodeId& y : lattice_neighbors(*im.base, x)) {
            uint64_t dy = lattice_distance(im.base->nb, y, im.center);
            if (dx + 1 == dy || dy + 1 == dx) out.push_back(y);
        }
        return out;
    }
    }
    return {};
}

} // namespace

Network Network::square_lattice(int dim, Neighborhood nb) {
    if (dim < 1) throw Error(ErrorKind::InvalidNetwork, "lattice dimension must be positive");
    auto im = make_impl(Kind::SquareLattice);
    im->dim = dim;
    im->nb = nb;
    size_t g = 1;
    for (int d = 0; d < dim; ++d) g *= 3;
    im->gamma = nb == Neighborhood::L1 ? 2 * static_cast<size_t>(dim) : g - 1;
    im->bipartite = nb == Neighborhood::L1 || dim == 1;
    return Network(im);
}

Network Network::hex_pavement() {
    auto im = make_impl(Kind::HexPavement);
    im->dim = 2;
    im->gamma = 3;
    return Network(im);
}

Network Network::hierarchy(uint32_t m) { return hierarchy({}, m); }

Network Network::hierarchy(std::vector<uint32_t> arity_by_depth, uint32_t tail) {
    auto im = make_impl(Kind::Hierarchy);
    im->arity = std::move(arity_by_depth);
    im->tail = tail;
    uint32_t max_arity = tail;
    for (uint32_t a : im->arity) {
        if (a == 0) throw Error(ErrorKind::InvalidNetwork, "hierarchy arity must be positive");
        max_arity = std::max(max_arity, a);
    }
    if (tail == 0) throw Error(ErrorKind::InvalidNetwork, "hierarchy arity must be positive");
    im->gamma = max_arity + 1;
    uint64_t offset = 0, width = 1;
    for (size_t k = 0; k < kHierarchyMaxLayers; ++k) {
        im->offsets.push_back(offset);
        if (offset > kHierarchyIndexLimit - width) break;
        offset += width;
        uint32_t a = im->arity_at(k);
        if (width > kHierarchyIndexLimit / a) {
            im->offsets.push_back(offset);
            break;
        }
        width *= a;
    }
    return Network(im);
}

Network Network::explicit_graph(const Adjacency& adjacency) {
    ValidationReport rep = validate(adjacency);
    if (!rep.ok()) {
        std::string msg = "explicit graph fails validation:";
        for (const auto& f : rep.failures) msg += " " + f + ";";
        throw Error(ErrorKind::InvalidNetwork, msg);
    }
    auto im = make_impl(Kind::Explicit);
    for (const auto& [node, list] : adjacency) {
        NodeList sorted = list;
        normalize(sorted);
        im->adj[node] = sorted;
        im->nodes.push_back(node);
    }
    im->gamma = std::max<size_t>(rep.max_degree, 1);
    Coloring col = two_color(im->nodes, [&](const NodeId& x) { return im->adj.at(x); }, im->nodes.front(), Parity::Even);
    im->bipartite = !col.odd_cycle.has_value();
    if (im->bipartite) im->coloring = std::move(col.color);
    return Network(im);
}

Network Network::from_edges(const NodeList& nodes, const std::vector<std::pair<NodeId, NodeId>>& edges) {
    Adjacency adj;
    for (const NodeId& n : nodes) adj[n];
    for (const auto& [u, v] : edges) {
        if (!adj.count(u) || !adj.count(v)) throw Error(ErrorKind::InvalidNetwork, "edge endpoint not in node list");
        adj[u].push_back(v);
        if (!(u == v)) adj[v].push_back(u);
    }
    for (auto& [n, list] : adj) normalize(list);
    return explicit_graph(adj);
}

Network::Kind Network::kind() const { return impl_->kind; }

std::string Network::describe() const {
    switch (impl_->kind) {
    case Kind::SquareLattice:
        return "Z^" + std::to_string(impl_->dim) + (impl_->nb == Neighborhood::L1 ? " L1" : " Linf");
    case Kind::HexPavement: return "hex";
    case Kind::Hierarchy: return "hierarchy(tail arity " + std::to_string(impl_->tail) + ")";
    case Kind::Explicit: return "explicit(" + std::to_string(impl_->nodes.size()) + " nodes)";
    case Kind::Subnetwork: return "subnetwork(center " + impl_->center.str() + ")";
    }
    return "?";
}

size_t Network::gamma() const { return impl_->gamma; }

bool Network::contains(const NodeId& x) const {
    switch (impl_->kind) {
    case Kind::SquareLattice: return x.is_lattice() && static_cast<int>(x.coords().size()) == impl_->dim;
    case Kind::Subnetwork: return x.is_lattice() && static_cast<int>(x.coords().size()) == impl_->base->dim;
    case Kind::HexPavement: return x.is_lattice() && x.coords().size() == 2;
    case Kind::Hierarchy: return x.is_indexed() && x.index() < impl_->offsets.back();
    case Kind::Explicit: return impl_->adj.count(x) > 0;
    }
    return false;
}

NodeList Network::neighbors(const NodeId& x) const { return impl_neighbors(*impl_, x); }

const NodeList& Network::nodes() const {
    if (impl_->kind != Kind::Explicit) throw Error(ErrorKind::InvalidInput, "infinite network has no node list");
    return impl_->nodes;
}

NodeId Network::origin() const {
    switch (impl_->kind) {
    case Kind::SquareLattice: return NodeId::lattice(NodeId::Coords(static_cast<size_t>(impl_->dim), 0));
    case Kind::HexPavement: return P(0, 0);
    case Kind::Hierarchy: return NodeId::indexed(0);
    case Kind::Explicit: return impl_->nodes.front();
    case Kind::Subnetwork: return impl_->center;
    }
    return {};
}

bool Network::is_bipartite() const {
    return impl_->kind == Kind::Subnetwork || impl_->bipartite;
}

std::optional<Parity> Network::parity(const NodeId& x) const {
    switch (impl_->kind) {
    case Kind::SquareLattice: {
        if (!impl_->bipartite) return std::nullopt;
        int64_t s = 0;
        for (int64_t c : x.coords()) s += c;
        return parity_of_int(s);
    }
    case Kind::HexPavement: return parity_of_int(x.coords()[0] + x.coords()[1]);
    case Kind::Hierarchy: return parity_of_int(impl_->depth_of(x.index()));
    case Kind::Explicit: {
        if (!impl_->bipartite) return std::nullopt;
        auto it = impl_->coloring.find(x);
        if (it == impl_->coloring.end()) throw Error(ErrorKind::UnknownNode, "unknown node " + x.str());
        return it->second;
    }
    case Kind::Subnetwork:
        return parity_of_int(static_cast<int64_t>(lattice_distance(impl_->base->nb, x, impl_->center)));
    }
    return std::nullopt;
}

bool Network::split_side(const NodeId& x) const {
    switch (impl_->kind) {
    case Kind::SquareLattice:
    case Kind::HexPavement:
    case Kind::Subnetwork: return x.coords()[0] >= 0;
    case Kind::Hierarchy: {
        if (impl_->arity_at(0) < 2) throw Error(ErrorKind::UnsupportedBase, "split needs a root with at least two children");
        uint64_t i = x.index();
        uint32_t k = impl_->depth_of(i);
        if (k == 0) return false;
        uint64_t pos = i - impl_->offsets[k];
        for (uint32_t d = k; d > 1; --d) pos /= impl_->arity_at(d - 1);
        return pos == 0;
    }
    case Kind::Explicit: throw Error(ErrorKind::UnsupportedBase, "split patterns need an infinite network");
    }
    return false;
}

std::optional<uint64_t> Network::analytic_distance(const NodeId& a, const NodeId& b) const {
    if (impl_->kind == Kind::SquareLattice) return lattice_distance(impl_->nb, a, b);
    return std::nullopt;
}

int Network::dim() const { return impl_->kind == Kind::Subnetwork ? impl_->base->dim : impl_->dim; }

Neighborhood Network::neighborhood() const { return impl_->kind == Kind::Subnetwork ? impl_->base->nb : impl_->nb; }

uint32_t Network::hierarchy_depth(const NodeId& x) const {
    if (impl_->kind != Kind::Hierarchy) throw Error(ErrorKind::InvalidInput, "not a hierarchy");
    return impl_->depth_of(x.index());
}

bool Network::same_as(const Network& other) const {
    if (impl_ == other.impl_) return true;
    const Impl& a = *impl_;
    const Impl& b = *other.impl_;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Kind::SquareLattice: return a.dim == b.dim && a.nb == b.nb;
    case Kind::HexPavement: return true;
    case Kind::Hierarchy: return a.arity == b.arity && a.tail == b.tail;
    case Kind::Explicit: return a.adj == b.adj;
    case Kind::Subnetwork: return a.center == b.center && a.base->dim == b.base->dim && a.base->nb == b.base->nb;
    }
    return false;
}

// ---------------------------------------------------------------- validation

ValidationReport validate(const Adjacency& adjacency, std::optional<size_t> gamma) {
    ValidationReport rep;
    for (const auto& [x, list] : adjacency) {
        std::set<NodeId> distinct(list.begin(), list.end());
        rep.max_degree = std::max(rep.max_degree, distinct.size());
        for (const NodeId& y : distinct) {
            if (y == x) {
                if (rep.irreflexive) rep.failures.push_back("self-loop at " + x.str());
                rep.irreflexive = false;
                continue;
            }
            auto it = adjacency.find(y);
            bool back = it != adjacency.end() && std::find(it->second.begin(), it->second.end(), x) != it->second.end();
            if (!back) {
                if (rep.symmetric) rep.failures.push_back("edge " + x.str() + "->" + y.str() + " has no reverse");
                rep.symmetric = false;
            }
        }
    }
    if (gamma && rep.max_degree > *gamma) {
        rep.bounded = false;
        rep.failures.push_back("degree " + std::to_string(rep.max_degree) + " exceeds bound " + std::to_string(*gamma));
    }
    if (adjacency.empty()) {
        rep.connected = false;
        rep.failures.push_back("empty graph");
        return rep;
    }
    std::set<NodeId> seen{adjacency.begin()->first};
    std::deque<NodeId> queue{adjacency.begin()->first};
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (const NodeId& v : adjacency.at(u)) {
            if (adjacency.count(v) && seen.insert(v).second) queue.push_back(v);
        }
    }
    if (seen.size() != adjacency.size()) {
        rep.connected = false;
        rep.failures.push_back("graph has more than one component");
    }
    return rep;
}

// ---------------------------------------------------------------- boundary

BoundaryPolicy BoundaryPolicy::complemented() const {
    switch (kind) {
    case BoundaryKind::FrozenInactive: return frozen_active();
    case BoundaryKind::FrozenActive: return frozen_inactive();
    case BoundaryKind::Torus: return torus();
    case BoundaryKind::Extend: {
        auto f = pattern;
        return extend([f](const NodeId& y) { return !f(y); });
    }
    }
    return {};
}

std::string BoundaryPolicy::name() const {
    switch (kind) {
    case BoundaryKind::FrozenInactive: return "frozen-inactive";
    case BoundaryKind::FrozenActive: return "frozen-active";
    case BoundaryKind::Torus: return "torus";
    case BoundaryKind::Extend: return "extend";
    }
    return "?";
}

// ---------------------------------------------------------------- Window

Window Window::box(const Network& base, Bounds bounds, BoundaryPolicy boundary) {
    if (base.kind() != Network::Kind::SquareLattice && base.kind() != Network::Kind::HexPavement) {
        throw Error(ErrorKind::InvalidInput, "box windows need a lattice or hex base");
    }
    if (static_cast<int>(bounds.size()) != base.dim()) throw Error(ErrorKind::InvalidInput, "box bounds do not match dimension");
    for (const auto& [lo, hi] : bounds) {
        if (lo > hi) throw Error(ErrorKind::InvalidInput, "empty box");
        if (boundary.kind == BoundaryKind::Torus && hi - lo + 1 < 3) {
            throw Error(ErrorKind::InvalidInput, "torus boxes need width at least 3");
        }
    }
    if (boundary.kind == BoundaryKind::Torus && base.kind() != Network::Kind::SquareLattice) {
        throw Error(ErrorKind::InvalidInput, "torus boundary requires a square lattice");
    }
    if (boundary.kind == BoundaryKind::Extend && !boundary.pattern) throw Error(ErrorKind::InvalidInput, "extend boundary without pattern");
    Window w;
    w.base_ = std::make_shared<const Network>(base);
    w.boundary_ = std::move(boundary);
    w.box_ = bounds;
    NodeId::Coords c;
    for (const auto& b : bounds) c.push_back(b.first);
    while (true) {
        w.nodes_.push_back(NodeId::lattice(c));
        int d = static_cast<int>(bounds.size()) - 1;
        while (d >= 0 && c[d] == bounds[d].second) {
            c[d] = bounds[d].first;
            --d;
        }
        if (d < 0) break;
        ++c[d];
    }
    w.build_index();
    w.check_connected();
    return w;
}

Window Window::centered_box(const Network& base, int64_t r, BoundaryPolicy boundary) {
    return box(base, Bounds(static_cast<size_t>(base.dim()), {-r, r}), std::move(boundary));
}

Window Window::ball(const Network& base, const NodeId& center, size_t radius, BoundaryPolicy boundary) {
    if (boundary.kind == BoundaryKind::Torus) throw Error(ErrorKind::InvalidInput, "torus boundary requires a box");
    if (boundary.kind == BoundaryKind::Extend && !boundary.pattern) throw Error(ErrorKind::InvalidInput, "extend boundary without pattern");
    Window w;
    w.base_ = std::make_shared<const Network>(base);
    w.boundary_ = std::move(boundary);
    w.nodes_ = ball_nodes(base, center, radius);
    w.build_index();
    return w;
}

Window Window::whole(const Network& finite_net) {
    Window w;
    w.base_ = std::make_shared<const Network>(finite_net);
    w.nodes_ = finite_net.nodes();
    w.build_index();
    return w;
}

Window Window::with_boundary(BoundaryPolicy b) const {
    if (b.kind == BoundaryKind::Torus && !box_) throw Error(ErrorKind::InvalidInput, "torus boundary requires a box");
    Window w = *this;
    w.boundary_ = std::move(b);
    return w;
}

void Window::build_index() {
    normalize(nodes_);
    index_.clear();
    for (size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i]] = i;
}

void Window::check_connected() const {
    std::set<NodeId> seen{nodes_.front()};
    std::deque<NodeId> queue{nodes_.front()};
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (const NodeId& v : neighbors(u)) {
            if (seen.insert(v).second) queue.push_back(v);
        }
    }
    if (seen.size() != nodes_.size()) throw Error(ErrorKind::InvalidInput, "window region is not connected");
}

size_t Window::index_of(const NodeId& x) const {
    auto it = index_.find(x);
    if (it == index_.end()) throw Error(ErrorKind::OutOfRegion, "node " + x.str() + " outside window");
    return it->second;
}

const Window::Bounds& Window::bounds() const {
    if (!box_) throw Error(ErrorKind::InvalidInput, "window is not a box");
    return *box_;
}

std::optional<NodeId> Window::resolve(const NodeId& y) const {
    if (index_.count(y)) return y;
    if (boundary_.kind != BoundaryKind::Torus) return std::nullopt;
    auto c = y.coords();
    for (size_t d = 0; d < c.size(); ++d) {
        int64_t lo = (*box_)[d].first, w = (*box_)[d].second - lo + 1;
        c[d] = lo + (((c[d] - lo) % w) + w) % w;
    }
    return NodeId::lattice(std::move(c));
}

bool Window::ghost_active(const NodeId& y) const {
    switch (boundary_.kind) {
    case BoundaryKind::FrozenInactive: return false;
    case BoundaryKind::FrozenActive: return true;
    case BoundaryKind::Extend: return boundary_.pattern(y);
    case BoundaryKind::Torus: return false;
    }
    return false;
}

NodeList Window::neighbors(const NodeId& x) const {
    NodeList out;
    for (const NodeId& y : base_->neighbors(x)) {
        auto r = resolve(y);
        if (r && !(*r == x)) out.push_back(*r);
    }
    normalize(out);
    return out;
}

Adjacency Window::induced_adjacency() const {
    Adjacency adj;
    for (const NodeId& x : nodes_) adj[x] = neighbors(x);
    return adj;
}

Network Window::as_network() const { return Network::explicit_graph(induced_adjacency()); }

// ---------------------------------------------------------------- bipartition

BipartitionResult bipartition(const Network& net) {
    if (net.kind() == Network::Kind::SquareLattice && !net.is_bipartite()) {
        NodeId::Coords a(static_cast<size_t>(net.dim()), 0), b = a, c = a;
        b[0] = 1;
        c[0] = 1;
        c[1] = 1;
        return OddCycle{{NodeId::lattice(a), NodeId::lattice(b), NodeId::lattice(c)}};
    }
    if (net.kind() == Network::Kind::Explicit) {
        Coloring col = two_color(net.nodes(), [&](const NodeId& x) { return net.neighbors(x); }, net.origin(), Parity::Even);
        if (col.odd_cycle) return OddCycle{*col.odd_cycle};
        Bipartition bip;
        for (const auto& [n, p] : col.color) (p == Parity::Even ? bip.evens : bip.odds).push_back(n);
        auto shared = std::make_shared<std::map<NodeId, Parity>>(std::move(col.color));
        bip.parity = [shared](const NodeId& x) {
            auto it = shared->find(x);
            if (it == shared->end()) throw Error(ErrorKind::UnknownNode, "unknown node " + x.str());
            return it->second;
        };
        return bip;
    }
    Bipartition bip;
    bip.parity = [net](const NodeId& x) { return *net.parity(x); };
    return bip;
}

BipartitionResult bipartition(const Window& window) {
    NodeId root = window.contains(window.base().origin()) ? window.base().origin() : window.nodes().front();
    Parity root_color = Parity::Even;
    if (window.base().is_bipartite()) root_color = *window.base().parity(root);
    Coloring col = two_color(window.nodes(), [&](const NodeId& x) { return window.neighbors(x); }, root, root_color);
    if (col.odd_cycle) return OddCycle{*col.odd_cycle};
    Bipartition bip;
    for (const auto& [n, p] : col.color) (p == Parity::Even ? bip.evens : bip.odds).push_back(n);
    auto shared = std::make_shared<std::map<NodeId, Parity>>(std::move(col.color));
    bip.parity = [shared](const NodeId& x) {
        auto it = shared->find(x);
        if (it == shared->end()) throw Error(ErrorKind::OutOfRegion, "node " + x.str() + " outside window");
        return it->second;
    };
    return bip;
}

std::map<NodeId, uint64_t> bfs_distances(const Network& net, const NodeId& src, uint64_t max_radius) {
    if (!net.contains(src)) throw Error(ErrorKind::UnknownNode, "unknown node " + src.str());
    std::map<NodeId, uint64_t> dist{{src, 0}};
    std::deque<NodeId> queue{src};
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        uint64_t du = dist[u];
        if (du == max_radius) continue;
        for (const NodeId& v : net.neighbors(u)) {
            if (dist.emplace(v, du + 1).second) queue.push_back(v);
        }
    }
    return dist;
}

std::map<NodeId, uint64_t> bfs_distances(const Window& window, const NodeId& src) {
    if (!window.contains(src)) throw Error(ErrorKind::OutOfRegion, "node " + src.str() + " outside window");
    std::map<NodeId, uint64_t> dist{{src, 0}};
    std::deque<NodeId> queue{src};
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (const NodeId& v : window.neighbors(u)) {
            if (dist.emplace(v, dist[u] + 1).second) queue.push_back(v);
        }
    }
    return dist;
}

NodeList ball_nodes(const Network& net, const NodeId& center, uint64_t r) {
    NodeList out;
    for (const auto& [n, d] : bfs_distances(net, center, r)) out.push_back(n);
    return out;
}

namespace {

Network subnetwork_from_distances(const Adjacency& adj, const std::map<NodeId, uint64_t>& dist) {
    Adjacency kept;
    for (const auto& [x, list] : adj) {
        auto& out = kept[x];
        uint64_t dx = dist.at(x);
        for (const NodeId& y : list) {
            uint64_t dy = dist.at(y);
            if (dx + 1 == dy || dy + 1 == dx) out.push_back(y);
        }
    }
    return Network::explicit_graph(kept);
}

} // namespace

Network bipartite_subnetwork(const Network& net, const NodeId& c) {
    if (!net.contains(c)) throw Error(ErrorKind::UnknownNode, "unknown node " + c.str());
    if (net.kind() == Network::Kind::Explicit) {
        Adjacency adj;
        for (const NodeId& x : net.nodes()) adj[x] = net.neighbors(x);
        return subnetwork_from_distances(adj, bfs_distances(net, c, std::numeric_limits<uint64_t>::max()));
    }
    if (net.is_bipartite()) return net;
    // Linf lattice: Chebyshev distance is the graph distance.
    auto im = make_impl(Network::Kind::Subnetwork);
    im->base = net.impl_;
    im->center = c;
    im->gamma = net.gamma();
    im->dim = net.dim();
    im->nb = net.neighborhood();
    return Network(im);
}

Network bipartite_subnetwork(const Window& window, const NodeId& c) {
    return subnetwork_from_distances(window.induced_adjacency(), bfs_distances(window, c));
}

std::optional<std::pair<NodeId, NodeId>> intra_block_edge(const Network& net, const Bipartition& bip, size_t scan_radius) {
    NodeList scan = net.is_finite() ? net.nodes() : ball_nodes(net, net.origin(), scan_radius);
    if (!net.is_finite()) {
        auto dist = bfs_distances(net, net.origin(), scan_radius);
        std::stable_sort(scan.begin(), scan.end(), [&](const NodeId& a, const NodeId& b) { return dist[a] < dist[b]; });
    }
    for (const NodeId& x : scan) {
        for (const NodeId& y : net.neighbors(x)) {
            if (bip.of(x) == bip.of(y)) return std::make_pair(std::min(x, y), std::max(x, y));
        }
    }
    return std::nullopt;
}

std::optional<std::pair<NodeId, NodeId>> intra_block_edge(const Window& window, const Bipartition& bip) {
    for (const NodeId& x : window.nodes()) {
        for (const NodeId& y : window.neighbors(x)) {
            if (bip.of(x) == bip.of(y)) return std::make_pair(std::min(x, y), std::max(x, y));
        }
    }
    return std::nullopt;
}

Network line_graph(size_t n) {
    NodeList nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (size_t i = 0; i < n; ++i) {
        nodes.push_back(NodeId::lattice({static_cast<int64_t>(i)}));
        if (i) edges.emplace_back(nodes[i - 1], nodes[i]);
    }
    return Network::from_edges(nodes, edges);
}

Network example4_graph(int64_t r, bool with_alpha_beta_edge) {
    Window box = Window::centered_box(Network::square_lattice(2, Neighborhood::L1), r);
    Adjacency adj = box.induced_adjacency();
    NodeId alpha = NodeId::named("alpha"), beta = NodeId::named("beta"), o = P(0, 0);
    adj[alpha] = {o};
    adj[beta] = {o};
    adj[o].push_back(alpha);
    adj[o].push_back(beta);
    if (with_alpha_beta_edge) {
        adj[alpha].push_back(beta);
        adj[beta].push_back(alpha);
    }
    for (auto& [n, list] : adj) normalize(list);
    return Network::explicit_graph(adj);
}

} // namespace netdiff
