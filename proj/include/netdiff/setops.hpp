#pragma once

#include "netdiff/network.hpp"

#include <cstddef>
#include <string>

namespace netdiff {

// Finite set, or the complement of a finite set.
class NodeSet {
public:
    NodeSet() = default;
    static NodeSet finite(NodeList members);
    static NodeSet cofinite(NodeList complement);
    static NodeSet empty() { return {}; }
    static NodeSet universe() { return cofinite({}); }

    bool is_finite() const { return !cofinite_; }
    bool is_cofinite() const { return cofinite_; }
    // Members when finite, the complement when cofinite.
    const NodeList& elements() const { return elems_; }
    size_t size() const { return elems_.size(); }
    bool empty_set() const { return !cofinite_ && elems_.empty(); }

    bool contains(const NodeId& x) const;
    NodeSet complement() const { return make(!cofinite_, elems_); }

    NodeSet unite(const NodeSet& o) const;
    NodeSet intersect(const NodeSet& o) const;
    NodeSet minus(const NodeSet& o) const { return intersect(o.complement()); }
    bool subset_of(const NodeSet& o) const;

    size_t hash() const;
    std::string str() const;

    bool operator==(const NodeSet& o) const = default;

private:
    static NodeSet make(bool cofinite, NodeList elems);
    bool cofinite_ = false;
    NodeList elems_;
};

struct NodeSetHash {
    size_t operator()(const NodeSet& s) const { return s.hash(); }
};

NodeList set_union(const NodeList& a, const NodeList& b);
NodeList set_intersection(const NodeList& a, const NodeList& b);
NodeList set_difference(const NodeList& a, const NodeList& b);

NodeSet closure(const Network& net, const NodeSet& X);
NodeSet interior(const Network& net, const NodeSet& X);

// Window versions: results are finite subsets of the region; cofinite inputs are read
// relative to the region and out-of-region neighbors follow the boundary policy.
NodeSet closure(const Window& w, const NodeSet& X);
NodeSet interior(const Window& w, const NodeSet& X);

enum class SetOp { Interior, Closure };

NodeSet iterate(SetOp op, size_t n, const Network& net, NodeSet X);
NodeSet iterate(SetOp op, size_t n, const Window& w, NodeSet X);

struct Frontier {
    NodeSet inner;
    NodeSet outer;
};

Frontier frontier(const Network& net, const NodeSet& X);
Frontier frontier(const Window& w, const NodeSet& X);

enum class DetClass { FixedPointUniversal, TwoCyclePair, Neither };
const char* det_class_name(DetClass c);

DetClass deterministic_class(const Network& net, const NodeSet& X);
DetClass deterministic_class(const Window& w, const NodeSet& X);

// Region-relative complement of a window set.
NodeSet window_complement(const Window& w, const NodeSet& X);
// Finite form of X restricted to the region.
NodeSet window_finite(const Window& w, const NodeSet& X);

} // namespace netdiff
