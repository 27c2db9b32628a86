#include "netdiff/setops.hpp"

#include "netdiff/error.hpp"

#include <algorithm>
#include <iterator>
#include <unordered_set>

namespace netdiff {

NodeList set_union(const NodeList& a, const NodeList& b) {
    NodeList out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeList set_intersection(const NodeList& a, const NodeList& b) {
    NodeList out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeList set_difference(const NodeList& a, const NodeList& b) {
    NodeList out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeSet NodeSet::make(bool cofinite, NodeList elems) {
    NodeSet s;
    s.cofinite_ = cofinite;
    s.elems_ = std::move(elems);
    return s;
}

NodeSet NodeSet::finite(NodeList members) {
    normalize(members);
    return make(false, std::move(members));
}

NodeSet NodeSet::cofinite(NodeList complement) {
    normalize(complement);
    return make(true, std::move(complement));
}

bool NodeSet::contains(const NodeId& x) const {
    return std::binary_search(elems_.begin(), elems_.end(), x) != cofinite_;
}

NodeSet NodeSet::unite(const NodeSet& o) const {
    if (!cofinite_ && !o.cofinite_) return make(false, set_union(elems_, o.elems_));
    if (cofinite_ && o.cofinite_) return make(true, set_intersection(elems_, o.elems_));
    const NodeSet& co = cofinite_ ? *this : o;
    const NodeSet& fin = cofinite_ ? o : *this;
    return make(true, set_difference(co.elems_, fin.elems_));
}

NodeSet NodeSet::intersect(const NodeSet& o) const {
    if (!cofinite_ && !o.cofinite_) return make(false, set_intersection(elems_, o.elems_));
    if (cofinite_ && o.cofinite_) return make(true, set_union(elems_, o.elems_));
    const NodeSet& co = cofinite_ ? *this : o;
    const NodeSet& fin = cofinite_ ? o : *this;
    return make(false, set_difference(fin.elems_, co.elems_));
}

bool NodeSet::subset_of(const NodeSet& o) const { return minus(o).empty_set(); }

size_t NodeSet::hash() const {
    size_t h = cofinite_ ? 0x51ed270b27a4c3d1ULL : 0x2545f4914f6cdd1dULL;
    for (const NodeId& n : elems_) h ^= n.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::string NodeSet::str() const {
    std::string s = cofinite_ ? "all but {" : "{";
    for (size_t i = 0; i < elems_.size(); ++i) {
        if (i) s += ",";
        s += elems_[i].str();
    }
    return s + "}";
}

// ---------------------------------------------------------------- infinite networks

namespace {

NodeList union_of_neighborhoods(const Network& net, const NodeList& xs) {
    NodeList out;
    for (const NodeId& x : xs) {
        NodeList nb = net.neighbors(x);
        out.insert(out.end(), nb.begin(), nb.end());
    }
    normalize(out);
    return out;
}

// {x : every neighbor in `members`} for finite members; candidates lie in clo(members).
NodeList finite_interior(const Network& net, const NodeList& members) {
    NodeList out;
    for (const NodeId& x : union_of_neighborhoods(net, members)) {
        bool all = true;
        for (const NodeId& y : net.neighbors(x)) {
            if (!std::binary_search(members.begin(), members.end(), y)) {
                all = false;
                break;
            }
        }
        if (all) out.push_back(x);
    }
    return out;
}

} // namespace

NodeSet closure(const Network& net, const NodeSet& X) {
    // Every neighbor of a member has that member in its neighborhood.
    if (X.is_finite()) return NodeSet::finite(union_of_neighborhoods(net, X.elements()));
    return NodeSet::cofinite(finite_interior(net, X.elements()));
}

NodeSet interior(const Network& net, const NodeSet& X) {
    if (X.is_finite()) return NodeSet::finite(finite_interior(net, X.elements()));
    return NodeSet::cofinite(union_of_neighborhoods(net, X.elements()));
}

// ---------------------------------------------------------------- windows

namespace {

bool member(const Window& w, const NodeSet& X, const NodeId& y) {
    auto r = w.resolve(y);
    if (r) return X.contains(*r);
    return w.ghost_active(y);
}

template <class Pred>
NodeSet window_filter(const Window& w, Pred pred) {
    NodeList out;
    for (const NodeId& x : w.nodes()) {
        if (pred(x)) out.push_back(x);
    }
    return NodeSet::finite(std::move(out));
}

} // namespace

NodeSet window_complement(const Window& w, const NodeSet& X) {
    return window_filter(w, [&](const NodeId& x) { return !X.contains(x); });
}

NodeSet window_finite(const Window& w, const NodeSet& X) {
    return window_filter(w, [&](const NodeId& x) { return X.contains(x); });
}

NodeSet closure(const Window& w, const NodeSet& X) {
    return window_filter(w, [&](const NodeId& x) {
        for (const NodeId& y : w.base().neighbors(x)) {
            if (member(w, X, y)) return true;
        }
        return false;
    });
}

NodeSet interior(const Window& w, const NodeSet& X) {
    return window_filter(w, [&](const NodeId& x) {
        for (const NodeId& y : w.base().neighbors(x)) {
            if (!member(w, X, y)) return false;
        }
        return true;
    });
}

NodeSet iterate(SetOp op, size_t n, const Network& net, NodeSet X) {
    for (size_t i = 0; i < n; ++i) X = op == SetOp::Interior ? interior(net, X) : closure(net, X);
    return X;
}

NodeSet iterate(SetOp op, size_t n, const Window& w, NodeSet X) {
    for (size_t i = 0; i < n; ++i) X = op == SetOp::Interior ? interior(w, X) : closure(w, X);
    return X;
}

Frontier frontier(const Network& net, const NodeSet& X) {
    NodeSet boundary = closure(net, X).minus(interior(net, X));
    return {boundary.intersect(X), boundary.minus(X)};
}

Frontier frontier(const Window& w, const NodeSet& X) {
    NodeSet Xr = window_finite(w, X);
    NodeSet boundary = closure(w, Xr).minus(interior(w, Xr));
    return {boundary.intersect(Xr), boundary.minus(Xr)};
}

const char* det_class_name(DetClass c) {
    switch (c) {
    case DetClass::FixedPointUniversal: return "FixedPointUniversal";
    case DetClass::TwoCyclePair: return "TwoCyclePair";
    case DetClass::Neither: return "Neither";
    }
    return "?";
}

namespace {

DetClass classify_sets(const NodeSet& x, const NodeSet& xc, const NodeSet& in, const NodeSet& cl) {
    if (!(in == cl)) return DetClass::Neither;
    if (in == x) return DetClass::FixedPointUniversal;
    if (in == xc) return DetClass::TwoCyclePair;
    return DetClass::Neither;
}

} // namespace

DetClass deterministic_class(const Network& net, const NodeSet& X) {
    if (net.is_finite()) {
        Window w = Window::whole(net);
        return deterministic_class(w, X);
    }
    return classify_sets(X, X.complement(), interior(net, X), closure(net, X));
}

DetClass deterministic_class(const Window& w, const NodeSet& X) {
    NodeSet Xr = window_finite(w, X);
    return classify_sets(Xr, window_complement(w, Xr), interior(w, Xr), closure(w, Xr));
}

} // namespace netdiff
