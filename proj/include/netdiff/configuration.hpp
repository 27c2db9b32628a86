#pragma once

#include "netdiff/network.hpp"
#include "netdiff/setops.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netdiff {

enum class Status : uint8_t { Inactive = 0, Active = 1 };
inline Status flip(Status s) { return s == Status::Active ? Status::Inactive : Status::Active; }
const char* status_name(Status s);
Status parse_status(const std::string& s);

// How one parity block is filled away from the exceptions.
// Split / CoSplit mark the two halves of Network::split_side; both halves are infinite.
enum class Fill : uint8_t { Inactive, Active, Split, CoSplit };

struct Base {
    Fill even = Fill::Inactive;
    Fill odd = Fill::Inactive;

    static constexpr Base all_inactive() { return {Fill::Inactive, Fill::Inactive}; }
    static constexpr Base all_active() { return {Fill::Active, Fill::Active}; }
    static constexpr Base even_active() { return {Fill::Active, Fill::Inactive}; }
    static constexpr Base odd_active() { return {Fill::Inactive, Fill::Active}; }

    bool homogeneous() const;    // no split fills
    bool parity_free() const { return even == odd && homogeneous(); }
    Base complement() const;
    std::string name() const;    // "AllInactive" ... or "even=Split,odd=Active"
    static Base parse(const std::string& name);

    bool operator==(const Base&) const = default;
};

class ConfigDescriptor {
public:
    // `frame` supplies parity and split sides; it must be bipartite unless the base is parity-free.
    ConfigDescriptor(Network frame, Base base, std::map<NodeId, Status> exceptions = {});

    static ConfigDescriptor all_inactive(const Network& net) { return {net, Base::all_inactive()}; }
    static ConfigDescriptor all_active(const Network& net) { return {net, Base::all_active()}; }
    static ConfigDescriptor even_active(const Network& net) { return {net, Base::even_active()}; }
    static ConfigDescriptor odd_active(const Network& net) { return {net, Base::odd_active()}; }
    // AllInactive base with the given active nodes.
    static ConfigDescriptor with_active(const Network& net, const NodeList& active);

    const Network& frame() const { return frame_; }
    Base base() const { return base_; }
    const std::map<NodeId, Status>& exceptions() const { return exceptions_; }
    NodeList exception_nodes() const;

    Status base_status(const NodeId& x) const;
    Status status_of(const NodeId& x) const;

    ConfigDescriptor with(const NodeId& x, Status s) const;
    ConfigDescriptor complement() const;

    // Finite active set, available when the base is AllInactive.
    NodeSet active_set() const;

    size_t hash() const;
    bool operator==(const ConfigDescriptor& o) const { return base_ == o.base_ && exceptions_ == o.exceptions_; }

private:
    Network frame_;
    Base base_;
    std::map<NodeId, Status> exceptions_;
};

class WindowConfig {
public:
    explicit WindowConfig(Window w);
    WindowConfig(Window w, std::vector<uint8_t> bits);
    static WindowConfig from_active(Window w, const NodeList& active);
    static WindowConfig from_set(Window w, const NodeSet& active);
    template <class F>
    static WindowConfig from_function(Window w, F f) {
        WindowConfig c(std::move(w));
        for (size_t i = 0; i < c.window_.size(); ++i) c.bits_[i] = f(c.window_.nodes()[i]) ? 1 : 0;
        return c;
    }
    // Rows with the largest second coordinate first; '#' or '1' active.
    static WindowConfig from_rows(Window w, const std::vector<std::string>& rows);

    const Window& window() const { return window_; }
    const std::vector<uint8_t>& bits() const { return bits_; }
    Status status_of(const NodeId& x) const;
    Status at(size_t i) const { return bits_[i] ? Status::Active : Status::Inactive; }
    void set(size_t i, Status s) { bits_[i] = s == Status::Active ? 1 : 0; }
    void set(const NodeId& x, Status s) { set(window_.index_of(x), s); }

    NodeList active() const;
    size_t active_count() const;
    NodeSet active_set() const { return NodeSet::finite(active()); }
    // Active status of any base node: in-region value, torus image or boundary ghost.
    bool active_at(const NodeId& y) const;

    std::vector<std::string> rows(char on = '#', char off = '.') const;

    size_t hash() const;
    bool operator==(const WindowConfig& o) const { return bits_ == o.bits_; }

private:
    Window window_;
    std::vector<uint8_t> bits_;
};

struct Cylinder {
    NodeList X; // active
    NodeList Y; // inactive

    Cylinder() = default;
    Cylinder(NodeList x, NodeList y);
    bool empty() const { return X.empty() && Y.empty(); }
    NodeList support() const { return set_union(X, Y); }
    bool holds(const ConfigDescriptor& c) const;
    bool operator==(const Cylinder&) const = default;
};

struct Cardinality {
    enum class Kind { Zero, Fin, Inf };
    Kind kind = Kind::Zero;
    uint64_t count = 0;
    bool censored = false;

    static Cardinality zero() { return {}; }
    static Cardinality fin(uint64_t n, bool censored = false) { return {Kind::Fin, n, censored}; }
    static Cardinality inf() { return {Kind::Inf, 0, false}; }
    static Cardinality of_count(uint64_t n, bool censored = false) { return n ? fin(n, censored) : zero(); }

    // "0", "F", "Inf"
    std::string token() const;
    bool operator==(const Cardinality&) const = default;
};

struct BlockDescriptor {
    Cardinality even_inactive, even_active, odd_inactive, odd_active;
    std::string label; // "class-1".."class-6", "transient-a".."transient-i", "none"
};

struct PlainBlock {
    Cardinality inactive, active;
    std::string label; // "finite-class", "infinite-class", "transient", "none"
};

std::string taxonomy_label(const Cardinality& ei, const Cardinality& ea, const Cardinality& oi, const Cardinality& oa);
std::string plain_label(const Cardinality& inactive, const Cardinality& active);

BlockDescriptor block_classify(const Network& net, const ConfigDescriptor& config);
PlainBlock block_classify_plain(const Network& net, const ConfigDescriptor& config);
BlockDescriptor window_counts(const WindowConfig& config, const Bipartition& bip);

// Boundary that continues a descriptor outside the window.
BoundaryPolicy extend_base(const ConfigDescriptor& config);

} // namespace netdiff
