#include "netdiff/configuration.hpp"

#include "netdiff/error.hpp"

#include <algorithm>
#include <map>

namespace netdiff {

const char* status_name(Status s) { return s == Status::Active ? "Active" : "Inactive"; }

Status parse_status(const std::string& s) {
    if (s == "Active" || s == "active" || s == "1") return Status::Active;
    if (s == "Inactive" || s == "inactive" || s == "0") return Status::Inactive;
    throw Error(ErrorKind::InvalidInput, "unknown status '" + s + "'");
}

namespace {

const char* fill_name(Fill f) {
    switch (f) {
    case Fill::Inactive: return "Inactive";
    case Fill::Active: return "Active";
    case Fill::Split: return "Split";
    case Fill::CoSplit: return "CoSplit";
    }
    return "?";
}

Fill parse_fill(const std::string& s) {
    if (s == "Inactive") return Fill::Inactive;
    if (s == "Active") return Fill::Active;
    if (s == "Split") return Fill::Split;
    if (s == "CoSplit") return Fill::CoSplit;
    throw Error(ErrorKind::InvalidInput, "unknown fill '" + s + "'");
}

Fill complement_fill(Fill f) {
    switch (f) {
    case Fill::Inactive: return Fill::Active;
    case Fill::Active: return Fill::Inactive;
    case Fill::Split: return Fill::CoSplit;
    case Fill::CoSplit: return Fill::Split;
    }
    return f;
}

} // namespace

bool Base::homogeneous() const {
    auto plain = [](Fill f) { return f == Fill::Inactive || f == Fill::Active; };
    return plain(even) && plain(odd);
}

Base Base::complement() const { return {complement_fill(even), complement_fill(odd)}; }

std::string Base::name() const {
    if (*this == all_inactive()) return "AllInactive";
    if (*this == all_active()) return "AllActive";
    if (*this == even_active()) return "EvenActive";
    if (*this == odd_active()) return "OddActive";
    return std::string("even=") + fill_name(even) + ",odd=" + fill_name(odd);
}

Base Base::parse(const std::string& name) {
    if (name == "AllInactive") return all_inactive();
    if (name == "AllActive") return all_active();
    if (name == "EvenActive") return even_active();
    if (name == "OddActive") return odd_active();
    auto comma = name.find(',');
    if (name.rfind("even=", 0) == 0 && comma != std::string::npos && name.compare(comma + 1, 4, "odd=") == 0) {
        return {parse_fill(name.substr(5, comma - 5)), parse_fill(name.substr(comma + 5))};
    }
    throw Error(ErrorKind::InvalidInput, "unknown base '" + name + "'");
}

// ---------------------------------------------------------------- ConfigDescriptor

ConfigDescriptor::ConfigDescriptor(Network frame, Base base, std::map<NodeId, Status> exceptions)
    : frame_(std::move(frame)), base_(base) {
    if (!base_.parity_free() && !frame_.is_bipartite()) {
        throw Error(ErrorKind::NotBipartite, "base " + base_.name() + " needs a bipartite network");
    }
    if (!base_.homogeneous()) frame_.split_side(frame_.origin());
    for (const auto& [x, s] : exceptions) {
        if (!frame_.contains(x)) throw Error(ErrorKind::UnknownNode, "exception at unknown node " + x.str());
        if (s != base_status(x)) exceptions_.emplace(x, s);
    }
}

ConfigDescriptor ConfigDescriptor::with_active(const Network& net, const NodeList& active) {
    std::map<NodeId, Status> ex;
    for (const NodeId& x : active) ex[x] = Status::Active;
    return {net, Base::all_inactive(), ex};
}

NodeList ConfigDescriptor::exception_nodes() const {
    NodeList out;
    for (const auto& [x, s] : exceptions_) out.push_back(x);
    return out;
}

Status ConfigDescriptor::base_status(const NodeId& x) const {
    Fill f = base_.even;
    if (!base_.parity_free() && *frame_.parity(x) == Parity::Odd) f = base_.odd;
    switch (f) {
    case Fill::Inactive: return Status::Inactive;
    case Fill::Active: return Status::Active;
    case Fill::Split: return frame_.split_side(x) ? Status::Active : Status::Inactive;
    case Fill::CoSplit: return frame_.split_side(x) ? Status::Inactive : Status::Active;
    }
    return Status::Inactive;
}

Status ConfigDescriptor::status_of(const NodeId& x) const {
    auto it = exceptions_.find(x);
    return it != exceptions_.end() ? it->second : base_status(x);
}

ConfigDescriptor ConfigDescriptor::with(const NodeId& x, Status s) const {
    auto ex = exceptions_;
    ex[x] = s;
    return {frame_, base_, ex};
}

ConfigDescriptor ConfigDescriptor::complement() const {
    std::map<NodeId, Status> ex;
    for (const auto& [x, s] : exceptions_) ex[x] = flip(s);
    return {frame_, base_.complement(), ex};
}

NodeSet ConfigDescriptor::active_set() const {
    if (!(base_ == Base::all_inactive())) throw Error(ErrorKind::UnsupportedBase, "active set is infinite for base " + base_.name());
    return NodeSet::finite(exception_nodes());
}

size_t ConfigDescriptor::hash() const {
    size_t h = static_cast<size_t>(base_.even) * 31 + static_cast<size_t>(base_.odd);
    for (const auto& [x, s] : exceptions_) {
        h ^= x.hash() + static_cast<size_t>(s) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

// ---------------------------------------------------------------- WindowConfig

WindowConfig::WindowConfig(Window w) : window_(std::move(w)), bits_(window_.size(), 0) {}

WindowConfig::WindowConfig(Window w, std::vector<uint8_t> bits) : window_(std::move(w)), bits_(std::move(bits)) {
    if (bits_.size() != window_.size()) throw Error(ErrorKind::InvalidInput, "bit array length differs from region size");
}

WindowConfig WindowConfig::from_active(Window w, const NodeList& active) {
    WindowConfig c(std::move(w));
    for (const NodeId& x : active) c.set(x, Status::Active);
    return c;
}

WindowConfig WindowConfig::from_set(Window w, const NodeSet& active) {
    return from_function(std::move(w), [&](const NodeId& x) { return active.contains(x); });
}

WindowConfig WindowConfig::from_rows(Window w, const std::vector<std::string>& rows) {
    const Window::Bounds b = w.bounds();
    if (b.size() != 2) throw Error(ErrorKind::InvalidInput, "rows need a 2-D box window");
    size_t width = static_cast<size_t>(b[0].second - b[0].first + 1);
    size_t height = static_cast<size_t>(b[1].second - b[1].first + 1);
    if (rows.size() != height) throw Error(ErrorKind::InvalidInput, "row count differs from window height");
    WindowConfig c(std::move(w));
    for (size_t r = 0; r < height; ++r) {
        if (rows[r].size() != width) throw Error(ErrorKind::InvalidInput, "row width differs from window width");
        for (size_t k = 0; k < width; ++k) {
            char ch = rows[r][k];
            if (ch == '#' || ch == '1') {
                c.set(P(b[0].first + static_cast<int64_t>(k), b[1].second - static_cast<int64_t>(r)), Status::Active);
            } else if (ch != '.' && ch != '0') {
                throw Error(ErrorKind::InvalidInput, std::string("bad row character '") + ch + "'");
            }
        }
    }
    return c;
}

Status WindowConfig::status_of(const NodeId& x) const { return at(window_.index_of(x)); }

NodeList WindowConfig::active() const {
    NodeList out;
    for (size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) out.push_back(window_.nodes()[i]);
    }
    return out;
}

size_t WindowConfig::active_count() const { return static_cast<size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

bool WindowConfig::active_at(const NodeId& y) const {
    auto r = window_.resolve(y);
    if (r) return bits_[window_.index_of(*r)] != 0;
    return window_.ghost_active(y);
}

std::vector<std::string> WindowConfig::rows(char on, char off) const {
    const auto& b = window_.bounds();
    if (b.size() != 2) throw Error(ErrorKind::InvalidInput, "rows need a 2-D box window");
    std::vector<std::string> out;
    for (int64_t y = b[1].second; y >= b[1].first; --y) {
        std::string row;
        for (int64_t x = b[0].first; x <= b[0].second; ++x) row += bits_[window_.index_of(P(x, y))] ? on : off;
        out.push_back(row);
    }
    return out;
}

size_t WindowConfig::hash() const {
    size_t h = 0xcbf29ce484222325ULL;
    for (uint8_t b : bits_) h = (h ^ b) * 0x100000001b3ULL;
    return h;
}

// ---------------------------------------------------------------- Cylinder

Cylinder::Cylinder(NodeList x, NodeList y) : X(std::move(x)), Y(std::move(y)) {
    normalize(X);
    normalize(Y);
    if (!set_intersection(X, Y).empty()) throw Error(ErrorKind::InvalidInput, "cylinder sets overlap");
}

bool Cylinder::holds(const ConfigDescriptor& c) const {
    for (const NodeId& x : X) {
        if (c.status_of(x) != Status::Active) return false;
    }
    for (const NodeId& y : Y) {
        if (c.status_of(y) != Status::Inactive) return false;
    }
    return true;
}

// ---------------------------------------------------------------- taxonomy

std::string Cardinality::token() const {
    switch (kind) {
    case Kind::Zero: return "0";
    case Kind::Fin: return "F";
    case Kind::Inf: return "Inf";
    }
    return "?";
}

namespace {

char code(const Cardinality& c) {
    switch (c.kind) {
    case Cardinality::Kind::Zero: return '0';
    case Cardinality::Kind::Fin: return 'F';
    case Cardinality::Kind::Inf: return 'I';
    }
    return '?';
}

// Keys are (even-inactive, even-active, odd-inactive, odd-active).
const std::map<std::string, std::string>& taxonomy_table() {
    static const std::map<std::string, std::string> table = {
        {"0I0I", "class-1"},
        {"I0I0", "class-2"},
        {"0II0", "class-3"}, {"I00I", "class-3"},
        {"IIII", "class-4"},
        {"I0II", "class-5"}, {"III0", "class-5"},
        {"0III", "class-6"}, {"II0I", "class-6"},
        {"IFIF", "transient-a"},
        {"FIFI", "transient-b"},
        {"FIIF", "transient-c"}, {"IFFI", "transient-c"},
        {"IFII", "transient-d"}, {"IIIF", "transient-d"},
        {"FIII", "transient-e"}, {"IIFI", "transient-e"},
        {"IFI0", "transient-f"}, {"I0IF", "transient-f"},
        {"FI0I", "transient-g"}, {"0IFI", "transient-g"},
        {"0IIF", "transient-h"}, {"IF0I", "transient-h"},
        {"FII0", "transient-i"}, {"I0FI", "transient-i"},
    };
    return table;
}

} // namespace

std::string taxonomy_label(const Cardinality& ei, const Cardinality& ea, const Cardinality& oi, const Cardinality& oa) {
    std::string key{code(ei), code(ea), code(oi), code(oa)};
    auto it = taxonomy_table().find(key);
    return it == taxonomy_table().end() ? "none" : it->second;
}

std::string plain_label(const Cardinality& inactive, const Cardinality& active) {
    std::string key{code(inactive), code(active)};
    if (key == "I0" || key == "0I") return "finite-class";
    if (key == "II") return "infinite-class";
    if (key == "IF" || key == "FI") return "transient";
    return "none";
}

namespace {

struct Pair {
    Cardinality inactive, active;
};

Pair fill_cardinalities(Fill f) {
    switch (f) {
    case Fill::Inactive: return {Cardinality::inf(), Cardinality::zero()};
    case Fill::Active: return {Cardinality::zero(), Cardinality::inf()};
    default: return {Cardinality::inf(), Cardinality::inf()};
    }
}

Cardinality adjust(Cardinality base, uint64_t extra) {
    if (base.kind == Cardinality::Kind::Inf) return base;
    return Cardinality::of_count(base.count + extra);
}

} // namespace

BlockDescriptor block_classify(const Network& net, const ConfigDescriptor& config) {
    if (!net.is_bipartite()) throw Error(ErrorKind::NotBipartite, "block classification needs a bipartite network");
    uint64_t counts[2][2] = {{0, 0}, {0, 0}}; // [parity][status]
    for (const auto& [x, s] : config.exceptions()) counts[static_cast<int>(*net.parity(x))][static_cast<int>(s)]++;
    Pair even = fill_cardinalities(config.base().even);
    Pair odd = fill_cardinalities(config.base().odd);
    BlockDescriptor b;
    b.even_inactive = adjust(even.inactive, counts[0][0]);
    b.even_active = adjust(even.active, counts[0][1]);
    b.odd_inactive = adjust(odd.inactive, counts[1][0]);
    b.odd_active = adjust(odd.active, counts[1][1]);
    b.label = taxonomy_label(b.even_inactive, b.even_active, b.odd_inactive, b.odd_active);
    return b;
}

PlainBlock block_classify_plain(const Network& /*net*/, const ConfigDescriptor& config) {
    uint64_t counts[2] = {0, 0};
    for (const auto& [x, s] : config.exceptions()) counts[static_cast<int>(s)]++;
    Pair even = fill_cardinalities(config.base().even);
    Pair odd = fill_cardinalities(config.base().odd);
    auto merge = [](const Cardinality& a, const Cardinality& b) {
        return (a.kind == Cardinality::Kind::Inf || b.kind == Cardinality::Kind::Inf) ? Cardinality::inf() : Cardinality::zero();
    };
    PlainBlock p;
    p.inactive = adjust(merge(even.inactive, odd.inactive), counts[0]);
    p.active = adjust(merge(even.active, odd.active), counts[1]);
    p.label = plain_label(p.inactive, p.active);
    return p;
}

BlockDescriptor window_counts(const WindowConfig& config, const Bipartition& bip) {
    uint64_t counts[2][2] = {{0, 0}, {0, 0}};
    const auto& nodes = config.window().nodes();
    for (size_t i = 0; i < nodes.size(); ++i) counts[static_cast<int>(bip.of(nodes[i]))][static_cast<int>(config.at(i))]++;
    BlockDescriptor b;
    b.even_inactive = Cardinality::of_count(counts[0][0], true);
    b.even_active = Cardinality::of_count(counts[0][1], true);
    b.odd_inactive = Cardinality::of_count(counts[1][0], true);
    b.odd_active = Cardinality::of_count(counts[1][1], true);
    b.label = "none";
    return b;
}

BoundaryPolicy extend_base(const ConfigDescriptor& config) {
    return BoundaryPolicy::extend([config](const NodeId& y) { return config.status_of(y) == Status::Active; });
}

} // namespace netdiff
