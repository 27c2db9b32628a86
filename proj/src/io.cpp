#include "netdiff/io.hpp"

#include "netdiff/error.hpp"

#include <fstream>

namespace netdiff {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidInput, msg); }

template <class F>
auto guarded(const char* what, F f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        bad(std::string("malformed ") + what + ": " + e.what());
    }
}

} // namespace

Json node_to_json(const NodeId& n) {
    if (n.is_lattice()) return Json(n.coords());
    if (n.is_indexed()) return Json(n.index());
    return Json(n.label());
}

NodeId node_from_json(const Json& j) {
    if (j.is_array()) {
        NodeId::Coords c;
        for (const Json& v : j) {
            if (!v.is_number_integer()) bad("lattice coordinates must be integers");
            c.push_back(v.get<int64_t>());
        }
        return NodeId::lattice(std::move(c));
    }
    if (j.is_number_unsigned() || (j.is_number_integer() && j.get<int64_t>() >= 0)) return NodeId::indexed(j.get<uint64_t>());
    if (j.is_string()) return NodeId::named(j.get<std::string>());
    bad("node ids are arrays, non-negative integers or strings");
}

Json nodes_to_json(const NodeList& nodes, size_t cap) {
    Json out = Json::array();
    for (size_t i = 0; i < nodes.size() && i < cap; ++i) out.push_back(node_to_json(nodes[i]));
    return out;
}

NodeList nodes_from_json(const Json& j) {
    if (!j.is_array()) bad("node list must be an array");
    NodeList out;
    for (const Json& v : j) out.push_back(node_from_json(v));
    normalize(out);
    return out;
}

Json descriptor_to_json(const ConfigDescriptor& c) {
    NodeList act, inact;
    for (const auto& [n, s] : c.exceptions()) (s == Status::Active ? act : inact).push_back(n);
    Json j;
    j["base"] = c.base().name();
    j["active"] = nodes_to_json(act);
    j["inactive"] = nodes_to_json(inact);
    return j;
}

ConfigDescriptor descriptor_from_json(const Json& j, const Network& frame) {
    return guarded("descriptor", [&] {
        if (!j.is_object()) bad("descriptor must be an object");
        Base base = Base::parse(j.value("base", std::string("AllInactive")));
        std::map<NodeId, Status> exc;
        if (j.contains("active")) {
            for (const NodeId& n : nodes_from_json(j.at("active"))) exc[n] = Status::Active;
        }
        if (j.contains("inactive")) {
            for (const NodeId& n : nodes_from_json(j.at("inactive"))) {
                if (exc.count(n)) bad("node " + n.str() + " listed as both active and inactive");
                exc[n] = Status::Inactive;
            }
        }
        return ConfigDescriptor(frame, base, exc);
    });
}

Json cylinder_to_json(const Cylinder& c) {
    Json j;
    j["X"] = nodes_to_json(c.X);
    j["Y"] = nodes_to_json(c.Y);
    return j;
}

Cylinder cylinder_from_json(const Json& j) {
    return guarded("cylinder", [&] {
        if (!j.is_object()) bad("cylinder must be an object");
        return Cylinder(nodes_from_json(j.value("X", Json::array())), nodes_from_json(j.value("Y", Json::array())));
    });
}

Json trajectory_to_json(const Trajectory& t, const std::optional<ProbabilityBound>& bound, const TrajectoryCheck* certificates) {
    Json j;
    j["steps"] = Json::array();
    for (const Cylinder& c : t.steps) j["steps"].push_back(cylinder_to_json(c));
    if (bound) {
        j["prob_lower_bound"] = bound->value();
        j["log10_prob_lower_bound"] = bound->log10;
    }
    if (certificates) {
        Json all = Json::array();
        for (const auto& step : certificates->certificates) {
            Json s = Json::array();
            for (const Certificate& c : step) {
                s.push_back({{"node", node_to_json(c.node)}, {"witness", node_to_json(c.witness)}, {"status", status_name(c.status)}});
            }
            all.push_back(std::move(s));
        }
        j["certificates"] = std::move(all);
    }
    return j;
}

Trajectory trajectory_from_json(const Json& j) {
    return guarded("trajectory", [&] {
        Trajectory t;
        for (const Json& s : j.at("steps")) t.steps.push_back(cylinder_from_json(s));
        return t;
    });
}

Json block_to_json(const BlockDescriptor& b) {
    Json j;
    j["tuple"] = {b.even_inactive.token(), b.even_active.token(), b.odd_inactive.token(), b.odd_active.token()};
    j["label"] = b.label;
    return j;
}

Json plain_block_to_json(const PlainBlock& b) {
    Json j;
    j["tuple"] = {b.inactive.token(), b.active.token()};
    j["label"] = b.label;
    return j;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        bad("cannot parse " + path + ": " + e.what());
    }
}

Network graph_from_json(const Json& j) {
    return guarded("graph", [&] {
        NodeList nodes = nodes_from_json(j.at("nodes"));
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (const Json& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) bad("edges are pairs of node ids");
            edges.emplace_back(node_from_json(e[0]), node_from_json(e[1]));
        }
        return Network::from_edges(nodes, edges);
    });
}

Network parse_network(const std::string& spec) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto number = [&](uint64_t fallback) -> uint64_t {
        if (arg.empty()) return fallback;
        try {
            size_t used = 0;
            long long v = std::stoll(arg, &used);
            if (used != arg.size() || v <= 0) throw std::invalid_argument(arg);
            return static_cast<uint64_t>(v);
        } catch (const std::logic_error&) {
            bad("bad numeric argument in network spec '" + spec + "'");
        }
    };
    if (spec == "z2-l1") return Network::square_lattice(2, Neighborhood::L1);
    if (spec == "z2-linf") return Network::square_lattice(2, Neighborhood::Linf);
    if (head == "zd-l1") return Network::square_lattice(static_cast<int>(number(2)), Neighborhood::L1);
    if (head == "zd-linf") return Network::square_lattice(static_cast<int>(number(2)), Neighborhood::Linf);
    if (spec == "hex") return Network::hex_pavement();
    if (head == "hierarchy") return Network::hierarchy(static_cast<uint32_t>(number(2)));
    if (head == "line") return line_graph(number(20));
    if (head == "example4") return example4_graph(static_cast<int64_t>(number(3)));
    if (head == "file") return graph_from_json(read_json_file(arg));
    bad("unknown network '" + spec + "'");
}

AggregationFunction parse_aggregation(const std::string& spec, size_t gamma) {
    if (spec == "proportion") return AggregationFunction::proportion(gamma);
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    if (colon == std::string::npos) bad("unknown aggregation '" + spec + "'");
    std::string arg = spec.substr(colon + 1);
    if (head == "threshold") return AggregationFunction::threshold(Rational::parse(arg), gamma);
    if (head == "table") {
        Json j = read_json_file(arg);
        return guarded("table", [&] {
            std::map<size_t, std::vector<double>> rows;
            for (const auto& [k, v] : j.at("rows").items()) rows[std::stoul(k)] = v.get<std::vector<double>>();
            return AggregationFunction::table(j.value("gamma", gamma), rows);
        });
    }
    bad("unknown aggregation '" + spec + "'");
}

std::vector<GalleryFixture> gallery_from_json(const Json& j) {
    return guarded("gallery", [&] {
        std::vector<GalleryFixture> out;
        for (const Json& f : j) {
            Network net = parse_network(f.at("net").get<std::string>());
            Window::Bounds b;
            for (const Json& r : f.at("bounds")) b.emplace_back(r.at(0).get<int64_t>(), r.at(1).get<int64_t>());
            std::string boundary = f.value("boundary", std::string("frozen-inactive"));
            BoundaryPolicy policy;
            if (boundary == "frozen-inactive") policy = BoundaryPolicy::frozen_inactive();
            else if (boundary == "frozen-active") policy = BoundaryPolicy::frozen_active();
            else if (boundary == "torus") policy = BoundaryPolicy::torus();
            else bad("gallery boundary must be frozen-inactive, frozen-active or torus");
            Window w = Window::box(net, b, policy);
            out.push_back({f.at("name").get<std::string>(), WindowConfig::from_rows(w, f.at("rows").get<std::vector<std::string>>()),
                           Rational::parse(f.at("q").get<std::string>()), f.value("expected_absorbing", true)});
        }
        return out;
    });
}

} // namespace netdiff
