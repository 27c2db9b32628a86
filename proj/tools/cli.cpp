#include "cli.hpp"

#include "netdiff/aggregation.hpp"
#include "netdiff/configuration.hpp"
#include "netdiff/contagion.hpp"
#include "netdiff/dynamics.hpp"
#include "netdiff/error.hpp"
#include "netdiff/io.hpp"
#include "netdiff/network.hpp"
#include "netdiff/reachability.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

namespace netdiff::cli {

namespace {

enum class Level { Off, Error, Warn, Info, Debug };

Level log_level() {
    const char* v = std::getenv("DIFF_LOG");
    if (!v) return Level::Warn;
    std::string s(v);
    if (s == "off") return Level::Off;
    if (s == "error") return Level::Error;
    if (s == "info") return Level::Info;
    if (s == "debug") return Level::Debug;
    return Level::Warn;
}

struct Spec {
    std::string command;
    std::string net = "z2-l1";
    std::string init;
    std::string agg = "proportion";
    std::optional<uint64_t> seed;
    size_t steps = 10;
    std::string out;
    std::string format;
    std::optional<int64_t> radius;
    std::string window;
    std::string boundary = "frozen-inactive";
    std::string target;
    std::string trace;
    std::string gallery;
    std::string grid;
    size_t budget = 200;
    size_t samples = 10;
    size_t cap = 1000;
    bool certificates = false;
};

struct Ctx {
    Spec s;
    std::ostream& out;
    std::ostream& err;
    Level level;

    void log(Level l, const std::string& msg) const {
        static const char* names[] = {"off", "error", "warn", "info", "debug"};
        if (l <= level && l != Level::Off) err << "[" << names[static_cast<int>(l)] << "] " << msg << "\n";
    }
};

[[noreturn]] void spec_error(const std::string& msg) { throw Error(ErrorKind::InvalidInput, msg); }

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::UnknownNode:
    case ErrorKind::InvalidNetwork:
    case ErrorKind::InvalidInput:
    case ErrorKind::ArityExceeded:
    case ErrorKind::OutOfRegion: return 2;
    case ErrorKind::Internal: return 4;
    default: return 3;
    }
}

// Writes to --out when given, stdout otherwise.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) spec_error("cannot write " + path);
            os_ = &file_;
        }
    }
    std::ostream& os() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

bool is_planar_box_net(const Network& net) {
    return net.kind() == Network::Kind::SquareLattice || net.kind() == Network::Kind::HexPavement;
}

Window::Bounds parse_bounds(const std::string& text) {
    Window::Bounds b;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto colon = part.find(':');
        if (colon == std::string::npos) spec_error("window bounds look like x0:x1,y0:y1");
        try {
            b.emplace_back(std::stoll(part.substr(0, colon)), std::stoll(part.substr(colon + 1)));
        } catch (const std::logic_error&) {
            spec_error("bad window bounds '" + text + "'");
        }
    }
    return b;
}

BoundaryPolicy boundary_of(const Spec& s, const std::optional<ConfigDescriptor>& desc) {
    if (s.boundary == "frozen-inactive") return BoundaryPolicy::frozen_inactive();
    if (s.boundary == "frozen-active") return BoundaryPolicy::frozen_active();
    if (s.boundary == "torus") return BoundaryPolicy::torus();
    if (s.boundary == "extend") {
        if (!desc) spec_error("extend boundary needs a descriptor initial state");
        return extend_base(*desc);
    }
    spec_error("unknown boundary '" + s.boundary + "'");
}

Window window_of(const Network& net, const Spec& s, BoundaryPolicy b, int64_t default_radius) {
    if (net.is_finite()) return Window::whole(net);
    if (!s.window.empty()) return Window::box(net, parse_bounds(s.window), std::move(b));
    int64_t r = s.radius.value_or(default_radius);
    if (r < 0) spec_error("radius must be non-negative");
    if (is_planar_box_net(net)) return Window::centered_box(net, r, std::move(b));
    return Window::ball(net, net.origin(), static_cast<size_t>(r), std::move(b));
}

struct Init {
    std::optional<ConfigDescriptor> desc;
    std::optional<WindowConfig> rows;
};

Init load_init(const Network& net, const Network& frame, const Spec& s) {
    const std::string& name = s.init;
    if (name.empty()) spec_error("--init is required");
    Init init;
    if (name == "all-inactive") init.desc = ConfigDescriptor::all_inactive(frame);
    else if (name == "all-active") init.desc = ConfigDescriptor::all_active(frame);
    else if (name == "checkerboard" || name == "even-active") init.desc = ConfigDescriptor::even_active(frame);
    else if (name == "odd-active") init.desc = ConfigDescriptor::odd_active(frame);
    else if (name == "single") init.desc = ConfigDescriptor::with_active(frame, {net.origin()});
    else if (name == "pair") init.desc = ConfigDescriptor::with_active(frame, {net.origin(), net.neighbors(net.origin()).back()});
    else {
        Json j = read_json_file(name);
        if (j.is_object() && j.contains("rows")) {
            if (!j.contains("bounds")) spec_error("row files need \"bounds\"");
            Window::Bounds b;
            try {
                for (const Json& r : j.at("bounds")) b.emplace_back(r.at(0).get<int64_t>(), r.at(1).get<int64_t>());
                if (s.boundary == "extend") spec_error("extend boundary needs a descriptor initial state");
                init.rows = WindowConfig::from_rows(Window::box(net, b, boundary_of(s, std::nullopt)), j.at("rows").get<std::vector<std::string>>());
            } catch (const Json::exception& e) {
                spec_error(std::string("malformed row file: ") + e.what());
            }
        } else {
            init.desc = descriptor_from_json(j, frame);
        }
    }
    return init;
}

// ---------------------------------------------------------------- trace records

Json bounds_json(const Window& w) {
    Json b = Json::array();
    for (const auto& [lo, hi] : w.bounds()) b.push_back({lo, hi});
    return b;
}

Json window_record(size_t t, const WindowConfig& c, const std::string& event, size_t cap) {
    NodeList active = c.active();
    Json j;
    j["step"] = t;
    j["support_size"] = active.size();
    j["active"] = nodes_to_json(active, cap);
    j["event"] = event;
    j["truncated"] = active.size() > cap;
    if (c.window().is_box()) j["window"] = bounds_json(c.window());
    else j["window_size"] = c.window().size();
    return j;
}

Json descriptor_record(size_t t, const ConfigDescriptor& c, const std::string& event, size_t cap) {
    NodeList act, inact;
    for (const auto& [n, st] : c.exceptions()) (st == Status::Active ? act : inact).push_back(n);
    Json j;
    j["step"] = t;
    j["support_size"] = c.exceptions().size();
    j["active"] = nodes_to_json(act, cap);
    j["event"] = event;
    j["base"] = c.base().name();
    j["inactive"] = nodes_to_json(inact, cap);
    j["truncated"] = act.size() > cap || inact.size() > cap;
    return j;
}

std::optional<std::string> descriptor_sink(const ConfigDescriptor& c) {
    if (!c.exceptions().empty()) return std::nullopt;
    Base b = c.base();
    if (b == Base::all_inactive()) return "absorbed:empty";
    if (b == Base::all_active()) return "absorbed:full";
    if (b == Base::even_active() || b == Base::odd_active()) return "absorbed:two-cycle";
    return std::nullopt;
}

std::optional<std::string> window_sink(const WindowConfig& c, const std::optional<Bipartition>& bip) {
    size_t n = c.active_count();
    if (n == 0) return "absorbed:empty";
    if (n == c.window().size()) return "absorbed:full";
    if (bip) {
        bool even_pattern = true, odd_pattern = true;
        for (size_t i = 0; i < c.window().size(); ++i) {
            bool even = bip->of(c.window().nodes()[i]) == Parity::Even;
            bool act = c.at(i) == Status::Active;
            even_pattern = even_pattern && act == even;
            odd_pattern = odd_pattern && act != even;
        }
        if (even_pattern || odd_pattern) return "absorbed:two-cycle";
    }
    return std::nullopt;
}

// Runs `steps` records; deterministic runs flag the first repetition, stochastic runs the first sink.
template <class State, class Step, class Record, class SinkFn, class Hash>
void run_trace(const State& x0, size_t steps, bool deterministic, Step step, Record record, SinkFn sink, Hash hash,
               const std::function<void(const Json&)>& emit) {
    std::unordered_map<size_t, std::vector<size_t>> seen;
    std::vector<State> states;
    bool detected = false;
    State x = x0;
    for (size_t t = 0; t < steps; ++t) {
        std::string event = t == 0 ? "init" : "step";
        if (t > 0 && !detected) {
            if (deterministic) {
                for (size_t j : seen[hash(x)]) {
                    if (states[j] == x) {
                        event = j + 1 == t ? "fixed-point" : "cycle:period=" + std::to_string(t - j);
                        detected = true;
                        break;
                    }
                }
            } else if (auto s = sink(x)) {
                event = *s;
                detected = true;
            }
        }
        if (t + 1 == steps && !detected && t > 0) event = "budget";
        emit(record(t, x, event));
        if (deterministic && !detected) {
            seen[hash(x)].push_back(states.size());
            states.push_back(x);
        }
        if (t + 1 < steps) x = step(x);
    }
}

// ---------------------------------------------------------------- rendering

void render_records(const std::vector<Json>& recs, const std::string& format, const std::string& out_path, std::ostream& out) {
    if (format != "ascii" && format != "pgm") spec_error("render format must be ascii or pgm");
    if (format == "pgm" && out_path.empty()) spec_error("pgm frames need --out DIR");
    if (format == "pgm") std::filesystem::create_directories(out_path);
    Sink ascii_sink(format == "ascii" ? out_path : "", out);
    for (const Json& r : recs) {
        if (!r.contains("window")) spec_error("trace records carry no window bounds; render needs a 2-D window run");
        if (r.value("truncated", false)) spec_error("trace record " + r.at("step").dump() + " is truncated");
        const Json& b = r.at("window");
        if (b.size() != 2) spec_error("render needs 2-D windows");
        int64_t x0 = b[0][0], x1 = b[0][1], y0 = b[1][0], y1 = b[1][1];
        size_t width = static_cast<size_t>(x1 - x0 + 1), height = static_cast<size_t>(y1 - y0 + 1);
        std::vector<std::string> grid(height, std::string(width, '.'));
        for (const Json& n : r.at("active")) {
            int64_t x = n.at(0), y = n.at(1);
            grid[static_cast<size_t>(y1 - y)][static_cast<size_t>(x - x0)] = '#';
        }
        size_t t = r.at("step");
        if (format == "ascii") {
            std::ostream& os = ascii_sink.os();
            os << "step " << t << "\n";
            for (const std::string& row : grid) os << row << "\n";
            os << "\n";
        } else {
            char name[32];
            std::snprintf(name, sizeof name, "frame_%05zu.pgm", t);
            std::ofstream f(std::filesystem::path(out_path) / name, std::ios::binary);
            if (!f) spec_error("cannot write frame " + std::string(name));
            f << "P5\n" << width << " " << height << "\n255\n";
            for (const std::string& row : grid) {
                for (char ch : row) f.put(ch == '#' ? static_cast<char>(0) : static_cast<char>(255));
            }
        }
    }
}

// ---------------------------------------------------------------- commands

int cmd_simulate(Ctx& c) {
    const Spec& s = c.s;
    Network net = parse_network(s.net);
    AggregationFunction A = parse_aggregation(s.agg, net.gamma());
    bool deterministic = A.type() == AggregationFunction::Type::Threshold;
    if (!deterministic && !s.seed) spec_error("stochastic mode needs --seed");
    Init init = load_init(net, net, s);
    bool frames = s.format == "ascii" || s.format == "pgm";
    if (!s.format.empty() && !frames && s.format != "jsonl") spec_error("simulate writes jsonl, ascii or pgm");

    std::vector<Json> recs;
    std::optional<Sink> sink;
    if (!frames) sink.emplace(s.out, c.out);
    auto emit = [&](const Json& j) {
        if (frames) recs.push_back(j);
        else sink->os() << j.dump() << "\n";
    };
    RngStream rng(s.seed.value_or(0));
    bool window_mode = init.rows || s.radius || !s.window.empty() || net.is_finite();
    c.log(Level::Info, std::string("simulate on ") + net.describe() + (window_mode ? " (window)" : " (descriptor)") +
                           (deterministic ? ", deterministic" : ", stochastic"));

    if (window_mode) {
        std::optional<WindowConfig> x0 = init.rows;
        if (!x0) {
            Window w = window_of(net, s, boundary_of(s, init.desc), 10);
            const ConfigDescriptor& d = *init.desc;
            x0 = WindowConfig::from_function(w, [&](const NodeId& n) { return d.status_of(n) == Status::Active; });
        }
        const Window& w = x0->window();
        std::optional<Bipartition> bip;
        if (auto b = bipartition(w); std::holds_alternative<Bipartition>(b)) bip = std::get<Bipartition>(b);
        auto step = [&](const WindowConfig& x) { return deterministic ? boolean_step(w, A.q(), x) : sample_step_window(w, A, x, rng); };
        auto record = [&](size_t t, const WindowConfig& x, const std::string& e) { return window_record(t, x, e, s.cap); };
        run_trace(*x0, s.steps, deterministic, step, record, [&](const WindowConfig& x) { return window_sink(x, bip); },
                  [](const WindowConfig& x) { return x.hash(); }, emit);
    } else {
        if (!init.desc) spec_error("descriptor runs need a descriptor initial state");
        auto step = [&](const ConfigDescriptor& x) { return deterministic ? boolean_step(net, A.q(), x) : sample_step(net, A, x, rng); };
        auto record = [&](size_t t, const ConfigDescriptor& x, const std::string& e) { return descriptor_record(t, x, e, s.cap); };
        run_trace(*init.desc, s.steps, deterministic, step, record, descriptor_sink, [](const ConfigDescriptor& x) { return x.hash(); },
                  emit);
    }
    if (frames) render_records(recs, s.format, s.out, c.out);
    return 0;
}

int cmd_classify(Ctx& c) {
    const Spec& s = c.s;
    Network net = parse_network(s.net);
    bool bipartite = net.is_bipartite();
    // Parity bases on a non-bipartite net are read on its canonical bipartite subnetwork.
    Network frame = bipartite ? net : bipartite_subnetwork(net, net.origin());
    Init init = load_init(net, frame, s);
    if (!init.desc) spec_error("classify needs a descriptor initial state");
    Json j;
    if (bipartite) {
        j = block_to_json(block_classify(net, *init.desc));
    } else {
        j = plain_block_to_json(block_classify_plain(net, *init.desc));
        j["note"] = "network is not bipartite; tuple counts inactive and active nodes";
    }
    Sink out(s.out, c.out);
    out.os() << j.dump() << "\n";
    return 0;
}

std::vector<Cylinder> cylinders_from_file(const std::string& path) {
    Json j = read_json_file(path);
    std::vector<Cylinder> out;
    if (j.is_array()) {
        for (const Json& e : j) out.push_back(cylinder_from_json(e));
    } else {
        out.push_back(cylinder_from_json(j));
    }
    return out;
}

int cmd_analyze(Ctx& c) {
    const Spec& s = c.s;
    Network net = parse_network(s.net);
    Window w = window_of(net, s, BoundaryPolicy::frozen_inactive(), 5);
    Json j;
    j["network"] = net.describe();
    j["window_size"] = w.size();
    auto bp = bipartition(w);
    j["bipartite"] = std::holds_alternative<Bipartition>(bp);
    if (auto* odd = std::get_if<OddCycle>(&bp)) j["odd_cycle"] = nodes_to_json(odd->cycle);

    std::vector<Cylinder> samples;
    if (!s.target.empty()) {
        samples = cylinders_from_file(s.target);
    } else {
        // Leaves sharing their only neighbor cannot be stored with opposite statuses.
        std::map<NodeId, NodeList> leaves_at;
        for (const NodeId& n : w.nodes()) {
            NodeList nb = w.neighbors(n);
            if (nb.size() == 1) leaves_at[nb.front()].push_back(n);
        }
        for (const auto& [hub, leaves] : leaves_at) {
            if (leaves.size() >= 2) samples.emplace_back(NodeList{leaves[0]}, NodeList{leaves[1]});
        }
        RngStream rng(s.seed.value_or(0));
        auto* bip = std::get_if<Bipartition>(&bp);
        for (size_t k = 0; k < s.samples; ++k) {
            std::optional<Parity> p;
            if (bip) p = (rng.next() & 1) ? Parity::Odd : Parity::Even;
            NodeList X, Y;
            size_t n = 1 + rng.next() % 6;
            for (size_t tries = 0; X.size() + Y.size() < n && tries < 100; ++tries) {
                const NodeId& v = w.nodes()[rng.next() % w.size()];
                if (p && bip->of(v) != *p) continue;
                if (std::find(X.begin(), X.end(), v) != X.end() || std::find(Y.begin(), Y.end(), v) != Y.end()) continue;
                ((rng.next() & 1) ? X : Y).push_back(v);
            }
            samples.emplace_back(X, Y);
        }
    }
    RichnessReport rep = check_richness(w, samples);
    j["complex_stars"] = rep.star_count;
    j["richness"] = rep.consistent ? "consistent" : "violated";
    j["violated_clause"] = rep.violated_clause;
    j["samples"] = Json::array();
    for (const RichnessSample& rs : rep.samples) {
        Json e = cylinder_to_json(rs.cylinder);
        e["storable"] = rs.storable;
        if (rs.witness) {
            e["witness"] = {{"S", nodes_to_json(rs.witness->S)}, {"gamma_S", nodes_to_json(rs.witness->gamma_S)}, {"reason", rs.witness->reason}};
        }
        j["samples"].push_back(std::move(e));
    }
    Sink out(s.out, c.out);
    out.os() << j.dump(2) << "\n";
    return 0;
}

int cmd_trajectory(Ctx& c) {
    const Spec& s = c.s;
    Network net = parse_network(s.net);
    AggregationFunction A = parse_aggregation(s.agg, net.gamma());
    if (s.target.empty()) spec_error("trajectory needs --target");
    Init init = load_init(net, net, s);
    if (!init.desc) spec_error("trajectory needs a descriptor initial state");
    std::vector<Cylinder> targets = cylinders_from_file(s.target);
    if (targets.size() != 1) spec_error("trajectory target must be a single cylinder");
    Window w = window_of(net, s, BoundaryPolicy::frozen_inactive(), 8);
    BuildResult res = build_trajectory(w, *init.desc, targets.front());
    TrajectoryCheck check = validate_trajectory(w.base(), res.trajectory);
    std::optional<ProbabilityBound> bound;
    if (classify(A).kind == AggKind::Strict) bound = probability_lower_bound(w.base(), A, res.trajectory);
    else c.log(Level::Warn, "aggregation is not strict; no probability bound");

    Json j;
    j["length"] = res.trajectory.length();
    j["valid"] = check.valid;
    j["store_only"] = res.store_only;
    j["target_parity"] = parity_name(res.target_parity);
    if (res.witness_parity) j["witness_parity"] = parity_name(*res.witness_parity);
    if (res.star) {
        const ComplexStar& st = *res.star;
        j["star"] = {{"center", node_to_json(st.s_star)},
                     {"branches", nodes_to_json({st.s[0], st.s[1], st.s[2]})},
                     {"second", Json::array({node_to_json(st.sp[0]), node_to_json(st.sp[1]), node_to_json(st.sp[2])})}};
    }
    const Json tj = trajectory_to_json(res.trajectory, bound, s.certificates ? &check : nullptr);
    for (const auto& el : tj.items()) j[el.key()] = el.value();
    Sink out(s.out, c.out);
    out.os() << j.dump() << "\n";
    return check.valid ? 0 : 4;
}

std::vector<Rational> parse_grid(const std::string& text) {
    std::vector<Rational> g;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) g.push_back(Rational::parse(part));
    if (g.empty()) spec_error("empty q grid");
    return g;
}

int cmd_contagion(Ctx& c) {
    const Spec& s = c.s;
    Sink out(s.out, c.out);
    if (!s.gallery.empty()) {
        std::vector<GalleryFixture> fixtures = s.gallery == "builtin" ? builtin_gallery() : gallery_from_json(read_json_file(s.gallery));
        Json rows = Json::array();
        bool all_agree = true;
        for (const GalleryRow& r : shape_gallery_check(fixtures)) {
            Json e;
            e["shape"] = r.name;
            e["q"] = r.q.str();
            e["expected_absorbing"] = r.expected;
            e["absorbing"] = r.observed;
            e["agrees"] = r.agrees;
            e["min_inner_eta"] = r.min_inner_eta ? Json(*r.min_inner_eta) : Json(nullptr);
            e["violations"] = r.violations;
            rows.push_back(std::move(e));
            all_agree = all_agree && r.agrees;
        }
        out.os() << rows.dump(2) << "\n";
        return all_agree ? 0 : 4;
    }
    Network net = parse_network(s.net);
    std::vector<Rational> grid = s.grid.empty() ? default_q_grid(net) : parse_grid(s.grid);
    size_t radius = static_cast<size_t>(s.radius.value_or(15));
    ThresholdEstimate est = contagion_threshold_estimate(net, default_seed_family(net), grid, radius, s.budget);
    Json j;
    j["network"] = net.describe();
    j["radius"] = radius;
    j["xi"] = est.xi ? Json(est.xi->str()) : Json(nullptr);
    j["witness_seed"] = est.witness_seed ? Json(*est.witness_seed) : Json(nullptr);
    j["scanned"] = Json::array();
    for (const auto& [q, spreads] : est.scanned) j["scanned"].push_back({{"q", q.str()}, {"spreads", spreads}});
    j["morris_violation"] = est.morris_violation;
    j["summary"] = est.summary();
    out.os() << j.dump(2) << "\n";
    if (est.morris_violation) {
        c.log(Level::Error, "estimated threshold exceeds 1/2");
        return 4;
    }
    return 0;
}

int cmd_render(Ctx& c) {
    const Spec& s = c.s;
    if (s.trace.empty()) spec_error("render needs --trace");
    std::ifstream in(s.trace);
    if (!in) spec_error("cannot open " + s.trace);
    std::vector<Json> recs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            recs.push_back(Json::parse(line));
        } catch (const Json::exception& e) {
            spec_error("bad trace line: " + std::string(e.what()));
        }
    }
    render_records(recs, s.format.empty() ? "ascii" : s.format, s.out, c.out);
    return 0;
}

// Fills fields absent from the command line from a JSON spec document.
void merge_spec(Spec& s, const Json& j, const std::map<std::string, CLI::Option*>& given) {
    auto unset = [&](const std::string& k) { return j.contains(k) && given.at(k)->count() == 0; };
    auto str = [&](const std::string& k, std::string& dst) {
        if (unset(k)) dst = j.at(k).is_string() ? j.at(k).get<std::string>() : j.at(k).dump();
    };
    try {
        str("net", s.net);
        str("init", s.init);
        str("agg", s.agg);
        str("out", s.out);
        str("format", s.format);
        str("window", s.window);
        str("boundary", s.boundary);
        str("target", s.target);
        str("trace", s.trace);
        str("gallery", s.gallery);
        str("grid", s.grid);
        if (unset("seed")) s.seed = j.at("seed").get<uint64_t>();
        if (unset("steps")) s.steps = j.at("steps").get<size_t>();
        if (unset("radius")) s.radius = j.at("radius").get<int64_t>();
        if (unset("budget")) s.budget = j.at("budget").get<size_t>();
        if (unset("samples")) s.samples = j.at("samples").get<size_t>();
        if (unset("cap")) s.cap = j.at("cap").get<size_t>();
    } catch (const Json::exception& e) {
        spec_error(std::string("malformed spec: ") + e.what());
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"netdiff: diffusion dynamics on countable networks"};
    app.require_subcommand(1);
    app.fallthrough();
    Spec s;
    std::string spec_path;
    uint64_t seed = 0;
    int64_t radius = 0;
    std::map<std::string, CLI::Option*> opt;
    opt["net"] = app.add_option("--net", s.net, "z2-l1, z2-linf, zd-l1:D, zd-linf:D, hex, hierarchy:M, line:N, example4[:R], file:PATH");
    opt["init"] = app.add_option("--init", s.init, "preset (checkerboard, single, pair, all-active, ...) or JSON file");
    opt["agg"] = app.add_option("--agg", s.agg, "proportion, threshold:Q or table:PATH");
    opt["seed"] = app.add_option("--seed", seed, "random seed (required for stochastic runs)");
    opt["steps"] = app.add_option("--steps", s.steps, "number of trace records");
    opt["out"] = app.add_option("--out", s.out, "output file (directory for pgm frames)");
    opt["format"] = app.add_option("--format", s.format, "json, jsonl, pgm or ascii");
    opt["radius"] = app.add_option("--radius", radius, "window radius");
    opt["window"] = app.add_option("--window", s.window, "box bounds x0:x1,y0:y1");
    opt["boundary"] = app.add_option("--boundary", s.boundary, "frozen-inactive, frozen-active, torus or extend");
    opt["target"] = app.add_option("--target", s.target, "cylinder JSON file");
    opt["trace"] = app.add_option("--trace", s.trace, "JSONL trace to render");
    opt["gallery"] = app.add_option("--gallery", s.gallery, "builtin or a fixture JSON file");
    opt["grid"] = app.add_option("--grid", s.grid, "comma-separated q values");
    opt["budget"] = app.add_option("--budget", s.budget, "step budget for spread tests");
    opt["samples"] = app.add_option("--samples", s.samples, "random storing samples for analyze");
    opt["cap"] = app.add_option("--cap", s.cap, "maximum listed nodes per trace record");
    app.add_flag("--certificates", s.certificates, "embed per-step witnesses in trajectory output");
    app.add_option("--spec", spec_path, "JSON experiment spec; flags override its fields");
    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "run the dynamics and write a JSONL trace"},
        {"classify", "block tuple and label of a descriptor"},
        {"analyze", "complex stars and storing functions of a network"},
        {"trajectory", "synthesize a path from --init to the --target cylinder"},
        {"contagion", "threshold estimate, Morris bound and shape gallery"},
        {"render", "draw a trace as ascii or pgm frames"}};
    for (const auto& [name, desc] : commands) app.add_subcommand(name, desc);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: InvalidInput: " << e.what() << "\n";
        return 2;
    }
    Ctx ctx{s, out, err, log_level()};
    try {
        if (opt["seed"]->count()) ctx.s.seed = seed;
        if (opt["radius"]->count()) ctx.s.radius = radius;
        if (!spec_path.empty()) merge_spec(ctx.s, read_json_file(spec_path), opt);
        ctx.s.command = app.get_subcommands().front()->get_name();
        const std::string& cmd = ctx.s.command;
        if (cmd == "simulate") return cmd_simulate(ctx);
        if (cmd == "classify") return cmd_classify(ctx);
        if (cmd == "analyze") return cmd_analyze(ctx);
        if (cmd == "trajectory") return cmd_trajectory(ctx);
        if (cmd == "contagion") return cmd_contagion(ctx);
        if (cmd == "render") return cmd_render(ctx);
        return 2;
    } catch (const Error& e) {
        err << "error: " << kind_name(e.kind()) << ": " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: Internal: " << e.what() << "\n";
        return 4;
    }
}

} // namespace netdiff::cli
