#include "netdiff/contagion.hpp"

#include "netdiff/dynamics.hpp"
#include "netdiff/error.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace netdiff {

// ---------------------------------------------------------------- frontier

size_t frontier_eta(const Network& net, const NodeSet& X, const NodeId& x) {
    size_t eta = 0, deg = 0;
    for (const NodeId& y : net.neighbors(x)) {
        ++deg;
        if (X.contains(y)) ++eta;
    }
    bool in = X.contains(x);
    if ((in && eta == deg) || (!in && eta == 0)) throw Error(ErrorKind::NotFrontier, x.str() + " is not on the frontier of X");
    return eta;
}

size_t frontier_eta(const Window& w, const WindowConfig& X, const NodeId& x) {
    if (!w.contains(x)) throw Error(ErrorKind::OutOfRegion, x.str() + " lies outside the window");
    size_t eta = 0, deg = 0;
    for (const NodeId& y : w.base().neighbors(x)) {
        ++deg;
        if (X.active_at(y)) ++eta;
    }
    bool in = X.status_of(x) == Status::Active;
    if ((in && eta == deg) || (!in && eta == 0)) throw Error(ErrorKind::NotFrontier, x.str() + " is not on the frontier of X");
    return eta;
}

// ---------------------------------------------------------------- spreading

const char* spread_kind_name(SpreadVerdict::Kind k) {
    switch (k) {
    case SpreadVerdict::Kind::Spreads: return "Spreads";
    case SpreadVerdict::Kind::Stalls: return "Stalls";
    case SpreadVerdict::Kind::Cycles: return "Cycles";
    case SpreadVerdict::Kind::Undecided: return "Undecided";
    }
    return "?";
}

namespace {

size_t covered_radius(const Network& net, const NodeSet& X, size_t cap) {
    size_t r = 0;
    for (; r <= cap; ++r) {
        for (const NodeId& n : ball_nodes(net, net.origin(), r)) {
            if (!X.contains(n)) return r == 0 ? 0 : r - 1;
        }
    }
    return cap;
}

} // namespace

SpreadVerdict spread_test(const Network& net, const Rational& q, const NodeSet& X0, size_t target_radius, size_t budget) {
    if (X0.empty_set() || !X0.is_finite()) throw Error(ErrorKind::InvalidInput, "spread test needs a finite nonempty seed");
    SpreadVerdict v;
    v.budget = budget;
    NodeList ball = ball_nodes(net, net.origin(), target_radius);
    auto covers = [&](const NodeSet& X) {
        return std::all_of(ball.begin(), ball.end(), [&](const NodeId& n) { return X.contains(n); });
    };
    // Support far larger than the target ball without monotone coverage: growth is not a spread.
    const size_t support_cap = 16 * ball.size() + X0.size();
    std::unordered_map<size_t, std::vector<size_t>> seen;
    std::vector<NodeSet> states{X0};
    seen[X0.hash()].push_back(0);
    bool monotone = true;
    for (size_t t = 0;; ++t) {
        const NodeSet& X = states.back();
        if (monotone && covers(X)) {
            v.kind = SpreadVerdict::Kind::Spreads;
            v.steps = t;
            v.radius_reached = target_radius;
            return v;
        }
        if (t >= budget || (X.is_finite() && X.size() > support_cap)) {
            v.steps = t;
            break;
        }
        NodeSet next = boolean_step(net, q, X);
        if (next == X) {
            v.kind = SpreadVerdict::Kind::Stalls;
            v.steps = t;
            v.fixed_point = X;
            v.radius_reached = X.contains(net.origin()) ? covered_radius(net, X, target_radius) : 0;
            return v;
        }
        monotone = monotone && X.subset_of(next);
        for (size_t j : seen[next.hash()]) {
            if (states[j] == next) {
                v.kind = SpreadVerdict::Kind::Cycles;
                v.period = t + 1 - j;
                v.steps = t + 1;
                return v;
            }
        }
        seen[next.hash()].push_back(states.size());
        states.push_back(std::move(next));
    }
    v.kind = SpreadVerdict::Kind::Undecided;
    const NodeSet& last = states.back();
    v.radius_reached = last.contains(net.origin()) ? covered_radius(net, last, target_radius) : 0;
    return v;
}

std::string ThresholdEstimate::summary() const {
    std::ostringstream os;
    if (xi) os << "xi >= " << xi->str() << " (seed " << *witness_seed << ")";
    else os << "< min grid";
    if (morris_violation) os << "; MORRIS BOUND VIOLATED";
    return os.str();
}

std::vector<Rational> default_q_grid(const Network& net) {
    std::vector<size_t> degrees{net.gamma(), net.degree(net.origin())};
    std::vector<Rational> grid;
    for (size_t d : degrees) {
        for (size_t k = 1; k <= d; ++k) grid.emplace_back(static_cast<int64_t>(k), static_cast<int64_t>(d));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

std::vector<NodeSet> default_seed_family(const Network& net) {
    std::vector<NodeSet> seeds;
    auto planar = (net.kind() == Network::Kind::SquareLattice && net.dim() == 2) || net.kind() == Network::Kind::HexPavement;
    if (planar) {
        for (int64_t w = 1; w <= 4; ++w) {
            for (int64_t h = 1; h <= 4; ++h) {
                NodeList s;
                for (int64_t x = 0; x < w; ++x) {
                    for (int64_t y = 0; y < h; ++y) s.push_back(P(x, y));
                }
                seeds.push_back(NodeSet::finite(std::move(s)));
            }
        }
    } else if (net.kind() == Network::Kind::SquareLattice) {
        int d = net.dim();
        for (int64_t side = 1; side <= 3; ++side) {
            NodeList s;
            std::vector<int64_t> c(d, 0);
            while (true) {
                s.push_back(NodeId::lattice(c));
                int k = 0;
                while (k < d && ++c[k] == side) c[k++] = 0;
                if (k == d) break;
            }
            seeds.push_back(NodeSet::finite(std::move(s)));
        }
    } else {
        for (uint64_t r = 0; r <= 3; ++r) seeds.push_back(NodeSet::finite(ball_nodes(net, net.origin(), r)));
    }
    return seeds;
}

ThresholdEstimate contagion_threshold_estimate(const Network& net, const std::vector<NodeSet>& seeds, std::vector<Rational> q_grid,
                                               size_t target_radius, size_t budget, unsigned threads) {
    std::sort(q_grid.begin(), q_grid.end());
    q_grid.erase(std::unique(q_grid.begin(), q_grid.end()), q_grid.end());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    ThresholdEstimate est;
    // Spreading is monotone in q, so the scan stops at the first hit from above.
    for (auto it = q_grid.rbegin(); it != q_grid.rend(); ++it) {
        const Rational& q = *it;
        std::vector<char> spreads(seeds.size(), 0);
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (size_t i; (i = next.fetch_add(1)) < seeds.size();) {
                spreads[i] = spread_test(net, q, seeds[i], target_radius, budget).kind == SpreadVerdict::Kind::Spreads;
            }
        };
        std::vector<std::thread> pool;
        for (unsigned k = 1; k < threads && k < seeds.size(); ++k) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
        auto hit = std::find(spreads.begin(), spreads.end(), 1);
        est.scanned.emplace_back(q, hit != spreads.end());
        if (hit != spreads.end()) {
            est.xi = q;
            est.witness_seed = static_cast<size_t>(hit - spreads.begin());
            est.morris_violation = Rational(1, 2) < q;
            break;
        }
    }
    return est;
}

// ---------------------------------------------------------------- gallery

std::vector<GalleryRow> shape_gallery_check(const std::vector<GalleryFixture>& fixtures) {
    std::vector<GalleryRow> rows;
    for (const GalleryFixture& f : fixtures) {
        const Window& w = f.config.window();
        GalleryRow row;
        row.name = f.name;
        row.q = f.q;
        row.expected = f.expected_absorbing;
        AbsorbingReport rep = is_absorbing_state(w, f.config, f.q);
        row.observed = rep.absorbing;
        row.violations = rep.violations.size();
        row.agrees = row.observed == row.expected;
        for (const NodeId& x : w.nodes()) {
            if (f.config.status_of(x) != Status::Active) continue;
            try {
                size_t eta = frontier_eta(w, f.config, x);
                row.min_inner_eta = row.min_inner_eta ? std::min(*row.min_inner_eta, eta) : eta;
            } catch (const Error&) {
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<GalleryFixture> builtin_gallery() {
    Network l1 = Network::square_lattice(2, Neighborhood::L1);
    Network linf = Network::square_lattice(2, Neighborhood::Linf);
    std::vector<GalleryFixture> out;
    auto y_at = [](const NodeId& n) { return n.coords()[1]; };
    auto x_at = [](const NodeId& n) { return n.coords()[0]; };

    auto half_plane = [&](const NodeId& n) { return y_at(n) <= 0; };
    Window hp = Window::centered_box(l1, 4, BoundaryPolicy::extend(half_plane));
    out.push_back({"l1-half-plane", WindowConfig::from_function(hp, half_plane), Rational(3, 4), true});
    out.push_back({"l1-half-plane", WindowConfig::from_function(hp, half_plane), Rational(1, 2), true});

    WindowConfig antenna = WindowConfig::from_function(hp, half_plane);
    antenna.set(P(0, 1), Status::Active);
    out.push_back({"l1-half-plane-antenna", antenna, Rational(1, 2), false});

    // One 2x2 hole per 5x5 torus cell.
    Window cell = Window::box(l1, {{0, 4}, {0, 4}}, BoundaryPolicy::torus());
    auto squared_holes = [&](const NodeId& n) { return !(x_at(n) >= 1 && x_at(n) <= 2 && y_at(n) >= 1 && y_at(n) <= 2); };
    out.push_back({"l1-squared-holes", WindowConfig::from_function(cell, squared_holes), Rational(3, 4), true});

    auto thin_holes = [&](const NodeId& n) { return !(x_at(n) == 2 && y_at(n) >= 1 && y_at(n) <= 3); };
    out.push_back({"l1-width-one-hole", WindowConfig::from_function(cell, thin_holes), Rational(3, 4), false});

    auto quadrant = [&](const NodeId& n) { return x_at(n) <= 0 && y_at(n) <= 0; };
    Window qw = Window::centered_box(l1, 4, BoundaryPolicy::extend(quadrant));
    out.push_back({"l1-convex-corner", WindowConfig::from_function(qw, quadrant), Rational(3, 4), false});

    Window unit = Window::box(linf, {{-3, 4}, {-3, 4}}, BoundaryPolicy::frozen_inactive());
    auto unit_square = [&](const NodeId& n) { return x_at(n) >= 0 && x_at(n) <= 1 && y_at(n) >= 0 && y_at(n) <= 1; };
    out.push_back({"linf-unit-square", WindowConfig::from_function(unit, unit_square), Rational(3, 8), true});

    Window unit_c = unit.with_boundary(BoundaryPolicy::frozen_active());
    out.push_back({"linf-unit-square-complement", WindowConfig::from_function(unit_c, [&](const NodeId& n) { return !unit_square(n); }),
                   Rational(3, 4), true});

    // 4x4 hole; the rounded version keeps its corners active.
    Window hole = Window::box(linf, {{-4, 7}, {-4, 7}}, BoundaryPolicy::frozen_active());
    auto in_hole = [&](const NodeId& n) { return x_at(n) >= 0 && x_at(n) <= 3 && y_at(n) >= 0 && y_at(n) <= 3; };
    auto corner = [&](const NodeId& n) { return (x_at(n) == 0 || x_at(n) == 3) && (y_at(n) == 0 || y_at(n) == 3); };
    out.push_back({"linf-rounded-hole", WindowConfig::from_function(hole, [&](const NodeId& n) { return !in_hole(n) || corner(n); }),
                   Rational(5, 8), true});
    out.push_back({"linf-squared-hole", WindowConfig::from_function(hole, [&](const NodeId& n) { return !in_hole(n); }), Rational(5, 8),
                   false});
    return out;
}

} // namespace netdiff
