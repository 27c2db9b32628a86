#include "netdiff/dynamics.hpp"
#include "netdiff/error.hpp"
#include "netdiff/reachability.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace netdiff;

namespace {

const Network& l1() {
    static const Network net = Network::square_lattice(2, Neighborhood::L1);
    return net;
}

NodeId I(int64_t i) { return NodeId::lattice({i}); }

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Internal;
}

Network to_network(const oracle::Graph& g) {
    Adjacency adj;
    for (const auto& [v, nb] : g) adj[v] = NodeList(nb.begin(), nb.end());
    return Network::explicit_graph(adj);
}

NodeList same_parity_sample(std::mt19937& rng, const NodeList& pool, Parity p, const std::function<Parity(const NodeId&)>& par, size_t k) {
    NodeList out;
    for (size_t guard = 0; out.size() < k && guard < 10000; ++guard) {
        const NodeId& n = pool[rng() % pool.size()];
        if (par(n) == p && std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    }
    return out;
}

void check_storing_map(const Window& w, const NodeList& X, const NodeList& Y, const StoringMap& m) {
    NodeList all = set_union(X, Y);
    REQUIRE(m.theta.size() == all.size());
    for (const NodeId& n : all) {
        NodeList nb = w.neighbors(n);
        CHECK(std::binary_search(nb.begin(), nb.end(), m.theta.at(n)));
    }
    for (const NodeId& x : X)
        for (const NodeId& y : Y) CHECK_FALSE(m.theta.at(x) == m.theta.at(y));
}

bool in_family(const Cylinder& c, const ComplexStar& star) {
    bool act = false, inact = false;
    for (const NodeId& s : star.s) {
        act = act || std::binary_search(c.X.begin(), c.X.end(), s);
        inact = inact || std::binary_search(c.Y.begin(), c.Y.end(), s);
    }
    return act && inact;
}

// Fraction of exact process runs that follow every cylinder of `t`.
double follow_rate(const Network& net, const AggregationFunction& A, const ConfigDescriptor& start, const Trajectory& t, size_t trials, uint64_t seed) {
    RngStream root(seed);
    size_t ok = 0;
    for (size_t r = 0; r < trials; ++r) {
        RngStream rng = root.derive(r);
        ConfigDescriptor c = start;
        bool good = t.steps.front().holds(c);
        for (size_t i = 1; good && i < t.steps.size(); ++i) {
            c = sample_step(net, A, c, rng);
            good = t.steps[i].holds(c);
        }
        ok += good;
    }
    return static_cast<double>(ok) / static_cast<double>(trials);
}

} // namespace

TEST_SUITE("reachability") {

TEST_CASE("complex star examples") {
    Window w = Window::centered_box(l1(), 3);
    ComplexStar s{P(0, 0), {P(0, 1), P(1, 0), P(0, -1)}, {P(0, 2), P(2, 0), P(0, -2)}};
    CHECK(is_complex_star(w, s));
    auto stars = find_complex_stars(w);
    CHECK(std::any_of(stars.begin(), stars.end(), [](const ComplexStar& c) { return c.s_star == P(0, 0); }));
    for (const ComplexStar& c : stars) CHECK(is_complex_star(w, c));
    CHECK(find_complex_stars(w, 5).size() == 5);

    CHECK(find_complex_stars(Window::whole(line_graph(12))).empty());

    oracle::Graph antennas;
    for (uint64_t i = 0; i + 1 < 8; ++i) oracle::add_edge(antennas, i, i + 1);
    oracle::add_edge(antennas, 2, 20), oracle::add_edge(antennas, 4, 21), oracle::add_edge(antennas, 5, 22);
    Network ant = to_network(antennas);
    CHECK(find_complex_stars(Window::whole(ant)).empty());
    CHECK(is_caterpillar(ant).caterpillar);
}

TEST_CASE("caterpillar examples") {
    oracle::Graph g;
    for (uint64_t i = 0; i + 1 < 10; ++i) oracle::add_edge(g, i, i + 1);
    oracle::add_edge(g, 2, 10), oracle::add_edge(g, 5, 11), oracle::add_edge(g, 7, 12);
    CaterpillarDecomposition d = is_caterpillar(to_network(g));
    CHECK(d.caterpillar);
    CHECK(d.antennas.size() >= 3);

    Window box = Window::box(l1(), {{0, 4}, {0, 4}});
    CHECK_FALSE(is_caterpillar(box.as_network()).caterpillar);

    oracle::Graph spider;
    oracle::add_edge(spider, 0, 1), oracle::add_edge(spider, 1, 2), oracle::add_edge(spider, 0, 3), oracle::add_edge(spider, 3, 4), oracle::add_edge(spider, 0, 5), oracle::add_edge(spider, 5, 6);
    CHECK_FALSE(is_caterpillar(to_network(spider)).caterpillar);
    CHECK(kind_of([] { is_caterpillar(Network::square_lattice(2, Neighborhood::L1)); }) == ErrorKind::InvalidInput);
}

TEST_CASE("star-free graphs are exactly the caterpillars") {
    auto corpus = oracle::graph_corpus();
    REQUIRE(corpus.size() >= 50);
    size_t with_star = 0;
    for (const oracle::Graph& g : corpus) {
        REQUIRE(oracle::connected(g));
        Network net = to_network(g);
        bool star = oracle::has_complex_star(g);
        with_star += star;
        CHECK(find_complex_stars(Window::whole(net)).empty() == !star);
        CHECK(is_caterpillar(net).caterpillar == !star);
    }
    CHECK(with_star > 5);
    CHECK(with_star < corpus.size() - 5);
}

TEST_CASE("storing on regular lattices and hierarchies") {
    std::mt19937 rng(19);
    std::vector<Window> windows = {Window::centered_box(l1(), 6), Window::centered_box(Network::hex_pavement(), 6),
                                   Window::ball(Network::hierarchy(3), Network::hierarchy(3).origin(), 4)};
    for (const Window& w : windows) {
        Bipartition bip = std::get<Bipartition>(bipartition(w));
        NodeList inner;
        for (const NodeId& n : w.nodes())
            if (w.induced_degree(n) == w.base().degree(n)) inner.push_back(n);
        for (int trial = 0; trial < 40; ++trial) {
            Parity p = (rng() % 2) ? Parity::Odd : Parity::Even;
            NodeList pick = same_parity_sample(rng, inner, p, bip.parity, 1 + rng() % 20);
            NodeList X, Y;
            for (const NodeId& n : pick) (rng() % 2 ? X : Y).push_back(n);
            normalize(X);
            normalize(Y);
            StoringResult r = storing_function(w, X, Y);
            REQUIRE(std::holds_alternative<StoringMap>(r));
            check_storing_map(w, X, Y, std::get<StoringMap>(r));
        }
    }
}

TEST_CASE("storing edge cases") {
    Window ex4 = Window::whole(example4_graph(3));
    StoringResult r = storing_function(ex4, {NodeId::named("alpha")}, {NodeId::named("beta")});
    REQUIRE(std::holds_alternative<NoStoring>(r));
    const NoStoring& no = std::get<NoStoring>(r);
    CHECK(no.gamma_S.size() < no.S.size());
    CHECK(no.gamma_S == NodeList{P(0, 0)});

    Window w = Window::centered_box(l1(), 3);
    StoringResult e = storing_function(w, {}, {});
    REQUIRE(std::holds_alternative<StoringMap>(e));
    CHECK(std::get<StoringMap>(e).theta.empty());
    CHECK(kind_of([&] { storing_function(w, {P(0, 0)}, {P(1, 0)}); }) == ErrorKind::BlocksMixed);
}

TEST_CASE("richness reports") {
    std::mt19937 rng(4);
    Window w = Window::centered_box(l1(), 5);
    Bipartition bip = std::get<Bipartition>(bipartition(w));
    std::vector<Cylinder> samples;
    for (int k = 0; k < 10; ++k) {
        NodeList pick = same_parity_sample(rng, w.nodes(), k % 2 ? Parity::Odd : Parity::Even, bip.parity, 6);
        samples.emplace_back(NodeList(pick.begin(), pick.begin() + 3), NodeList(pick.begin() + 3, pick.end()));
    }
    RichnessReport rep = check_richness(w, samples);
    CHECK(rep.star_count > 20);
    CHECK(rep.consistent);
    for (const auto& s : rep.samples) CHECK(s.storable);

    RichnessReport line = check_richness(Window::whole(line_graph(20)), {});
    CHECK(line.star_count == 0);
    CHECK_FALSE(line.consistent);
    CHECK(line.violated_clause == "complex-stars");

    RichnessReport ex4 = check_richness(Window::whole(example4_graph(3)), {Cylinder({NodeId::named("alpha")}, {NodeId::named("beta")})});
    CHECK(ex4.star_count > 0);
    CHECK_FALSE(ex4.consistent);
    CHECK(ex4.violated_clause == "storing");
    CHECK_FALSE(ex4.samples.at(0).storable);
}

TEST_CASE("trajectory validation") {
    Trajectory ok{{Cylinder({P(0, 1)}, {}), Cylinder({P(1, 1)}, {})}};
    CHECK(validate_trajectory(l1(), ok).valid);
    Trajectory bad{{Cylinder({P(0, 1)}, {}), Cylinder({P(5, 1)}, {})}};
    TrajectoryCheck c = validate_trajectory(l1(), bad);
    CHECK_FALSE(c.valid);
    REQUIRE(c.failing_step.has_value());
    CHECK(*c.failing_step == 1);
    Trajectory inactive{{Cylinder({}, {P(0, 0)}), Cylinder({}, {P(1, 0), P(-1, 0)})}};
    CHECK(validate_trajectory(l1(), inactive).valid);
    Trajectory mixed{{Cylinder({P(0, 0)}, {}), Cylinder({}, {P(1, 0)})}};
    CHECK_FALSE(validate_trajectory(l1(), mixed).valid);
}

TEST_CASE("store synthesis") {
    Window w = Window::centered_box(l1(), 6);
    Trajectory t = synth_store(w, {P(0, 1)}, {P(2, 1)}, 2);
    CHECK(t.steps.size() == 3);
    CHECK(t.steps.front() == Cylinder({P(0, 1)}, {P(2, 1)}));
    CHECK(t.steps.back() == t.steps.front());
    CHECK(validate_trajectory(l1(), t).valid);
    CHECK(synth_store(w, {P(0, 1)}, {P(2, 1)}, 0).steps.size() == 1);
    CHECK(kind_of([&] { synth_store(w, {P(0, 1)}, {}, 3); }) == ErrorKind::InvalidInput);
    Window ex4 = Window::whole(example4_graph(3));
    CHECK(kind_of([&] { synth_store(ex4, {NodeId::named("alpha")}, {NodeId::named("beta")}, 2); }) == ErrorKind::NoStoring);
}

TEST_CASE("propagation synthesis") {
    Window w = Window::centered_box(l1(), 6);
    Trajectory t = synth_propagate(w, P(0, 1), P(0, 3), Status::Active);
    CHECK(t.length() == 2);
    CHECK(validate_trajectory(l1(), t).valid);
    CHECK(synth_propagate(w, P(0, 1), P(0, 1), Status::Active).length() == 0);
    Trajectory odd = synth_propagate(w, P(0, 1), P(2, 0), Status::Inactive);
    CHECK(odd.length() == 3);
    CHECK(odd.steps.back() == Cylinder({}, {P(2, 0)}));
    CHECK(validate_trajectory(l1(), odd).valid);
    CHECK(kind_of([&] { synth_propagate(w, P(0, 1), P(40, 0), Status::Active); }) == ErrorKind::UnknownNode);
}

TEST_CASE("star synthesis") {
    Window w = Window::centered_box(l1(), 4);
    ComplexStar star{P(0, 0), {P(0, 1), P(1, 0), P(0, -1)}, {P(0, 2), P(2, 0), P(0, -2)}};
    const auto A = Status::Active, N = Status::Inactive;
    StarPattern a{A, N, std::nullopt};
    StarPattern b{A, N, A};
    Trajectory t = synth_star(w, star, a, b);
    CHECK(t.length() == 2);
    CHECK(validate_trajectory(l1(), t).valid);
    CHECK(t.steps[1].X == NodeList{P(0, 0)});
    CHECK(t.steps[1].Y == NodeList{P(2, 0)});
    CHECK(synth_star(w, star, a, a).length() == 0);
    Trajectory swap = synth_star(w, star, a, StarPattern{N, A, std::nullopt});
    CHECK(swap.length() % 2 == 0);
    CHECK(validate_trajectory(l1(), swap).valid);
    const std::vector<StarPattern> family = {{A, N, std::nullopt}, {N, A, std::nullopt}, {A, std::nullopt, N}, {N, std::nullopt, A},
                                             {std::nullopt, A, N}, {std::nullopt, N, A}};
    for (const auto& from : family)
        for (const auto& to : family) {
            Trajectory s = synth_star(w, star, from, to);
            CHECK(s.length() % 2 == 0);
            CHECK(validate_trajectory(l1(), s).valid);
        }
    CHECK(kind_of([&] { synth_star(w, star, StarPattern{A, A, std::nullopt}, b); }) == ErrorKind::NotInFamily);
}

TEST_CASE("centrage synthesis") {
    Window w = Window::centered_box(l1(), 12);
    auto stars = find_complex_stars(w);
    auto it = std::find_if(stars.begin(), stars.end(), [](const ComplexStar& s) { return s.s_star == P(10, 0); });
    REQUIRE(it != stars.end());
    ConfigDescriptor c(l1(), Base::all_inactive(), {{P(0, 1), Status::Active}, {P(4, 1), Status::Inactive}});
    Trajectory t = synth_centrage(w, c, *it);
    CHECK(t.length() % 2 == 0);
    CHECK(validate_trajectory(l1(), t).valid);
    CHECK(t.steps.front().holds(c));
    CHECK(in_family(t.steps.back(), *it));

    ConfigDescriptor near(l1(), Base::all_inactive(), {{P(9, 2), Status::Active}});
    auto at = std::find_if(stars.begin(), stars.end(), [](const ComplexStar& s) { return s.s_star == P(10, 1); });
    REQUIRE(at != stars.end());
    CHECK(kind_of([&] { synth_centrage(w, near, *at); }) == ErrorKind::StarOverlap);
}

TEST_CASE("build trajectory examples") {
    Window w = Window::centered_box(l1(), 8);
    auto mixed = ConfigDescriptor::with_active(l1(), {P(1, 0), P(3, 2)});
    Cylinder target({P(0, 1)}, {P(2, 1)});
    BuildResult r = build_trajectory(w, mixed, target);
    CHECK(validate_trajectory(l1(), r.trajectory).valid);
    CHECK(r.trajectory.steps.back() == target);
    CHECK(r.trajectory.steps.front().holds(mixed));
    CHECK(r.trajectory.length() % 2 == 0);
    CHECK(r.target_parity == Parity::Odd);

    auto holds = ConfigDescriptor::with_active(l1(), {P(0, 1)});
    BuildResult s = build_trajectory(w, holds, target);
    CHECK(s.store_only);
    CHECK(validate_trajectory(l1(), s.trajectory).valid);
    CHECK(s.trajectory.steps.back() == target);

    Network line = line_graph(20);
    CHECK(kind_of([&] { build_trajectory(Window::whole(line), ConfigDescriptor::with_active(line, {I(3)}), Cylinder({I(5)}, {I(7)})); }) ==
          ErrorKind::RichnessViolated);
    Network ex4 = example4_graph(3);
    CHECK(kind_of([&] {
              build_trajectory(Window::whole(ex4), ConfigDescriptor::with_active(ex4, {P(1, 0)}), Cylinder({NodeId::named("alpha")}, {NodeId::named("beta")}));
          }) == ErrorKind::RichnessViolated);
    CHECK(kind_of([&] { build_trajectory(w, mixed, Cylinder({P(0, 1)}, {P(0, 0)})); }) == ErrorKind::NotSingleParity);
    CHECK(kind_of([&] { build_trajectory(w, mixed, Cylinder({P(0, 31)}, {})); }) == ErrorKind::OutOfRegion);
}

TEST_CASE("fuzzed synthesis is valid and obeys the parity law") {
    std::mt19937 rng(101);
    Window w = Window::centered_box(l1(), 8);
    NodeList near;
    for (const NodeId& n : w.nodes())
        if (std::abs(n.coords()[0]) + std::abs(n.coords()[1]) <= 4) near.push_back(n);
    auto par = [](const NodeId& n) { return ((n.coords()[0] + n.coords()[1]) % 2 == 0) ? Parity::Even : Parity::Odd; };
    size_t built = 0;
    for (int trial = 0; trial < 120; ++trial) {
        Parity cp = rng() % 2 ? Parity::Odd : Parity::Even;
        NodeList active = same_parity_sample(rng, near, cp, par, 1 + rng() % 3);
        auto config = ConfigDescriptor::with_active(l1(), active);
        Parity tp = rng() % 2 ? Parity::Odd : Parity::Even;
        NodeList pick = same_parity_sample(rng, near, tp, par, 1 + rng() % 4);
        size_t split = rng() % (pick.size() + 1);
        Cylinder target(NodeList(pick.begin(), pick.begin() + split), NodeList(pick.begin() + split, pick.end()));
        BuildResult r = build_trajectory(w, config, target);
        TrajectoryCheck chk = validate_trajectory(l1(), r.trajectory);
        CHECK_MESSAGE(chk.valid, chk.reason);
        CHECK(r.trajectory.steps.front().holds(config));
        CHECK(r.trajectory.steps.back() == target);
        if (!r.store_only) {
            REQUIRE(r.witness_parity.has_value());
            CHECK((r.trajectory.length() % 2 == 1) == (tp != *r.witness_parity));
        }
        ++built;
    }
    CHECK(built >= 100);
}

TEST_CASE("probability lower bounds") {
    auto A = AggregationFunction::proportion(4);
    Trajectory one{{Cylinder({P(0, 1)}, {}), Cylinder({P(1, 1)}, {})}};
    CHECK(probability_lower_bound(l1(), A, one).value() == doctest::Approx(0.25));
    Trajectory zero{{Cylinder({P(0, 1)}, {})}};
    CHECK(probability_lower_bound(l1(), A, zero).value() == 1.0);
    Window w = Window::centered_box(l1(), 6);
    Trajectory store = synth_store(w, {P(0, 1)}, {P(2, 1)}, 2);
    ProbabilityBound b = probability_lower_bound(l1(), A, store);
    CHECK(b.value() > 0.0);
    CHECK(b.value() <= 1.0);
    Trajectory bad{{Cylinder({P(0, 1)}, {}), Cylinder({P(5, 1)}, {})}};
    CHECK(kind_of([&] { probability_lower_bound(l1(), A, bad); }) == ErrorKind::InvalidTrajectory);
    CHECK(kind_of([&] { probability_lower_bound(l1(), AggregationFunction::threshold(Rational(1, 2), 4), one); }) == ErrorKind::NotStrict);
}

TEST_CASE("the exact process follows a trajectory at least as often as the bound") {
    auto A = AggregationFunction::proportion(4);
    Window w = Window::centered_box(l1(), 6);
    const size_t n = 10000;
    auto check = [&](const Trajectory& t, const ConfigDescriptor& start, uint64_t seed) {
        double p = probability_lower_bound(l1(), A, t).value();
        double rate = follow_rate(l1(), A, start, t, n, seed);
        CHECK(p > 0.0);
        CHECK(rate >= p - 2.33 * std::sqrt(p * (1 - p) / n));
    };
    check(synth_propagate(w, P(0, 1), P(2, 0), Status::Active), ConfigDescriptor::with_active(l1(), {P(0, 1)}), 1);
    check(synth_store(w, {P(0, 1)}, {P(2, 1)}, 2), ConfigDescriptor::with_active(l1(), {P(0, 1)}), 2);
    Trajectory two{{Cylinder({P(0, 0)}, {P(-2, 0)}), Cylinder({P(1, 0), P(0, 1)}, {P(-1, 0)})}};
    check(two, ConfigDescriptor::with_active(l1(), {P(0, 0)}), 3);
}

} // TEST_SUITE
