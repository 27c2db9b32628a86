#include "netdiff/dynamics.hpp"
#include "netdiff/error.hpp"
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

NodeSet fs(NodeList v) { return NodeSet::finite(std::move(v)); }

bool even_cell(const NodeId& n) { return (n.coords()[0] + n.coords()[1]) % 2 == 0; }

NodeList random_cells(std::mt19937& rng, int count, int span) {
    NodeList out;
    for (int i = 0; i < count; ++i) out.push_back(P(static_cast<int64_t>(rng() % span) - span / 2, static_cast<int64_t>(rng() % span) - span / 2));
    return out;
}

} // namespace

TEST_SUITE("dynamics") {

TEST_CASE("partial law examples") {
    NodeId a = NodeId::named("a"), b = NodeId::named("b"), c = NodeId::named("c");
    Network path = Network::from_edges({a, b, c}, {{a, b}, {b, c}});
    PartialLaw law = partial_law(path, AggregationFunction::proportion(2), ConfigDescriptor::with_active(path, {b}), {a, b, c});
    CHECK(law.at({Status::Active, Status::Inactive, Status::Active}) == 1.0);
    double total = 0;
    for (double p : law.probs) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    PartialLaw zero = partial_law(l1(), AggregationFunction::proportion(4), ConfigDescriptor::all_inactive(l1()), {P(0, 0), P(1, 0), P(5, 5)});
    CHECK(zero.probs[0] == 1.0);

    PartialLaw half = partial_law(l1(), AggregationFunction::proportion(4), ConfigDescriptor::with_active(l1(), {P(0, 1), P(1, 0)}), {P(0, 0)});
    CHECK(half.probs[0] == 0.5);
    CHECK(half.probs[1] == 0.5);

    NodeList big;
    for (int i = 0; i < 21; ++i) big.push_back(P(i, 0));
    CHECK_THROWS_AS(partial_law(l1(), AggregationFunction::proportion(4), ConfigDescriptor::all_inactive(l1()), big), Error);
}

TEST_CASE("partial law depends only on the closure of Y") {
    std::mt19937 rng(41);
    auto A = AggregationFunction::proportion(4);
    NodeList Y = {P(0, 0), P(1, 1)};
    for (int trial = 0; trial < 20; ++trial) {
        NodeList active = random_cells(rng, 10, 7);
        auto c1 = ConfigDescriptor::with_active(l1(), active);
        NodeList far = active;
        far.push_back(P(20, 20));
        far.push_back(P(-30, 4));
        auto c2 = ConfigDescriptor::with_active(l1(), far);
        CHECK(partial_law(l1(), A, c1, Y).probs == partial_law(l1(), A, c2, Y).probs);
    }
}

TEST_CASE("homogeneous bases step deterministically") {
    RngStream rng(1);
    auto A = AggregationFunction::proportion(4);
    CHECK(sample_step(l1(), A, ConfigDescriptor::all_inactive(l1()), rng) == ConfigDescriptor::all_inactive(l1()));
    CHECK(sample_step(l1(), A, ConfigDescriptor::even_active(l1()), rng) == ConfigDescriptor::odd_active(l1()));
    CHECK(sample_step(l1(), A, ConfigDescriptor::all_active(l1()), rng) == ConfigDescriptor::all_active(l1()));
    CHECK_THROWS_AS(sample_step(l1(), AggregationFunction::threshold(Rational(1, 2), 4), ConfigDescriptor::all_inactive(l1()), rng), Error);
}

TEST_CASE("one active node: empirical law matches the product law") {
    auto A = AggregationFunction::proportion(4);
    auto c = ConfigDescriptor::with_active(l1(), {P(0, 0)});
    NodeList Y = l1().neighbors(P(0, 0));
    PartialLaw law = partial_law(l1(), A, c, Y);
    const size_t n = 100000;
    std::vector<size_t> hits(law.probs.size(), 0);
    RngStream rng(2024);
    for (size_t i = 0; i < n; ++i) {
        ConfigDescriptor next = sample_step(l1(), A, c, rng);
        REQUIRE(next.active_set().subset_of(closure(l1(), c.active_set())));
        size_t m = 0;
        for (size_t k = 0; k < Y.size(); ++k)
            if (next.status_of(Y[k]) == Status::Active) m |= size_t{1} << k;
        ++hits[m];
    }
    for (size_t m = 0; m < hits.size(); ++m) {
        double p = law.probs[m];
        double sigma = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(static_cast<double>(hits[m]) / n - p) <= 4 * sigma + 1e-12);
    }
}

TEST_CASE("sampled steps stay in the operator interval and randomize only mixed nodes") {
    auto A = AggregationFunction::proportion(4);
    std::mt19937 g(7);
    RngStream rng(99);
    for (Base base : {Base::all_inactive(), Base::all_active(), Base::even_active(), Base::odd_active()}) {
        for (int trial = 0; trial < 20; ++trial) {
            std::map<NodeId, Status> ex;
            for (const NodeId& x : random_cells(g, 6, 7)) ex[x] = (g() % 2) ? Status::Active : Status::Inactive;
            ConfigDescriptor c(l1(), base, ex);
            ConfigDescriptor next = sample_step(l1(), A, c, rng);
            CHECK(within_interval(l1(), c, next));
            Base img = base_image(l1(), base);
            ConfigDescriptor image(l1(), img);
            for (int64_t x = -6; x <= 6; ++x)
                for (int64_t y = -6; y <= 6; ++y) {
                    double p = activation_probability(l1(), A, c, P(x, y));
                    if (p == 0.0) CHECK(next.status_of(P(x, y)) == Status::Inactive);
                    if (p == 1.0) CHECK(next.status_of(P(x, y)) == Status::Active);
                    bool mixed = p > 0.0 && p < 1.0;
                    if (!mixed && std::abs(x) + std::abs(y) > 6) CHECK(next.status_of(P(x, y)) == image.status_of(P(x, y)));
                }
        }
    }
}

TEST_CASE("window sampling examples") {
    auto A = AggregationFunction::proportion(4);
    RngStream rng(5);
    Window frozen = Window::centered_box(l1(), 3, BoundaryPolicy::frozen_active());
    auto full = WindowConfig::from_function(frozen, [](const NodeId&) { return true; });
    CHECK(sample_step_window(frozen, A, full, rng) == full);

    Window torus = Window::box(l1(), {{0, 5}, {0, 5}}, BoundaryPolicy::torus());
    auto cb = WindowConfig::from_function(torus, even_cell);
    auto anti = WindowConfig::from_function(torus, [](const NodeId& n) { return !even_cell(n); });
    CHECK(sample_step_window(torus, A, cb, rng) == anti);

    Window box = Window::centered_box(l1(), 3);
    auto one = WindowConfig::from_active(box, {P(0, 0)});
    for (int i = 0; i < 200; ++i) CHECK(sample_step_window(box, A, one, rng).active_set().subset_of(closure(l1(), fs({P(0, 0)}))));
}

TEST_CASE("boolean step examples") {
    NodeSet grown = boolean_step(l1(), Rational(1, 4), fs({P(1, 1), P(2, 1)}));
    CHECK(grown == fs({P(1, 1), P(2, 1), P(0, 1), P(1, 0), P(1, 2), P(2, 0), P(2, 2), P(3, 1)}));
    CHECK(boolean_step(l1(), Rational(1, 2), ConfigDescriptor::even_active(l1())) == ConfigDescriptor::odd_active(l1()));
    Window torus = Window::box(l1(), {{0, 7}, {0, 7}}, BoundaryPolicy::torus());
    CHECK(boolean_step(torus, Rational(1, 2), WindowConfig::from_function(torus, even_cell)) ==
          WindowConfig::from_function(torus, [](const NodeId& n) { return !even_cell(n); }));
}

TEST_CASE("quarter threshold on the square lattice is the closure") {
    std::mt19937 g(13);
    oracle::Graph grid = oracle::l1_grid(10);
    for (int trial = 0; trial < 100; ++trial) {
        NodeSet X = fs(random_cells(g, 1 + static_cast<int>(g() % 12), 9));
        NodeSet next = boolean_step(l1(), Rational(1, 4), X);
        CHECK(next == closure(l1(), X));
        std::set<NodeId> xs(X.elements().begin(), X.elements().end());
        CHECK(std::set<NodeId>(next.elements().begin(), next.elements().end()) == oracle::closure(grid, xs));
        CHECK(next.size() <= l1().gamma() * X.size());
    }
}

TEST_CASE("deterministic runs") {
    Window torus = Window::box(l1(), {{0, 7}, {0, 7}}, BoundaryPolicy::torus());
    auto cyc = run_deterministic(torus, Rational(1, 2), WindowConfig::from_function(torus, even_cell), 10);
    CHECK(cyc.outcome.kind == RunOutcome::Kind::Cycle);
    CHECK(cyc.outcome.period == 2);
    auto dcyc = run_deterministic(l1(), Rational(1, 2), ConfigDescriptor::even_active(l1()), 10);
    CHECK(dcyc.outcome.kind == RunOutcome::Kind::Cycle);
    CHECK(dcyc.outcome.period == 2);

    auto lower = [](const NodeId& n) { return n.coords()[1] <= 0; };
    Window half = Window::centered_box(l1(), 5, BoundaryPolicy::extend(lower));
    auto fp = run_deterministic(half, Rational(3, 4), WindowConfig::from_function(half, lower), 10);
    CHECK(fp.outcome.kind == RunOutcome::Kind::FixedPoint);
    CHECK(fp.outcome.at_step == 0);

    auto grow = run_deterministic(l1(), Rational(1, 4), fs({P(0, 0), P(1, 0)}), 12);
    CHECK(grow.outcome.kind == RunOutcome::Kind::BudgetExceeded);
    const auto& s = grow.outcome.support_series;
    for (size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
}

TEST_CASE("terminating runs end in fixed points or incomparable cycles") {
    std::mt19937 g(31);
    Window torus = Window::box(l1(), {{0, 5}, {0, 5}}, BoundaryPolicy::torus());
    for (int trial = 0; trial < 60; ++trial) {
        Rational q(1 + static_cast<int64_t>(g() % 4), 4);
        auto X0 = WindowConfig::from_function(torus, [&](const NodeId&) { return g() % 2 == 0; });
        auto run = run_deterministic(torus, q, X0, 200);
        REQUIRE(run.outcome.kind != RunOutcome::Kind::BudgetExceeded);
        if (run.outcome.kind == RunOutcome::Kind::Cycle) {
            CHECK(run.outcome.period >= 2);
            for (size_t i = run.outcome.first_index; i < run.trace.size(); ++i)
                for (size_t j = i + 1; j < run.trace.size(); ++j) {
                    NodeSet a = run.trace[i].active_set(), b = run.trace[j].active_set();
                    CHECK_FALSE(a.subset_of(b));
                    CHECK_FALSE(b.subset_of(a));
                }
        }
    }
}

TEST_CASE("absorbing states agree with the fixed-point test") {
    auto lower = [](const NodeId& n) { return n.coords()[1] <= 0; };
    Window half = Window::centered_box(l1(), 4, BoundaryPolicy::extend(lower));
    CHECK(is_absorbing_state(half, WindowConfig::from_function(half, lower), Rational(3, 4)).absorbing);
    auto antenna = [&](const NodeId& n) { return lower(n) || n == P(0, 1); };
    Window half2 = Window::centered_box(l1(), 4, BoundaryPolicy::extend(antenna));
    AbsorbingReport rep = is_absorbing_state(half2, WindowConfig::from_function(half2, antenna), Rational(1, 2));
    CHECK_FALSE(rep.absorbing);

    Network linf = Network::square_lattice(2, Neighborhood::Linf);
    NodeSet square = fs({P(0, 0), P(1, 0), P(0, 1), P(1, 1)});
    CHECK(is_absorbing_state(linf, square.complement(), Rational(3, 4)).absorbing);

    std::mt19937 g(3);
    Window torus = Window::box(l1(), {{0, 4}, {0, 4}}, BoundaryPolicy::torus());
    for (int trial = 0; trial < 100; ++trial) {
        Rational q(1 + static_cast<int64_t>(g() % 4), 4);
        auto X = WindowConfig::from_function(torus, [&](const NodeId&) { return g() % 3 == 0; });
        CHECK(is_absorbing_state(torus, X, q).absorbing == (boolean_step(torus, q, X) == X));
        NodeSet S = fs(random_cells(g, 5, 5));
        CHECK(is_absorbing_state(l1(), S, q).absorbing == (boolean_step(l1(), q, S) == S));
    }
}

TEST_CASE("extinction schedules") {
    auto one = extinction_schedule(l1(), fs({P(0, 1)}));
    REQUIRE(one.size() == 2);
    CHECK(one[1].empty_set());

    NodeList odd;
    for (const NodeId& n : ball_nodes(l1(), P(0, 0), 3))
        if (!even_cell(n)) odd.push_back(n);
    auto chain = extinction_schedule(l1(), fs(odd));
    CHECK(chain.back().empty_set());
    for (size_t i = 1; i < chain.size(); ++i) CHECK(chain[i].size() < chain[i - 1].size());

    Network hex = Network::hex_pavement();
    std::mt19937 g(8);
    NodeList ball = ball_nodes(hex, hex.origin(), 6);
    for (int trial = 0; trial < 20; ++trial) {
        NodeList pick;
        while (pick.size() < 10) {
            NodeId n = ball[g() % ball.size()];
            if (hex.parity(n) == Parity::Odd && std::find(pick.begin(), pick.end(), n) == pick.end()) pick.push_back(n);
        }
        auto h = extinction_schedule(hex, fs(pick));
        CHECK(h.back().empty_set());
        CHECK(h.size() <= 11);
    }
    CHECK_THROWS_AS(extinction_schedule(l1(), fs({P(0, 0), P(1, 0)})), Error);
}

TEST_CASE("one-step cardinality across parities") {
    PredictedBlock z = one_step_cardinality(l1(), ConfigDescriptor::all_inactive(l1()));
    CHECK(z.odd_active.kind == CardinalityBound::Kind::Zero);
    auto c = ConfigDescriptor::with_active(l1(), {P(0, 0), P(2, 0)});
    PredictedBlock f = one_step_cardinality(l1(), c);
    CHECK(f.odd_active.kind == CardinalityBound::Kind::FinOrZero);
    CHECK(f.odd_active.max == 8);
    PredictedBlock i = one_step_cardinality(l1(), ConfigDescriptor::even_active(l1()));
    CHECK(i.odd_active.kind == CardinalityBound::Kind::Inf);

    std::mt19937 g(77);
    RngStream rng(77);
    auto A = AggregationFunction::proportion(4);
    for (Base base : {Base::all_inactive(), Base::all_active(), Base::even_active(), Base::odd_active()}) {
        for (int trial = 0; trial < 30; ++trial) {
            std::map<NodeId, Status> ex;
            for (const NodeId& x : random_cells(g, 4, 7)) ex[x] = (g() % 2) ? Status::Active : Status::Inactive;
            ConfigDescriptor cur(l1(), base, ex);
            PredictedBlock pred = one_step_cardinality(l1(), cur);
            BlockDescriptor next = block_classify(l1(), sample_step(l1(), A, cur, rng));
            CHECK(pred.even_inactive.admits(next.even_inactive));
            CHECK(pred.even_active.admits(next.even_active));
            CHECK(pred.odd_inactive.admits(next.odd_inactive));
            CHECK(pred.odd_active.admits(next.odd_active));
        }
    }
}

TEST_CASE("monte carlo") {
    auto A = AggregationFunction::proportion(4);
    auto rep = monte_carlo(l1(), A, ConfigDescriptor::with_active(l1(), {P(0, 0)}), 10000, 200, 12345, 1);
    CHECK(rep.freq_empty > 0.0);
    CHECK(rep.interval_violations == 0);
    auto again = monte_carlo(l1(), A, ConfigDescriptor::with_active(l1(), {P(0, 0)}), 10000, 200, 12345, 4);
    CHECK(again.freq_empty == rep.freq_empty);
    for (size_t r = 0; r < 50; ++r) CHECK(again.runs[r].support_series == rep.runs[r].support_series);

    auto dead = monte_carlo(l1(), A, ConfigDescriptor::all_inactive(l1()), 20, 10, 1);
    CHECK(dead.freq_empty == 1.0);
    CHECK(dead.mean_time_to_absorption == 0.0);

    Window w = Window::centered_box(l1(), 3, BoundaryPolicy::frozen_active());
    auto full = monte_carlo(w, A, WindowConfig::from_function(w, [](const NodeId&) { return true; }), 20, 10, 1);
    CHECK(full.freq_full == 1.0);

    Window box = Window::centered_box(l1(), 4);
    auto wrep = monte_carlo(box, A, WindowConfig::from_function(box, [](const NodeId& n) { return n.coords()[0] >= 0; }), 200, 100, 9);
    CHECK(wrep.interval_violations == 0);
}

TEST_CASE("rng streams are reproducible and independent") {
    RngStream a(42), b(42);
    for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
    RngStream c = RngStream(42).derive(1), d = RngStream(42).derive(2);
    CHECK(c.next() != d.next());
    RngStream u(3);
    for (int i = 0; i < 1000; ++i) {
        double x = u.uniform();
        CHECK((x >= 0.0 && x < 1.0));
    }
}

} // TEST_SUITE
