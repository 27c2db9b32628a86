#include "netdiff/error.hpp"
#include "netdiff/network.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace netdiff;

namespace {

NodeList sorted(NodeList v) {
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST_SUITE("network") {

TEST_CASE("node ids order lattice before indexed before named") {
    CHECK(P(5, 5) < NodeId::indexed(0));
    CHECK(NodeId::indexed(7) < NodeId::named("a"));
    CHECK(P(-1, 3) < P(0, -5));
    CHECK(P(2, 3).str() == "(2,3)");
}

TEST_CASE("square lattice neighbors match coordinate offsets") {
    Network l1 = Network::square_lattice(2, Neighborhood::L1);
    Network linf = Network::square_lattice(2, Neighborhood::Linf);
    std::mt19937 g(3);
    for (int k = 0; k < 50; ++k) {
        int64_t x = static_cast<int64_t>(g() % 41) - 20, y = static_cast<int64_t>(g() % 41) - 20;
        CHECK(l1.neighbors(P(x, y)) == sorted(oracle::l1_neighbors(x, y)));
        CHECK(linf.neighbors(P(x, y)) == sorted(oracle::linf_neighbors(x, y)));
    }
    CHECK(l1.gamma() == 4);
    CHECK(linf.gamma() == 8);
    CHECK(Network::square_lattice(3, Neighborhood::L1).neighbors(NodeId::lattice({0, 0, 0})).size() == 6);
    CHECK(Network::square_lattice(3, Neighborhood::Linf).gamma() == 26);
}

TEST_CASE("hex pavement is 3-regular, symmetric and bipartite") {
    Network hex = Network::hex_pavement();
    CHECK(hex.gamma() == 3);
    for (int64_t i = -6; i <= 6; ++i) {
        for (int64_t j = -6; j <= 6; ++j) {
            NodeList nb = hex.neighbors(P(i, j));
            REQUIRE(nb.size() == 3);
            for (const NodeId& y : nb) {
                NodeList back = hex.neighbors(y);
                CHECK(std::find(back.begin(), back.end(), P(i, j)) != back.end());
                CHECK(*hex.parity(y) != *hex.parity(P(i, j)));
            }
        }
    }
}

TEST_CASE("hierarchy uses heap numbering") {
    Network h = Network::hierarchy(2);
    CHECK(h.neighbors(NodeId::indexed(0)) == NodeList{NodeId::indexed(1), NodeId::indexed(2)});
    CHECK(h.neighbors(NodeId::indexed(1)) == NodeList{NodeId::indexed(0), NodeId::indexed(3), NodeId::indexed(4)});
    CHECK(h.neighbors(NodeId::indexed(6)) == NodeList{NodeId::indexed(2), NodeId::indexed(13), NodeId::indexed(14)});
    CHECK(h.gamma() == 3);
    CHECK(h.hierarchy_depth(NodeId::indexed(6)) == 2);
    CHECK(*h.parity(NodeId::indexed(6)) == Parity::Even);
    Network h3 = Network::hierarchy(3);
    CHECK(h3.neighbors(NodeId::indexed(1)).size() == 4);
}

TEST_CASE("explicit graphs are validated") {
    Adjacency asym{{P(0, 0), {P(1, 0)}}, {P(1, 0), {}}};
    CHECK_THROWS_AS(Network::explicit_graph(asym), Error);
    Adjacency loop{{P(0, 0), {P(0, 0)}}};
    CHECK_FALSE(validate(loop).irreflexive);
    Adjacency split{{P(0, 0), {P(1, 0)}}, {P(1, 0), {P(0, 0)}}, {P(5, 5), {}}};
    ValidationReport rep = validate(split);
    CHECK_FALSE(rep.connected);
    CHECK_FALSE(rep.failures.empty());
    try {
        Network::explicit_graph(split);
        FAIL("expected InvalidNetwork");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidNetwork);
    }
    CHECK_FALSE(validate(Window::whole(line_graph(5)).induced_adjacency(), 1).bounded);
}

TEST_CASE("unknown nodes are rejected") {
    Network l1 = Network::square_lattice(2, Neighborhood::L1);
    CHECK_THROWS_AS(l1.neighbors(NodeId::lattice({1, 2, 3})), Error);
    CHECK_THROWS_AS(line_graph(4).neighbors(NodeId::named("x")), Error);
}

TEST_CASE("bipartition colors every edge across blocks") {
    Window w = Window::centered_box(Network::square_lattice(2, Neighborhood::L1), 4);
    auto r = bipartition(w);
    REQUIRE(std::holds_alternative<Bipartition>(r));
    const Bipartition& b = std::get<Bipartition>(r);
    CHECK(b.evens.size() + b.odds.size() == w.size());
    for (const NodeId& x : w.nodes()) {
        CHECK(b.of(x) == parity_of_int(x.coords()[0] + x.coords()[1]));
    }
}

TEST_CASE("non-bipartite windows produce a genuine odd cycle") {
    Window w = Window::centered_box(Network::square_lattice(2, Neighborhood::Linf), 2);
    auto r = bipartition(w);
    REQUIRE(std::holds_alternative<OddCycle>(r));
    const NodeList& c = std::get<OddCycle>(r).cycle;
    CHECK(c.size() % 2 == 1);
    for (size_t i = 0; i < c.size(); ++i) {
        NodeList nb = w.neighbors(c[i]);
        CHECK(std::binary_search(nb.begin(), nb.end(), c[(i + 1) % c.size()]));
    }
    CHECK_FALSE(Network::square_lattice(2, Neighborhood::Linf).is_bipartite());
}

TEST_CASE("bipartite subnetwork keeps only distance-changing edges") {
    Network linf = Network::square_lattice(2, Neighborhood::Linf);
    Network sub = bipartite_subnetwork(linf, P(0, 0));
    CHECK(sub.is_bipartite());
    for (int64_t x = -3; x <= 3; ++x) {
        for (int64_t y = -3; y <= 3; ++y) {
            uint64_t dx = std::max(std::abs(x), std::abs(y));
            for (const NodeId& n : sub.neighbors(P(x, y))) {
                uint64_t dn = std::max(std::abs(n.coords()[0]), std::abs(n.coords()[1]));
                CHECK((dn + 1 == dx || dx + 1 == dn));
            }
        }
    }
    // Neighbors on the same ring are dropped.
    NodeList nb = sub.neighbors(P(1, 0));
    CHECK(std::find(nb.begin(), nb.end(), P(1, 1)) == nb.end());
    CHECK(std::find(nb.begin(), nb.end(), P(2, 1)) != nb.end());
}

TEST_CASE("intra-block edges exist exactly on non-bipartite relations") {
    Network linf = Network::square_lattice(2, Neighborhood::Linf);
    Network sub = bipartite_subnetwork(linf, P(0, 0));
    Bipartition b{[&](const NodeId& x) { return *sub.parity(x); }, {}, {}};
    auto e = intra_block_edge(linf, b);
    REQUIRE(e.has_value());
    CHECK(b.of(e->first) == b.of(e->second));
}

TEST_CASE("torus windows wrap around") {
    Window w = Window::box(Network::square_lattice(2, Neighborhood::L1), {{0, 4}, {0, 4}}, BoundaryPolicy::torus());
    NodeList nb = w.neighbors(P(0, 0));
    CHECK(nb == sorted({P(4, 0), P(1, 0), P(0, 4), P(0, 1)}));
    CHECK(w.resolve(P(-1, 2)) == P(4, 2));
    CHECK_THROWS_AS(Window::box(Network::square_lattice(2, Neighborhood::L1), {{0, 1}, {0, 4}}, BoundaryPolicy::torus()), Error);
}

TEST_CASE("frozen boundaries report ghost statuses") {
    Network l1 = Network::square_lattice(2, Neighborhood::L1);
    Window w = Window::centered_box(l1, 2);
    CHECK_FALSE(w.resolve(P(3, 0)).has_value());
    CHECK_FALSE(w.ghost_active(P(3, 0)));
    CHECK(w.with_boundary(BoundaryPolicy::frozen_active()).ghost_active(P(3, 0)));
    Window e = w.with_boundary(BoundaryPolicy::extend([](const NodeId& n) { return n.coords()[1] < 0; }));
    CHECK(e.ghost_active(P(0, -3)));
    CHECK_FALSE(e.ghost_active(P(0, 3)));
    CHECK(w.neighbors(P(2, 2)).size() == 2);
}

TEST_CASE("breadth-first distances agree with lattice metrics") {
    Network l1 = Network::square_lattice(2, Neighborhood::L1);
    Network linf = Network::square_lattice(2, Neighborhood::Linf);
    auto d1 = bfs_distances(l1, P(0, 0), 6);
    auto d8 = bfs_distances(linf, P(0, 0), 6);
    for (const auto& [n, d] : d1) CHECK(d == *l1.analytic_distance(P(0, 0), n));
    for (const auto& [n, d] : d8) CHECK(d == *linf.analytic_distance(P(0, 0), n));
    CHECK(d1.size() == 1 + 2 * 6 * 7);
    CHECK(d8.size() == 13 * 13);
    CHECK(ball_nodes(l1, P(0, 0), 1).size() == 5);
}

TEST_CASE("hierarchy balls grow geometrically") {
    Network h = Network::hierarchy(2);
    CHECK(ball_nodes(h, NodeId::indexed(0), 3).size() == 15);
    Window w = Window::ball(h, NodeId::indexed(0), 3);
    CHECK(w.size() == 15);
    CHECK(std::holds_alternative<Bipartition>(bipartition(w)));
}

TEST_CASE("example graphs") {
    Network e4 = example4_graph(2);
    CHECK(e4.neighbors(NodeId::named("alpha")) == NodeList{P(0, 0)});
    CHECK(e4.is_bipartite());
    CHECK_FALSE(example4_graph(2, true).is_bipartite());
    Network line = line_graph(6);
    CHECK(line.nodes().size() == 6);
    CHECK(line.neighbors(NodeId::lattice({0})).size() == 1);
}

} // TEST_SUITE
