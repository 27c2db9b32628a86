#include "netdiff/aggregation.hpp"
#include "netdiff/error.hpp"
#include "netdiff/setops.hpp"

#include <doctest.h>

#include <random>

using namespace netdiff;

namespace {

NodeId N(const char* s) { return NodeId::named(s); }

Network path_abc() { return Network::from_edges({N("a"), N("b"), N("c")}, {{N("a"), N("b")}, {N("b"), N("c")}}); }

// Zero with no ones, one half with a single one, one from two ones on.
AggregationFunction mixed_table() {
    return AggregationFunction::table(4, {{1, {0, 1}}, {2, {0, 0.5, 1}}, {3, {0, 0.5, 1, 1}}, {4, {0, 0.5, 1, 1, 1}}});
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Internal;
}

} // namespace

TEST_SUITE("aggregation") {

TEST_CASE("evaluation examples") {
    CHECK(AggregationFunction::proportion(4).evaluate({1, 0, 0, 1}) == doctest::Approx(0.5));
    CHECK(AggregationFunction::threshold(Rational(1, 2), 4).evaluate({1, 0, 0, 1}) == 1.0);
    CHECK(AggregationFunction::threshold(Rational(3, 4), 4).evaluate({1, 0, 1, 1}) == 1.0);
    CHECK(AggregationFunction::threshold(Rational(3, 4), 4).evaluate({1, 0, 0, 1}) == 0.0);
    AggregationFunction t = mixed_table();
    CHECK(t.evaluate({0, 0, 0, 0}) == 0.0);
    CHECK(t.evaluate({0, 1, 0, 0}) == 0.5);
    CHECK(t.evaluate({0, 1, 1, 0}) == 1.0);
    CHECK(kind_of([] { AggregationFunction::proportion(4).evaluate({1, 0, 0, 1, 1}); }) == ErrorKind::ArityExceeded);
}

TEST_CASE("classification examples") {
    CHECK(classify(AggregationFunction::proportion(8)).kind == AggKind::Strict);
    for (int d = 1; d <= 8; ++d)
        for (int k = 1; k <= d; ++k) CHECK(classify(AggregationFunction::threshold(Rational(k, d), 8)).kind == AggKind::Boolean);
    AggClass c = classify(mixed_table());
    CHECK(c.kind == AggKind::Neither);
    REQUIRE(c.ell.has_value());
    CHECK(*c.ell == 0);
    CHECK(*c.r == 2);
    CHECK((*c.ell > 0 || *c.r > 0));
    CHECK(*c.ell + *c.r < 4);
}

TEST_CASE("invalid functions are refused") {
    auto short_top = AggregationFunction::table(2, {{1, {0, 1}}, {2, {0, 0.5, 0.9}}});
    CHECK(kind_of([&] { classify(short_top); }) == ErrorKind::EndpointViolation);
    auto dip = AggregationFunction::table(3, {{3, {0, 0.7, 0.6, 1}}});
    CHECK(kind_of([&] { classify(dip); }) == ErrorKind::NotMonotone);
    auto bad_zero = AggregationFunction::general(2, [](const StatusVector&) { return 0.5; });
    CHECK(kind_of([&] { classify(bad_zero); }) == ErrorKind::EndpointViolation);
    auto contrarian = AggregationFunction::general(3, [](const StatusVector& v) {
        size_t s = 0;
        for (auto b : v) s += b;
        if (s == 0 || s == v.size()) return s == 0 ? 0.0 : 1.0;
        return v[0] ? 0.2 : 0.8;
    });
    CHECK(kind_of([&] { classify(contrarian); }) == ErrorKind::NotMonotone);
    CHECK(kind_of([] { AggregationFunction::threshold(Rational(0), 4); }) == ErrorKind::EndpointViolation);
}

TEST_CASE("general weighted mean is strict") {
    auto weighted = AggregationFunction::general(4, [](const StatusVector& v) {
        double s = 0, w = 0;
        for (size_t i = 0; i < v.size(); ++i) {
            s += (i + 1.0) * v[i];
            w += i + 1.0;
        }
        return s / w;
    });
    CHECK(classify(weighted).kind == AggKind::Strict);
    CHECK_FALSE(weighted.anonymous());
}

TEST_CASE("activation on a path") {
    Network path = path_abc();
    auto A = AggregationFunction::proportion(2);
    auto c = ConfigDescriptor::with_active(path, {N("b")});
    CHECK(activation_probability(path, A, c, N("a")) == 1.0);
    CHECK(activation_probability(path, A, c, N("b")) == 0.0);
    CHECK(activation_probability(path, A, c, N("c")) == 1.0);
    Network l1 = Network::square_lattice(2, Neighborhood::L1);
    auto A4 = AggregationFunction::proportion(4);
    CHECK(activation_probability(l1, A4, ConfigDescriptor::with_active(l1, {P(0, 1), P(1, 0)}), P(0, 0)) == 0.5);
    for (int64_t x = -3; x <= 3; ++x) CHECK(activation_probability(l1, A4, ConfigDescriptor::all_inactive(l1), P(x, 1)) == 0.0);
}

TEST_CASE("strict functions separate homogeneous from mixed neighborhoods") {
    // Every binary configuration of the four neighbors of the origin.
    Network l1 = Network::square_lattice(2, Neighborhood::L1);
    auto A = AggregationFunction::proportion(4);
    NodeList nb = l1.neighbors(P(0, 0));
    for (int m = 0; m < 16; ++m) {
        NodeList active;
        for (int i = 0; i < 4; ++i)
            if (m >> i & 1) active.push_back(nb[i]);
        auto c = ConfigDescriptor::with_active(l1, active);
        double p = activation_probability(l1, A, c, P(0, 0));
        NodeSet S = NodeSet::finite(active);
        bool in_int = interior(l1, S).contains(P(0, 0));
        bool in_clo = closure(l1, S).contains(P(0, 0));
        CHECK((p == 1.0) == in_int);
        CHECK((p == 0.0) == !in_clo);
        CHECK((p > 0.0 && p < 1.0) == (m != 0 && m != 15));
    }
}

TEST_CASE("boolean functions respect the operator bounds") {
    Network l1 = Network::square_lattice(2, Neighborhood::L1);
    std::mt19937 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        NodeList active;
        for (int i = 0; i < 8; ++i) active.push_back(P(static_cast<int64_t>(rng() % 5) - 2, static_cast<int64_t>(rng() % 5) - 2));
        auto c = ConfigDescriptor::with_active(l1, active);
        NodeSet S = NodeSet::finite(active);
        for (int k = 1; k <= 4; ++k) {
            auto A = AggregationFunction::threshold(Rational(k, 4), 4);
            for (int64_t x = -3; x <= 3; ++x)
                for (int64_t y = -3; y <= 3; ++y) {
                    double p = activation_probability(l1, A, c, P(x, y));
                    if (interior(l1, S).contains(P(x, y))) CHECK(p == 1.0);
                    if (!closure(l1, S).contains(P(x, y))) CHECK(p == 0.0);
                }
        }
    }
}

TEST_CASE("flipping a neighbor on never lowers the probability") {
    std::mt19937 rng(29);
    std::vector<AggregationFunction> fs = {AggregationFunction::proportion(6), AggregationFunction::threshold(Rational(2, 3), 6),
                                           AggregationFunction::table(6, {{6, {0, 0.1, 0.1, 0.4, 0.8, 0.9, 1}}})};
    for (const auto& A : fs) {
        for (int trial = 0; trial < 200; ++trial) {
            StatusVector v(6);
            for (auto& b : v) b = rng() % 2;
            size_t i = rng() % 6;
            StatusVector lo = v, hi = v;
            lo[i] = 0;
            hi[i] = 1;
            CHECK(A.evaluate(lo) <= A.evaluate(hi));
        }
    }
}

TEST_CASE("threshold ties are exact") {
    // 1/2 of 4 and 2/6 of 6 sit exactly on the threshold.
    auto h = AggregationFunction::threshold(Rational(1, 2), 8);
    CHECK(h.evaluate_count(2, 4) == 1.0);
    CHECK(h.evaluate_count(1, 4) == 0.0);
    auto t = AggregationFunction::threshold(Rational(1, 3), 8);
    CHECK(t.evaluate_count(2, 6) == 1.0);
    CHECK(t.evaluate_count(1, 6) == 0.0);
    CHECK(AggregationFunction::threshold(Rational::parse("0.75"), 4).q() == Rational(3, 4));
}

} // TEST_SUITE
