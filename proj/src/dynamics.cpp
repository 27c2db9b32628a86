#include "netdiff/dynamics.hpp"

#include "netdiff/error.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_map>

namespace netdiff {

// ---------------------------------------------------------------- rng

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(uint64_t seed, uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)) {}

RngStream RngStream::derive(uint64_t index) const {
    return RngStream(seed_, splitmix64(stream_ * 0x9e3779b97f4a7c15ULL + index + 1));
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------- laws

namespace {

constexpr size_t kMaxLawNodes = 20;

PartialLaw product_law(const NodeList& Y, const std::vector<double>& p) {
    if (Y.size() > kMaxLawNodes) throw Error(ErrorKind::TooLarge, "partial law over more than 20 nodes");
    NodeList sorted = Y;
    normalize(sorted);
    if (sorted.size() != Y.size()) throw Error(ErrorKind::InvalidInput, "partial law nodes must be distinct");
    PartialLaw law;
    law.Y = Y;
    size_t total = size_t{1} << Y.size();
    law.probs.assign(total, 1.0);
    for (size_t m = 0; m < total; ++m) {
        for (size_t i = 0; i < Y.size(); ++i) law.probs[m] *= ((m >> i) & 1) ? p[i] : 1.0 - p[i];
    }
    return law;
}

} // namespace

double PartialLaw::at(const std::vector<Status>& h) const {
    if (h.size() != Y.size()) throw Error(ErrorKind::InvalidInput, "assignment length differs from |Y|");
    size_t m = 0;
    for (size_t i = 0; i < h.size(); ++i) {
        if (h[i] == Status::Active) m |= size_t{1} << i;
    }
    return probs[m];
}

PartialLaw partial_law(const Network& net, const AggregationFunction& A, const ConfigDescriptor& config, const NodeList& Y) {
    std::vector<double> p;
    for (const NodeId& y : Y) p.push_back(activation_probability(net, A, config, y));
    return product_law(Y, p);
}

PartialLaw partial_law(const Window& w, const AggregationFunction& A, const WindowConfig& config, const NodeList& Y) {
    std::vector<double> p;
    for (const NodeId& y : Y) p.push_back(activation_probability(w, A, config, y));
    return product_law(Y, p);
}

// ---------------------------------------------------------------- descriptor stepping

Base base_image(const Network& net, Base base) {
    if (!base.homogeneous()) throw Error(ErrorKind::UnsupportedBase, "base " + base.name() + " has no exact one-step image");
    if (base.parity_free()) return base;
    if (!net.is_bipartite()) throw Error(ErrorKind::NotBipartite, "parity base on a non-bipartite network");
    return {base.odd, base.even};
}

NodeList exception_halo(const Network& net, const ConfigDescriptor& config) {
    NodeList halo;
    for (const auto& [x, s] : config.exceptions()) {
        NodeList nb = net.neighbors(x);
        halo.insert(halo.end(), nb.begin(), nb.end());
    }
    normalize(halo);
    return halo;
}

namespace {

void check_frame(const Network& net, const ConfigDescriptor& config) {
    if (!config.base().parity_free() && !net.same_as(config.frame())) {
        throw Error(ErrorKind::InvalidInput, "descriptor parity frame differs from the stepping network");
    }
}

// Applies `rule` on the halo; every other node follows the base image.
template <class Rule>
ConfigDescriptor map_descriptor(const Network& net, const ConfigDescriptor& config, Rule rule) {
    check_frame(net, config);
    Base next = base_image(net, config.base());
    std::map<NodeId, Status> ex;
    for (const NodeId& u : exception_halo(net, config)) ex[u] = rule(u);
    return ConfigDescriptor(config.frame(), next, std::move(ex));
}

void require_strict(const AggregationFunction& A) {
    if (classify(A).kind != AggKind::Strict) throw Error(ErrorKind::NotStrict, "exact sampling needs a strict aggregation function");
}

ConfigDescriptor sample_unchecked(const Network& net, const AggregationFunction& A, const ConfigDescriptor& config, RngStream& rng) {
    return map_descriptor(net, config, [&](const NodeId& u) {
        double p = activation_probability(net, A, config, u);
        return rng.uniform() < p ? Status::Active : Status::Inactive;
    });
}

WindowConfig sample_window_unchecked(const Window& w, const AggregationFunction& A, const WindowConfig& config, RngStream& rng) {
    WindowConfig next(w);
    for (size_t i = 0; i < w.size(); ++i) {
        double p = activation_probability(w, A, config, w.nodes()[i]);
        next.set(i, rng.uniform() < p ? Status::Active : Status::Inactive);
    }
    return next;
}

std::pair<size_t, size_t> count_active(const Network& net, const NodeSet& X, const NodeId& x) {
    size_t eta = 0, deg = 0;
    for (const NodeId& y : net.neighbors(x)) {
        ++deg;
        if (X.contains(y)) ++eta;
    }
    return {eta, deg};
}

std::pair<size_t, size_t> count_active(const Window& w, const WindowConfig& X, const NodeId& x) {
    size_t eta = 0, deg = 0;
    for (const NodeId& y : w.base().neighbors(x)) {
        ++deg;
        if (X.active_at(y)) ++eta;
    }
    return {eta, deg};
}

bool meets(const Rational& q, std::pair<size_t, size_t> c) {
    return q.at_most_ratio(static_cast<int64_t>(c.first), static_cast<int64_t>(c.second));
}

} // namespace

ConfigDescriptor sample_step(const Network& net, const AggregationFunction& A, const ConfigDescriptor& config, RngStream& rng) {
    require_strict(A);
    return sample_unchecked(net, A, config, rng);
}

WindowConfig sample_step_window(const Window& w, const AggregationFunction& A, const WindowConfig& config, RngStream& rng) {
    return sample_window_unchecked(w, A, config, rng);
}

NodeSet boolean_step(const Network& net, const Rational& q, const NodeSet& X) {
    if (q.num <= 0) return NodeSet::universe();
    if (Rational(1) < q) return NodeSet::empty();
    if (X.is_finite()) {
        NodeList out;
        NodeSet reach = closure(net, X);
        for (const NodeId& x : reach.elements()) {
            if (meets(q, count_active(net, X, x))) out.push_back(x);
        }
        return NodeSet::finite(std::move(out));
    }
    // Only nodes next to the complement can drop out.
    NodeList out_nodes;
    NodeSet reach = closure(net, NodeSet::finite(X.elements()));
    for (const NodeId& x : reach.elements()) {
        if (!meets(q, count_active(net, X, x))) out_nodes.push_back(x);
    }
    return NodeSet::cofinite(std::move(out_nodes));
}

WindowConfig boolean_step(const Window& w, const Rational& q, const WindowConfig& X) {
    WindowConfig next(w);
    for (size_t i = 0; i < w.size(); ++i) {
        next.set(i, meets(q, count_active(w, X, w.nodes()[i])) ? Status::Active : Status::Inactive);
    }
    return next;
}

ConfigDescriptor boolean_step(const Network& net, const Rational& q, const ConfigDescriptor& X) {
    if (q.num <= 0 || Rational(1) < q) throw Error(ErrorKind::InvalidInput, "descriptor threshold steps need 0 < q <= 1");
    return map_descriptor(net, X, [&](const NodeId& u) {
        size_t eta = 0, deg = 0;
        for (const NodeId& y : net.neighbors(u)) {
            ++deg;
            if (X.status_of(y) == Status::Active) ++eta;
        }
        return meets(q, {eta, deg}) ? Status::Active : Status::Inactive;
    });
}

ConfigDescriptor interior(const Network& net, const ConfigDescriptor& X) {
    return map_descriptor(net, X, [&](const NodeId& u) {
        for (const NodeId& y : net.neighbors(u)) {
            if (X.status_of(y) != Status::Active) return Status::Inactive;
        }
        return Status::Active;
    });
}

ConfigDescriptor closure(const Network& net, const ConfigDescriptor& X) {
    return map_descriptor(net, X, [&](const NodeId& u) {
        for (const NodeId& y : net.neighbors(u)) {
            if (X.status_of(y) == Status::Active) return Status::Active;
        }
        return Status::Inactive;
    });
}

DetClass deterministic_class(const Network& net, const ConfigDescriptor& X) {
    ConfigDescriptor in = interior(net, X);
    ConfigDescriptor cl = closure(net, X);
    if (!(in == cl)) return DetClass::Neither;
    if (in == X) return DetClass::FixedPointUniversal;
    if (in == X.complement()) return DetClass::TwoCyclePair;
    return DetClass::Neither;
}

bool within_interval(const Network& net, const ConfigDescriptor& before, const ConfigDescriptor& after) {
    ConfigDescriptor in = interior(net, before);
    ConfigDescriptor cl = closure(net, before);
    if (!(after.base() == in.base())) return false;
    NodeList check = set_union(set_union(in.exception_nodes(), cl.exception_nodes()), after.exception_nodes());
    for (const NodeId& u : check) {
        int lo = static_cast<int>(in.status_of(u));
        int mid = static_cast<int>(after.status_of(u));
        int hi = static_cast<int>(cl.status_of(u));
        if (lo > mid || mid > hi) return false;
    }
    return true;
}

bool within_interval(const Window& w, const WindowConfig& before, const WindowConfig& after) {
    NodeSet S = before.active_set();
    NodeSet in = interior(w, S);
    NodeSet cl = closure(w, S);
    for (size_t i = 0; i < w.size(); ++i) {
        const NodeId& x = w.nodes()[i];
        bool a = after.at(i) == Status::Active;
        if (in.contains(x) && !a) return false;
        if (a && !cl.contains(x)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- runs

const char* sink_name(Sink s) {
    switch (s) {
    case Sink::None: return "none";
    case Sink::Empty: return "empty";
    case Sink::Full: return "full";
    case Sink::TwoCycle: return "two-cycle";
    }
    return "?";
}

const char* outcome_name(RunOutcome::Kind k) {
    switch (k) {
    case RunOutcome::Kind::FixedPoint: return "FixedPoint";
    case RunOutcome::Kind::Cycle: return "Cycle";
    case RunOutcome::Kind::BudgetExceeded: return "BudgetExceeded";
    case RunOutcome::Kind::Absorbed: return "Absorbed";
    }
    return "?";
}

namespace {

template <class State, class Step, class Support, class Hash>
Run<State> run_until_repeat(const State& x0, size_t budget, Step step, Support support, Hash hash) {
    Run<State> run;
    run.trace.push_back(x0);
    run.outcome.support_series.push_back(support(x0));
    std::unordered_multimap<size_t, size_t> seen{{hash(x0), 0}};
    for (size_t t = 1; t <= budget; ++t) {
        State next = step(run.trace.back());
        auto range = seen.equal_range(hash(next));
        for (auto it = range.first; it != range.second; ++it) {
            size_t j = it->second;
            if (!(run.trace[j] == next)) continue;
            if (j == t - 1) {
                run.outcome.kind = RunOutcome::Kind::FixedPoint;
                run.outcome.at_step = j;
            } else {
                run.outcome.kind = RunOutcome::Kind::Cycle;
                run.outcome.period = t - j;
                run.outcome.first_index = j;
            }
            run.outcome.detected_at = t;
            return run;
        }
        seen.emplace(hash(next), t);
        run.outcome.support_series.push_back(support(next));
        run.trace.push_back(std::move(next));
    }
    run.outcome.kind = RunOutcome::Kind::BudgetExceeded;
    run.outcome.detected_at = budget;
    return run;
}

} // namespace

Run<NodeSet> run_deterministic(const Network& net, const Rational& q, const NodeSet& X0, size_t budget) {
    return run_until_repeat(
        X0, budget, [&](const NodeSet& X) { return boolean_step(net, q, X); },
        [](const NodeSet& X) { return X.size(); }, [](const NodeSet& X) { return X.hash(); });
}

Run<WindowConfig> run_deterministic(const Window& w, const Rational& q, const WindowConfig& X0, size_t budget) {
    return run_until_repeat(
        X0, budget, [&](const WindowConfig& X) { return boolean_step(w, q, X); },
        [](const WindowConfig& X) { return X.active_count(); }, [](const WindowConfig& X) { return X.hash(); });
}

Run<ConfigDescriptor> run_deterministic(const Network& net, const Rational& q, const ConfigDescriptor& X0, size_t budget) {
    return run_until_repeat(
        X0, budget, [&](const ConfigDescriptor& X) { return boolean_step(net, q, X); },
        [](const ConfigDescriptor& X) { return X.exceptions().size(); }, [](const ConfigDescriptor& X) { return X.hash(); });
}

// ---------------------------------------------------------------- absorbing states

AbsorbingReport is_absorbing_state(const Network& net, const NodeSet& X, const Rational& q) {
    AbsorbingReport rep;
    if (q.num <= 0 || Rational(1) < q) {
        // Every node joins (q <= 0) or leaves (q > 1): only the matching constant set is stable.
        bool stable = q.num <= 0 ? X == NodeSet::universe() : X.empty_set();
        if (!stable) {
            rep.absorbing = false;
            const NodeList& e = X.elements();
            NodeId witness = e.empty() ? net.origin() : e.front();
            auto c = count_active(net, X, witness);
            rep.violations.push_back({witness, c.first, c.second, X.contains(witness)});
        }
        return rep;
    }
    // Only the listed elements and their neighbors can change; this covers the frontier,
    // isolated members and holes whose neighbors all lie in X.
    NodeSet listed = NodeSet::finite(X.elements());
    NodeList candidates = set_union(X.elements(), closure(net, listed).elements());
    for (const NodeId& x : candidates) {
        auto c = count_active(net, X, x);
        bool in = X.contains(x);
        if (in != meets(q, c)) rep.violations.push_back({x, c.first, c.second, in});
    }
    rep.absorbing = rep.violations.empty();
    return rep;
}

AbsorbingReport is_absorbing_state(const Window& w, const WindowConfig& X, const Rational& q) {
    AbsorbingReport rep;
    for (size_t i = 0; i < w.size(); ++i) {
        const NodeId& x = w.nodes()[i];
        auto c = count_active(w, X, x);
        bool in = X.at(i) == Status::Active;
        if (in != meets(q, c)) rep.violations.push_back({x, c.first, c.second, in});
    }
    rep.absorbing = rep.violations.empty();
    return rep;
}

std::vector<NodeSet> extinction_schedule(const Network& net, const NodeSet& X0) {
    if (!net.is_bipartite()) throw Error(ErrorKind::NotBipartite, "extinction schedule needs a bipartite network");
    if (!X0.is_finite()) throw Error(ErrorKind::InvalidInput, "extinction schedule needs a finite set");
    if (!X0.elements().empty()) {
        Parity p = *net.parity(X0.elements().front());
        for (const NodeId& x : X0.elements()) {
            if (*net.parity(x) != p) throw Error(ErrorKind::NotSingleParity, "set spans both parity blocks");
        }
    }
    std::vector<NodeSet> chain{X0};
    while (!chain.back().empty_set()) {
        NodeSet next = iterate(SetOp::Interior, 2, net, chain.back());
        if (next.size() >= chain.back().size()) throw Error(ErrorKind::Internal, "int^2 did not shrink a single-parity set");
        chain.push_back(std::move(next));
    }
    return chain;
}

bool CardinalityBound::admits(const Cardinality& c) const {
    switch (kind) {
    case Kind::Zero: return c.kind == Cardinality::Kind::Zero;
    case Kind::FinOrZero: return c.kind == Cardinality::Kind::Zero || (c.kind == Cardinality::Kind::Fin && c.count <= max);
    case Kind::Inf: return c.kind == Cardinality::Kind::Inf;
    }
    return false;
}

PredictedBlock one_step_cardinality(const Network& net, const ConfigDescriptor& config) {
    BlockDescriptor b = block_classify(net, config);
    uint64_t g = net.gamma();
    auto next = [g](const Cardinality& c) {
        CardinalityBound out;
        switch (c.kind) {
        case Cardinality::Kind::Zero: out.kind = CardinalityBound::Kind::Zero; break;
        case Cardinality::Kind::Fin: out.kind = CardinalityBound::Kind::FinOrZero; out.max = g * c.count; break;
        case Cardinality::Kind::Inf: out.kind = CardinalityBound::Kind::Inf; break;
        }
        return out;
    };
    return {next(b.odd_inactive), next(b.odd_active), next(b.even_inactive), next(b.even_active)};
}

// ---------------------------------------------------------------- Monte Carlo

namespace {

Sink descriptor_sink(const ConfigDescriptor& c) {
    if (!c.exceptions().empty()) return Sink::None;
    Base b = c.base();
    if (b == Base::all_inactive()) return Sink::Empty;
    if (b == Base::all_active()) return Sink::Full;
    if (b == Base::even_active() || b == Base::odd_active()) return Sink::TwoCycle;
    return Sink::None;
}

Sink window_sink(const WindowConfig& c) {
    size_t n = c.active_count();
    if (n == 0) return Sink::Empty;
    if (n == c.window().size()) return Sink::Full;
    return Sink::None;
}

template <class Body>
void parallel_for(size_t n, unsigned threads, Body body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<size_t>(threads, n));
    if (threads <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (size_t i = next++; i < n; i = next++) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

template <class State, class Step, class SinkFn, class Support, class Check>
MonteCarloReport monte_carlo_generic(const State& initial, size_t n_runs, size_t horizon, uint64_t seed, unsigned threads,
                                     Step step, SinkFn sink, Support support, Check check) {
    if (n_runs == 0) throw Error(ErrorKind::InvalidInput, "monte carlo needs at least one run");
    MonteCarloReport rep;
    rep.runs.resize(n_runs);
    std::vector<size_t> violations(n_runs, 0);
    RngStream root(seed);
    parallel_for(n_runs, threads, [&](size_t r) {
        RngStream rng = root.derive(r);
        State cur = initial;
        RunOutcome& out = rep.runs[r];
        out.support_series.push_back(support(cur));
        for (size_t t = 0;; ++t) {
            Sink s = sink(cur);
            if (s != Sink::None) {
                out.kind = RunOutcome::Kind::Absorbed;
                out.sink = s;
                out.at_step = t;
                return;
            }
            if (t == horizon) break;
            State next = step(cur, rng);
            if (!check(cur, next)) ++violations[r];
            cur = std::move(next);
            out.support_series.push_back(support(cur));
        }
        out.kind = RunOutcome::Kind::BudgetExceeded;
        out.at_step = horizon;
    });
    size_t absorbed = 0, time_sum = 0, empty = 0, full = 0, cyc = 0;
    for (size_t r = 0; r < n_runs; ++r) {
        const RunOutcome& o = rep.runs[r];
        rep.interval_violations += violations[r];
        if (o.kind != RunOutcome::Kind::Absorbed) continue;
        ++absorbed;
        time_sum += o.at_step;
        empty += o.sink == Sink::Empty;
        full += o.sink == Sink::Full;
        cyc += o.sink == Sink::TwoCycle;
    }
    double n = static_cast<double>(n_runs);
    rep.freq_empty = static_cast<double>(empty) / n;
    rep.freq_full = static_cast<double>(full) / n;
    rep.freq_two_cycle = static_cast<double>(cyc) / n;
    rep.mean_time_to_absorption = absorbed ? static_cast<double>(time_sum) / static_cast<double>(absorbed) : 0.0;
    return rep;
}

} // namespace

MonteCarloReport monte_carlo(const Network& net, const AggregationFunction& A, const ConfigDescriptor& initial,
                             size_t n_runs, size_t horizon, uint64_t seed, unsigned threads) {
    require_strict(A);
    return monte_carlo_generic(
        initial, n_runs, horizon, seed, threads,
        [&](const ConfigDescriptor& c, RngStream& rng) { return sample_unchecked(net, A, c, rng); }, descriptor_sink,
        [](const ConfigDescriptor& c) { return c.exceptions().size(); },
        [&](const ConfigDescriptor& a, const ConfigDescriptor& b) { return within_interval(net, a, b); });
}

MonteCarloReport monte_carlo(const Window& w, const AggregationFunction& A, const WindowConfig& initial,
                             size_t n_runs, size_t horizon, uint64_t seed, unsigned threads) {
    require_strict(A);
    return monte_carlo_generic(
        initial, n_runs, horizon, seed, threads,
        [&](const WindowConfig& c, RngStream& rng) { return sample_window_unchecked(w, A, c, rng); }, window_sink,
        [](const WindowConfig& c) { return c.active_count(); },
        [&](const WindowConfig& a, const WindowConfig& b) { return within_interval(w, a, b); });
}

} // namespace netdiff
