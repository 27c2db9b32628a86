#pragma once

#include "netdiff/aggregation.hpp"
#include "netdiff/configuration.hpp"
#include "netdiff/network.hpp"
#include "netdiff/rational.hpp"
#include "netdiff/setops.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace netdiff {

// Seeded mt19937_64 stream; derive() gives an independent child stream per index.
class RngStream {
public:
    explicit RngStream(uint64_t seed, uint64_t stream = 0);
    RngStream derive(uint64_t index) const;
    uint64_t next() { return engine_(); }
    // Uniform on [0,1) with 53 random bits.
    double uniform();
    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

private:
    uint64_t seed_;
    uint64_t stream_;
    std::mt19937_64 engine_;
};

uint64_t splitmix64(uint64_t x);

struct PartialLaw {
    NodeList Y;
    // probs[m]: bit i of m set means Y[i] active.
    std::vector<double> probs;
    double at(const std::vector<Status>& h) const;
};

PartialLaw partial_law(const Network& net, const AggregationFunction& A, const ConfigDescriptor& config, const NodeList& Y);
PartialLaw partial_law(const Window& w, const AggregationFunction& A, const WindowConfig& config, const NodeList& Y);

// Base after one synchronous step; throws UnsupportedBase for split fills.
Base base_image(const Network& net, Base base);

// Nodes whose neighborhood meets the exception set.
NodeList exception_halo(const Network& net, const ConfigDescriptor& config);

ConfigDescriptor sample_step(const Network& net, const AggregationFunction& A, const ConfigDescriptor& config, RngStream& rng);
WindowConfig sample_step_window(const Window& w, const AggregationFunction& A, const WindowConfig& config, RngStream& rng);

NodeSet boolean_step(const Network& net, const Rational& q, const NodeSet& X);
WindowConfig boolean_step(const Window& w, const Rational& q, const WindowConfig& X);
ConfigDescriptor boolean_step(const Network& net, const Rational& q, const ConfigDescriptor& X);

// Descriptor forms of the operators (homogeneous bases).
ConfigDescriptor interior(const Network& net, const ConfigDescriptor& X);
ConfigDescriptor closure(const Network& net, const ConfigDescriptor& X);
DetClass deterministic_class(const Network& net, const ConfigDescriptor& X);

// int(S) <= after <= clo(S) where S is the active set of `before`.
bool within_interval(const Network& net, const ConfigDescriptor& before, const ConfigDescriptor& after);
bool within_interval(const Window& w, const WindowConfig& before, const WindowConfig& after);

enum class Sink { None, Empty, Full, TwoCycle };
const char* sink_name(Sink s);

struct RunOutcome {
    enum class Kind { FixedPoint, Cycle, BudgetExceeded, Absorbed };
    Kind kind = Kind::BudgetExceeded;
    size_t at_step = 0;     // FixedPoint: first t with X(t+1) = X(t); Absorbed: absorption step
    size_t period = 0;      // Cycle
    size_t first_index = 0; // Cycle: first index of the repeated state
    size_t detected_at = 0; // step at which the repetition was seen
    Sink sink = Sink::None;
    std::vector<size_t> support_series;
};
const char* outcome_name(RunOutcome::Kind k);

template <class State>
struct Run {
    RunOutcome outcome;
    std::vector<State> trace;
};

Run<NodeSet> run_deterministic(const Network& net, const Rational& q, const NodeSet& X0, size_t budget);
Run<WindowConfig> run_deterministic(const Window& w, const Rational& q, const WindowConfig& X0, size_t budget);
Run<ConfigDescriptor> run_deterministic(const Network& net, const Rational& q, const ConfigDescriptor& X0, size_t budget);

struct AbsorbingWitness {
    NodeId node;
    size_t eta = 0;    // neighbors in X
    size_t degree = 0;
    bool in_X = false; // inner frontier when true, outer frontier otherwise
};

struct AbsorbingReport {
    bool absorbing = true;
    std::vector<AbsorbingWitness> violations;
};

AbsorbingReport is_absorbing_state(const Network& net, const NodeSet& X, const Rational& q);
AbsorbingReport is_absorbing_state(const Window& w, const WindowConfig& X, const Rational& q);

// X0, int^2 X0, int^4 X0, ..., ending with the empty set.
std::vector<NodeSet> extinction_schedule(const Network& net, const NodeSet& X0);

struct CardinalityBound {
    enum class Kind { Zero, FinOrZero, Inf };
    Kind kind = Kind::Zero;
    uint64_t max = 0; // FinOrZero upper bound
    bool admits(const Cardinality& c) const;
};

struct PredictedBlock {
    CardinalityBound even_inactive, even_active, odd_inactive, odd_active;
};

PredictedBlock one_step_cardinality(const Network& net, const ConfigDescriptor& config);

struct MonteCarloReport {
    std::vector<RunOutcome> runs;
    double freq_empty = 0, freq_full = 0, freq_two_cycle = 0;
    double mean_time_to_absorption = 0; // over absorbed runs
    size_t interval_violations = 0;
};

MonteCarloReport monte_carlo(const Network& net, const AggregationFunction& A, const ConfigDescriptor& initial,
                             size_t n_runs, size_t horizon, uint64_t seed, unsigned threads = 0);
MonteCarloReport monte_carlo(const Window& w, const AggregationFunction& A, const WindowConfig& initial,
                             size_t n_runs, size_t horizon, uint64_t seed, unsigned threads = 0);

constexpr size_t kDefaultHorizon = 1000;

} // namespace netdiff
