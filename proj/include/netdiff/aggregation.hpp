#pragma once

#include "netdiff/configuration.hpp"
#include "netdiff/network.hpp"
#include "netdiff/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netdiff {

using StatusVector = std::vector<uint8_t>;

class AggregationFunction {
public:
    enum class Type { Threshold, Proportion, Table, General };

    // Value 1 iff the fraction of ones is at least q; q must be positive.
    static AggregationFunction threshold(Rational q, size_t gamma);
    static AggregationFunction proportion(size_t gamma);
    // rows[l] has l+1 entries indexed by the number of ones.
    static AggregationFunction table(size_t gamma, std::map<size_t, std::vector<double>> rows);
    static AggregationFunction general(size_t gamma, std::function<double(const StatusVector&)> f, std::string name = "general");

    double evaluate(const StatusVector& statuses) const;
    // Anonymous types only.
    double evaluate_count(size_t ones, size_t arity) const;

    Type type() const { return type_; }
    size_t gamma() const { return gamma_; }
    const Rational& q() const { return q_; }
    bool anonymous() const { return type_ != Type::General; }
    const std::map<size_t, std::vector<double>>& rows() const { return rows_; }
    std::string name() const;

    // Same function with a larger admissible arity (tables keep their rows).
    AggregationFunction with_gamma(size_t gamma) const;

private:
    AggregationFunction() = default;
    Type type_ = Type::Proportion;
    size_t gamma_ = 1;
    Rational q_;
    std::map<size_t, std::vector<double>> rows_;
    std::function<double(const StatusVector&)> fn_;
    std::string name_;
};

enum class AggKind { Strict, Boolean, Neither };
const char* agg_kind_name(AggKind k);

struct AggClass {
    AggKind kind = AggKind::Strict;
    std::optional<int> ell;
    std::optional<int> r;
};

AggClass classify(const AggregationFunction& A);

// Status vector of x's neighbors in canonical order.
StatusVector neighbor_statuses(const Network& net, const ConfigDescriptor& config, const NodeId& x);
StatusVector neighbor_statuses(const Window& w, const WindowConfig& config, const NodeId& x);

double activation_probability(const Network& net, const AggregationFunction& A, const ConfigDescriptor& config, const NodeId& x);
double activation_probability(const Window& w, const AggregationFunction& A, const WindowConfig& config, const NodeId& x);

} // namespace netdiff
