#include "netdiff/aggregation.hpp"

#include "netdiff/error.hpp"

#include <algorithm>
#include <numeric>

namespace netdiff {

namespace {

constexpr size_t kExhaustiveArityLimit = 20;

void check_arity(size_t l, size_t gamma) {
    if (l == 0 || l > gamma) {
        throw Error(ErrorKind::ArityExceeded, "arity " + std::to_string(l) + " outside 1.." + std::to_string(gamma));
    }
}

} // namespace

AggregationFunction AggregationFunction::threshold(Rational q, size_t gamma) {
    if (q.num <= 0) throw Error(ErrorKind::EndpointViolation, "threshold q must be positive so that A(0,...,0) = 0");
    if (Rational(1) < q) throw Error(ErrorKind::EndpointViolation, "threshold q above 1 gives A(1,...,1) = 0");
    AggregationFunction a;
    a.type_ = Type::Threshold;
    a.gamma_ = gamma;
    a.q_ = q;
    return a;
}

AggregationFunction AggregationFunction::proportion(size_t gamma) {
    AggregationFunction a;
    a.type_ = Type::Proportion;
    a.gamma_ = gamma;
    return a;
}

AggregationFunction AggregationFunction::table(size_t gamma, std::map<size_t, std::vector<double>> rows) {
    for (const auto& [l, row] : rows) {
        if (l == 0 || l > gamma) throw Error(ErrorKind::ArityExceeded, "table row for arity " + std::to_string(l));
        if (row.size() != l + 1) throw Error(ErrorKind::InvalidInput, "table row " + std::to_string(l) + " needs " + std::to_string(l + 1) + " entries");
        for (double v : row) {
            if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::InvalidInput, "table entries must lie in [0,1]");
        }
    }
    AggregationFunction a;
    a.type_ = Type::Table;
    a.gamma_ = gamma;
    a.rows_ = std::move(rows);
    return a;
}

AggregationFunction AggregationFunction::general(size_t gamma, std::function<double(const StatusVector&)> f, std::string name) {
    AggregationFunction a;
    a.type_ = Type::General;
    a.gamma_ = gamma;
    a.fn_ = std::move(f);
    a.name_ = std::move(name);
    return a;
}

AggregationFunction AggregationFunction::with_gamma(size_t gamma) const {
    AggregationFunction a = *this;
    a.gamma_ = gamma;
    return a;
}

std::string AggregationFunction::name() const {
    switch (type_) {
    case Type::Threshold: return "threshold:" + q_.str();
    case Type::Proportion: return "proportion";
    case Type::Table: return "table";
    case Type::General: return name_;
    }
    return "?";
}

double AggregationFunction::evaluate_count(size_t ones, size_t arity) const {
    check_arity(arity, gamma_);
    if (ones > arity) throw Error(ErrorKind::InvalidInput, "more ones than arity");
    switch (type_) {
    case Type::Threshold: return q_.at_most_ratio(static_cast<int64_t>(ones), static_cast<int64_t>(arity)) ? 1.0 : 0.0;
    case Type::Proportion: return static_cast<double>(ones) / static_cast<double>(arity);
    case Type::Table: {
        auto it = rows_.find(arity);
        if (it == rows_.end()) throw Error(ErrorKind::ArityExceeded, "no table row for arity " + std::to_string(arity));
        return it->second[ones];
    }
    case Type::General: break;
    }
    throw Error(ErrorKind::InvalidInput, "general aggregation functions are not anonymous");
}

double AggregationFunction::evaluate(const StatusVector& statuses) const {
    check_arity(statuses.size(), gamma_);
    if (type_ == Type::General) return fn_(statuses);
    size_t ones = static_cast<size_t>(std::count(statuses.begin(), statuses.end(), 1));
    return evaluate_count(ones, statuses.size());
}

const char* agg_kind_name(AggKind k) {
    switch (k) {
    case AggKind::Strict: return "Strict";
    case AggKind::Boolean: return "Boolean";
    case AggKind::Neither: return "Neither";
    }
    return "?";
}

AggClass classify(const AggregationFunction& A) {
    bool strict = true, boolean = true;
    auto note = [&](double v, bool all_zero, bool all_one, size_t l) {
        if (all_zero && v != 0.0) throw Error(ErrorKind::EndpointViolation, "A(0,...,0) != 0 at arity " + std::to_string(l));
        if (all_one && v != 1.0) throw Error(ErrorKind::EndpointViolation, "A(1,...,1) != 1 at arity " + std::to_string(l));
        if (v != 0.0 && v != 1.0) boolean = false;
        if ((v == 0.0 && !all_zero) || (v == 1.0 && !all_one)) strict = false;
    };
    std::vector<int> ell_r;
    for (size_t l = 1; l <= A.gamma(); ++l) {
        if (A.anonymous()) {
            if (A.type() == AggregationFunction::Type::Table && !A.rows().count(l)) continue;
            double prev = -1.0;
            for (size_t k = 0; k <= l; ++k) {
                double v = A.evaluate_count(k, l);
                if (v < prev) throw Error(ErrorKind::NotMonotone, "A decreases at arity " + std::to_string(l) + ", count " + std::to_string(k));
                prev = v;
                note(v, k == 0, k == l, l);
            }
        } else {
            if (l > kExhaustiveArityLimit) throw Error(ErrorKind::TooLarge, "exhaustive classification above arity 20");
            uint64_t total = uint64_t{1} << l;
            std::vector<double> values(total);
            for (uint64_t m = 0; m < total; ++m) {
                StatusVector v(l);
                for (size_t i = 0; i < l; ++i) v[i] = (m >> i) & 1;
                values[m] = A.evaluate(v);
                note(values[m], m == 0, m == total - 1, l);
            }
            for (uint64_t m = 0; m < total; ++m) {
                for (size_t i = 0; i < l; ++i) {
                    if (!((m >> i) & 1) && values[m | (uint64_t{1} << i)] < values[m]) {
                        throw Error(ErrorKind::NotMonotone, "A decreases when coordinate " + std::to_string(i) + " flips at arity " + std::to_string(l));
                    }
                }
            }
        }
    }
    AggClass c;
    if (strict) {
        c.kind = AggKind::Strict;
    } else if (boolean) {
        c.kind = AggKind::Boolean;
    } else {
        c.kind = AggKind::Neither;
        if (A.anonymous()) {
            size_t g = A.gamma();
            int ell = -1, first_one = static_cast<int>(g);
            for (size_t k = 0; k <= g; ++k) {
                double v = A.evaluate_count(k, g);
                if (v == 0.0) ell = static_cast<int>(k);
                if (v == 1.0 && first_one == static_cast<int>(g)) first_one = static_cast<int>(k);
            }
            c.ell = ell;
            c.r = static_cast<int>(g) - first_one;
        }
    }
    return c;
}

StatusVector neighbor_statuses(const Network& net, const ConfigDescriptor& config, const NodeId& x) {
    StatusVector v;
    for (const NodeId& y : net.neighbors(x)) v.push_back(config.status_of(y) == Status::Active ? 1 : 0);
    return v;
}

StatusVector neighbor_statuses(const Window& w, const WindowConfig& config, const NodeId& x) {
    if (!w.contains(x)) throw Error(ErrorKind::OutOfRegion, "node " + x.str() + " outside window");
    StatusVector v;
    for (const NodeId& y : w.base().neighbors(x)) v.push_back(config.active_at(y) ? 1 : 0);
    return v;
}

double activation_probability(const Network& net, const AggregationFunction& A, const ConfigDescriptor& config, const NodeId& x) {
    return A.evaluate(neighbor_statuses(net, config, x));
}

double activation_probability(const Window& w, const AggregationFunction& A, const WindowConfig& config, const NodeId& x) {
    return A.evaluate(neighbor_statuses(w, config, x));
}

} // namespace netdiff
