#pragma once

#include <cstdint>
#include <string>

namespace netdiff {

// Exact fraction num/den with den > 0, kept in lowest terms.
struct Rational {
    int64_t num = 0;
    int64_t den = 1;

    Rational() = default;
    Rational(int64_t n, int64_t d = 1);

    // Accepts "3/4", "1", "0.75".
    static Rational parse(const std::string& text);

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    // count/total >= *this, compared without rounding.
    bool at_most_ratio(int64_t count, int64_t total) const;

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend bool operator<(const Rational& a, const Rational& b);
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
};

} // namespace netdiff
