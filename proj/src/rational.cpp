#include "netdiff/rational.hpp"

#include "netdiff/error.hpp"

#include <cmath>
#include <numeric>

namespace netdiff {

Rational::Rational(int64_t n, int64_t d) {
    if (d == 0) throw Error(ErrorKind::InvalidInput, "rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
        }
        auto dot = text.find('.');
        if (dot == std::string::npos) return Rational(std::stoll(text));
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        int64_t den = 1;
        for (size_t i = dot + 1; i < text.size(); ++i) den *= 10;
        return Rational(std::stoll(digits), den);
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidInput, "cannot parse rational '" + text + "'");
    }
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

bool Rational::at_most_ratio(int64_t count, int64_t total) const {
    // num/den <= count/total  <=>  num*total <= count*den  (total > 0)
    return static_cast<__int128>(num) * total <= static_cast<__int128>(count) * den;
}

bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

} // namespace netdiff
