#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "orbispec/errors.hpp"

namespace orbispec {

// Exact scalars. cpp_rational keeps values in lowest terms with a positive
// denominator, which is exactly the representation contract used throughout:
// no rounding ever happens outside the explicitly floating-point layers.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer num(const Rational& r) { return numerator(r); }
inline Integer den(const Rational& r) { return denominator(r); }

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(const Integer& n) { return n.convert_to<double>(); }

// Serializes as "p/q", or just "p" when q == 1.
inline std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

inline std::string to_string(const Integer& n) {
    std::ostringstream os;
    os << n;
    return os.str();
}

inline Rational parse_rational(std::string_view text) {
    if (text.empty()) throw SchemaError("empty rational literal");
    std::string s(text);
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') ++pos;
    bool digits = false;
    for (; pos < s.size() && s[pos] != '/'; ++pos) {
        if (!std::isdigit(static_cast<unsigned char>(s[pos])))
            throw SchemaError("invalid rational literal '" + s + "'");
        digits = true;
    }
    if (!digits) throw SchemaError("invalid rational literal '" + s + "'");
    if (pos < s.size()) {
        // denominator part
        ++pos;
        if (pos >= s.size()) throw SchemaError("invalid rational literal '" + s + "'");
        bool dd = false;
        for (std::size_t i = pos; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i])))
                throw SchemaError("invalid rational literal '" + s + "'");
            dd = true;
        }
        if (!dd) throw SchemaError("invalid rational literal '" + s + "'");
        std::string denom = s.substr(pos);
        if (Integer(denom) == 0) throw SchemaError("zero denominator in '" + s + "'");
    }
    return Rational(s);
}

inline Integer floor_rational(const Rational& r) {
    Integer q = numerator(r) / denominator(r);
    if (numerator(r) < 0 && q * denominator(r) != numerator(r)) --q;
    return q;
}

inline Integer ceil_rational(const Rational& r) { return -floor_rational(-r); }

// Canonical representative in [0, 1).
inline Rational mod1(const Rational& r) {
    Rational out = r - Rational(floor_rational(r));
    return out;
}

// Largest n >= 0 with n*n <= x (x >= 0).
inline Integer isqrt(const Integer& x) {
    if (x < 0) throw InternalError("isqrt of negative integer");
    if (x == 0) return 0;
    using boost::multiprecision::sqrt;
    Integer r = sqrt(x);
    while (r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return r;
}

// floor(sqrt(x)) for rational x >= 0.
inline Integer floor_sqrt(const Rational& x) {
    if (x < 0) throw InternalError("floor_sqrt of negative rational");
    // floor(sqrt(p/q)) = floor(sqrt(p*q)/q); compute with integer sqrt and
    // correct the boundary exactly.
    Integer p = numerator(x), q = denominator(x);
    Integer s = isqrt(p * q);
    Integer r = s / q;
    while (Rational(Integer((r + 1) * (r + 1))) <= x) ++r;
    while (r > 0 && Rational(Integer(r * r)) > x) --r;
    return r;
}

// Exact square root when one exists.
inline std::optional<Rational> sqrt_exact(const Rational& x) {
    if (x < 0) return std::nullopt;
    Integer sn = isqrt(numerator(x));
    Integer sd = isqrt(denominator(x));
    if (sn * sn != numerator(x) || sd * sd != denominator(x)) return std::nullopt;
    return Rational(sn, sd);
}

// Binomial coefficient with the combinatorial convention: zero whenever
// k < 0 or k > n. n must be nonnegative.
inline Integer binomial(long n, long k) {
    if (n < 0) throw InternalError("binomial with negative upper argument");
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    Integer r = 1;
    for (long j = 1; j <= k; ++j) {
        r *= (n - k + j);
        r /= j;
    }
    return r;
}

inline Integer int_pow(Integer base, unsigned e) {
    Integer r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

} // namespace orbispec
