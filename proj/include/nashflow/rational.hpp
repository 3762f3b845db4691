#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace nashflow {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Optional rational where an empty value means +infinity. Used for storage
// capacities and extension step sizes.
using MaybeRat = std::optional<Rat>;

inline bool is_finite(const MaybeRat& v) { return v.has_value(); }

// Comparison treating nullopt as +infinity.
inline bool less_inf(const MaybeRat& a, const MaybeRat& b) {
    if (!b) return a.has_value();
    if (!a) return false;
    return *a < *b;
}

inline MaybeRat min_inf(const MaybeRat& a, const MaybeRat& b) {
    return less_inf(a, b) ? a : b;
}

// Canonical textual form: "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rat& v) {
    if (denominator(v) == 1) return numerator(v).str();
    return numerator(v).str() + "/" + denominator(v).str();
}

inline std::string to_string(const MaybeRat& v) {
    return v ? to_string(*v) : std::string("inf");
}

// Parses "p", "-p", or "p/q". Returns nullopt on malformed input; exactness is
// mandatory, so decimal notation is rejected.
inline std::optional<Rat> parse_rational(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto is_int = [](const std::string& t) {
        if (t.empty()) return false;
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') return false;
        return true;
    };
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            if (!is_int(s)) return std::nullopt;
            return Rat(BigInt(s));
        }
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) return std::nullopt;
        BigInt d(den);
        if (d == 0) return std::nullopt;
        return Rat(BigInt(num), d);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace nashflow
