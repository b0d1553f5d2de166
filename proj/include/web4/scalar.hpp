#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <string>
#include <string_view>

namespace web4 {

using Rational = mpq_class;

/// Which arithmetic carries a computation. Rational runs are exact, so every
/// zero test is an equality; floating runs use relative tolerances.
enum class Backend { rational, floating };

std::string_view to_string(Backend backend);
Backend backend_from_string(std::string_view text);

template <class S>
concept Scalar = std::same_as<S, double> || std::same_as<S, Rational>;

template <class S>
inline constexpr bool is_exact_v = std::same_as<S, Rational>;

template <class S>
inline constexpr Backend backend_of_v = is_exact_v<S> ? Backend::rational : Backend::floating;

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.get_d(); }

inline double magnitude(double v) { return std::fabs(v); }
inline double magnitude(const Rational& v) { return std::fabs(v.get_d()); }

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const Rational& v) { return sgn(v) == 0; }

/// Parses a decimal literal such as "12", "0.25" or "1.5e-3" exactly.
/// Throws std::invalid_argument on malformed text.
Rational rational_from_decimal(std::string_view text);

template <Scalar S>
S from_decimal(std::string_view text) {
    if constexpr (is_exact_v<S>) {
        return rational_from_decimal(text);
    } else {
        return rational_from_decimal(text).get_d();
    }
}

template <Scalar S>
S from_int(long v) {
    return S(v);
}

/// Exact representation where one exists ("3/4"), shortest round-trip decimal otherwise.
std::string exact_string(double v);
std::string exact_string(const Rational& v);

}  // namespace web4
