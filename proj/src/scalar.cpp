#include "web4/errors.hpp"
#include "web4/jet.hpp"
#include "web4/scalar.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace web4 {

std::string_view to_string(Backend backend) {
    return backend == Backend::rational ? "rational" : "float";
}

Backend backend_from_string(std::string_view text) {
    if (text == "rational") return Backend::rational;
    if (text == "float") return Backend::floating;
    throw std::invalid_argument("unknown backend '" + std::string(text) +
                                "' (expected rational or float)");
}

Rational rational_from_decimal(std::string_view text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) {
        throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
    long exponent = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        const char* first = text.data() + pos;
        const char* last = text.data() + text.size();
        if (first != last && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, exponent);
        if (ec != std::errc{} || ptr == first) {
            throw std::invalid_argument("malformed exponent in '" + std::string(text) + "'");
        }
        pos = static_cast<std::size_t>(ptr - text.data());
    }
    if (pos != text.size()) {
        throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
    mpz_class mantissa(digits, 10);
    const long shift = exponent - frac_digits;
    mpz_class ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    Rational r = shift >= 0 ? Rational(mantissa * ten_pow) : Rational(mantissa, ten_pow);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

std::string exact_string(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string exact_string(const Rational& v) { return v.get_str(); }

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::division_by_degenerate_jet: return "DivisionByDegenerateJet";
        case ErrorKind::domain_error: return "DomainError";
        case ErrorKind::unsupported_on_exact_backend: return "UnsupportedOnExactBackend";
        case ErrorKind::order_exhausted: return "OrderExhausted";
        case ErrorKind::order_mismatch: return "OrderMismatch";
        case ErrorKind::degenerate_web_point: return "DegenerateWebPoint";
        case ErrorKind::inadmissible_invariant: return "InadmissibleInvariant";
        case ErrorKind::consistency_failure: return "ConsistencyFailure";
        case ErrorKind::empty_admissible_set: return "EmptyAdmissibleSet";
        case ErrorKind::invalid_spec: return "InvalidSpec";
    }
    return "Unknown";
}

ParseError::ParseError(std::size_t offset, std::string expected, std::string found)
    : std::runtime_error("parse error at offset " + std::to_string(offset) + ": expected " +
                         expected + ", found " + found),
      offset_(offset),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

std::string_view to_string(Function fn) {
    switch (fn) {
        case Function::exp: return "exp";
        case Function::ln: return "ln";
        case Function::sin: return "sin";
        case Function::cos: return "cos";
        case Function::sqrt: return "sqrt";
    }
    return "?";
}

namespace detail {

bool rational_sqrt(const Rational& v, Rational& root) {
    if (sgn(v) < 0) return false;
    const mpz_class& num = v.get_num();
    const mpz_class& den = v.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) {
        return false;
    }
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    root = Rational(rn, rd);
    root.canonicalize();
    return true;
}

}  // namespace detail

}  // namespace web4
