#pragma once

#include "web4/errors.hpp"
#include "web4/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace web4 {

enum class Axis { x, y };

/// Unary functions a jet can be pushed through. Integer powers go through ipow().
enum class Function { exp, ln, sin, cos, sqrt };

std::string_view to_string(Function fn);

/// |constant term| at or below this fraction of the operand's largest
/// coefficient counts as a vanishing divisor on the floating backend.
inline constexpr double kDegenerateDivisorRatio = 1e-12;

/// Truncated bivariate Taylor expansion about a base point.
///
/// Coefficient (i, j) is the Taylor coefficient of x'^i y'^j, i.e. the partial
/// derivative d^{i+j}/dx^i dy^j divided by i! j!, where x', y' are offsets
/// from the base point. Storage is dense and graded by total degree, so a jet
/// of order N holds (N+1)(N+2)/2 coefficients and products are plain truncated
/// convolutions.
template <Scalar S>
class Jet {
public:
    Jet() : Jet(0) {}

    explicit Jet(int order) : order_(order), coeffs_(size_for(order), S(0)) {
        if (order < 0) {
            throw WebError(ErrorKind::order_exhausted, "jet order must be non-negative");
        }
    }

    static Jet constant(const S& value, int order) {
        Jet j(order);
        j.coeffs_[0] = value;
        return j;
    }

    /// Jet of the coordinate function x or y at the given base value.
    static Jet variable(Axis which, const S& base_value, int order) {
        Jet j = constant(base_value, order);
        if (order >= 1) {
            j.coeff(which == Axis::x ? 1 : 0, which == Axis::x ? 0 : 1) = S(1);
        }
        return j;
    }

    static constexpr std::size_t size_for(int order) {
        return static_cast<std::size_t>(order + 1) * static_cast<std::size_t>(order + 2) / 2;
    }

    static constexpr std::size_t index(int i, int j) {
        const auto n = static_cast<std::size_t>(i + j);
        return n * (n + 1) / 2 + static_cast<std::size_t>(j);
    }

    int order() const noexcept { return order_; }
    std::span<const S> coeffs() const noexcept { return coeffs_; }

    const S& coeff(int i, int j) const { return coeffs_[index(i, j)]; }
    S& coeff(int i, int j) { return coeffs_[index(i, j)]; }

    const S& value() const noexcept { return coeffs_[0]; }

    /// d^{i+j} f / dx^i dy^j at the base point.
    S derivative(int i, int j) const {
        S d = coeff(i, j);
        for (int k = 2; k <= i; ++k) d *= S(k);
        for (int k = 2; k <= j; ++k) d *= S(k);
        return d;
    }

    /// Largest coefficient magnitude; the reference scale for degeneracy tests.
    double scale() const {
        double m = 0.0;
        for (const auto& c : coeffs_) m = std::max(m, magnitude(c));
        return m;
    }

    Jet truncated(int order) const {
        if (order > order_) {
            throw WebError(ErrorKind::order_exhausted,
                           "cannot raise jet order from " + std::to_string(order_) + " to " +
                               std::to_string(order));
        }
        Jet r(order);
        std::copy_n(coeffs_.begin(), r.coeffs_.size(), r.coeffs_.begin());
        return r;
    }

    bool operator==(const Jet&) const = default;

    Jet operator-() const {
        Jet r = *this;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }

    Jet& operator+=(const Jet& o) {
        require_same_order(o);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
        return *this;
    }

    Jet& operator-=(const Jet& o) {
        require_same_order(o);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
        return *this;
    }

    Jet& operator*=(const S& s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }

    Jet& operator+=(const S& s) {
        coeffs_[0] += s;
        return *this;
    }

    Jet& operator-=(const S& s) {
        coeffs_[0] -= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, const S& s) { return a *= s; }
    friend Jet operator*(const S& s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, const S& s) { return a += s; }
    friend Jet operator+(const S& s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, const S& s) { return a -= s; }
    friend Jet operator-(const S& s, const Jet& a) { return (-a) += s; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        a.require_same_order(b);
        const int n = a.order_;
        Jet r(n);
        for (int deg = 0; deg <= n; ++deg) {
            for (int j = 0; j <= deg; ++j) {
                const int i = deg - j;
                S acc(0);
                for (int k = 0; k <= i; ++k) {
                    for (int l = 0; l <= j; ++l) {
                        acc += a.coeff(k, l) * b.coeff(i - k, j - l);
                    }
                }
                r.coeff(i, j) = acc;
            }
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        a.require_same_order(b);
        b.require_invertible();
        const int n = a.order_;
        const S& b0 = b.value();
        Jet q(n);
        // Graded order: every q(i-k, j-l) on the right is already known.
        for (int deg = 0; deg <= n; ++deg) {
            for (int j = 0; j <= deg; ++j) {
                const int i = deg - j;
                S acc = a.coeff(i, j);
                for (int k = 0; k <= i; ++k) {
                    for (int l = 0; l <= j; ++l) {
                        if (k == 0 && l == 0) continue;
                        acc -= b.coeff(k, l) * q.coeff(i - k, j - l);
                    }
                }
                q.coeff(i, j) = acc / b0;
            }
        }
        return q;
    }

    friend Jet operator/(Jet a, const S& s) {
        if (is_zero(s)) {
            throw WebError(ErrorKind::division_by_degenerate_jet, "division by zero scalar");
        }
        for (auto& c : a.coeffs_) c /= s;
        return a;
    }

    friend Jet operator/(const S& s, const Jet& b) { return constant(s, b.order_) / b; }

    /// True when the constant term is too small to divide by.
    bool is_degenerate_divisor() const {
        if constexpr (is_exact_v<S>) {
            return is_zero(value());
        } else {
            return magnitude(value()) <= kDegenerateDivisorRatio * scale();
        }
    }

private:
    void require_same_order(const Jet& o) const {
        if (o.order_ != order_) {
            throw WebError(ErrorKind::order_mismatch,
                           "jets of order " + std::to_string(order_) + " and " +
                               std::to_string(o.order_) + " combined");
        }
    }

    void require_invertible() const {
        if (is_degenerate_divisor()) {
            throw WebError(ErrorKind::division_by_degenerate_jet,
                           "jet divisor has vanishing constant term");
        }
    }

    int order_;
    std::vector<S> coeffs_;
};

/// Partial derivative; the result has order one less than the input.
template <Scalar S>
Jet<S> partial(const Jet<S>& a, Axis which) {
    if (a.order() == 0) {
        throw WebError(ErrorKind::order_exhausted,
                       "jet order exhausted: cannot differentiate an order-0 jet");
    }
    const int n = a.order() - 1;
    Jet<S> r(n);
    for (int deg = 0; deg <= n; ++deg) {
        for (int j = 0; j <= deg; ++j) {
            const int i = deg - j;
            if (which == Axis::x) {
                r.coeff(i, j) = S(i + 1) * a.coeff(i + 1, j);
            } else {
                r.coeff(i, j) = S(j + 1) * a.coeff(i, j + 1);
            }
        }
    }
    return r;
}

/// Integer power; negative exponents divide.
template <Scalar S>
Jet<S> ipow(const Jet<S>& base, long exponent) {
    if (exponent < 0) {
        return Jet<S>::constant(S(1), base.order()) / ipow(base, -exponent);
    }
    Jet<S> result = Jet<S>::constant(S(1), base.order());
    Jet<S> sq = base;
    while (exponent > 0) {
        if (exponent & 1) result = result * sq;
        exponent >>= 1;
        if (exponent > 0) sq = sq * sq;
    }
    return result;
}

namespace detail {

bool rational_sqrt(const Rational& v, Rational& root);

/// Taylor coefficients f^{(k)}(c)/k!, k = 0..n, of fn about c.
template <Scalar S>
std::vector<S> series_coefficients(Function fn, const S& c, int n) {
    std::vector<S> d(static_cast<std::size_t>(n) + 1);
    auto unsupported = [&] {
        throw WebError(ErrorKind::unsupported_on_exact_backend,
                       std::string(to_string(fn)) +
                           " has no exact series at this point on the rational backend");
    };
    bool positive;
    if constexpr (is_exact_v<S>) {
        positive = sgn(c) > 0;
    } else {
        positive = c > 0.0;
    }
    if ((fn == Function::ln || fn == Function::sqrt) && !positive) {
        throw WebError(ErrorKind::domain_error,
                       std::string(to_string(fn)) + " requires a strictly positive argument");
    }
    S fact(1);  // running k!
    switch (fn) {
        case Function::exp: {
            S e;
            if constexpr (is_exact_v<S>) {
                if (!is_zero(c)) unsupported();
                e = S(1);
            } else {
                e = std::exp(c);
            }
            for (int k = 0; k <= n; ++k) {
                if (k > 0) fact *= S(k);
                d[k] = e / fact;
            }
            break;
        }
        case Function::ln: {
            if constexpr (is_exact_v<S>) {
                if (c != 1) unsupported();
                d[0] = S(0);
            } else {
                d[0] = std::log(c);
            }
            S power = c;  // c^k
            for (int k = 1; k <= n; ++k) {
                const S sign = (k % 2 == 1) ? S(1) : S(-1);
                d[k] = sign / (S(k) * power);
                power *= c;
            }
            break;
        }
        case Function::sin:
        case Function::cos: {
            S s, co;
            if constexpr (is_exact_v<S>) {
                if (!is_zero(c)) unsupported();
                s = S(0);
                co = S(1);
            } else {
                s = std::sin(c);
                co = std::cos(c);
            }
            // Derivative cycle of sin: sin, cos, -sin, -cos. cos starts one step later.
            const S cycle[4] = {s, co, -s, -co};
            const int shift = fn == Function::sin ? 0 : 1;
            for (int k = 0; k <= n; ++k) {
                if (k > 0) fact *= S(k);
                d[k] = cycle[(k + shift) % 4] / fact;
            }
            break;
        }
        case Function::sqrt: {
            S root;
            if constexpr (is_exact_v<S>) {
                if (!rational_sqrt(c, root)) unsupported();
            } else {
                root = std::sqrt(c);
            }
            // sqrt(c + h) = sqrt(c) * sum binom(1/2, k) (h/c)^k
            S binom(1);
            S power(1);  // c^k
            for (int k = 0; k <= n; ++k) {
                if (k > 0) {
                    binom = binom * (S(1) / S(2) - S(k - 1)) / S(k);
                    power *= c;
                }
                d[k] = root * binom / power;
            }
            break;
        }
    }
    return d;
}

}  // namespace detail

/// f(g) as a jet: the Taylor series of f about g's constant term, composed
/// with the non-constant part of g and truncated at g's order.
template <Scalar S>
Jet<S> apply(Function fn, const Jet<S>& g) {
    const int n = g.order();
    const auto d = detail::series_coefficients(fn, g.value(), n);
    Jet<S> h = g;
    h.coeff(0, 0) = S(0);
    Jet<S> r = Jet<S>::constant(d[n], n);
    for (int k = n - 1; k >= 0; --k) {
        r = r * h;
        r.coeff(0, 0) += d[k];
    }
    return r;
}

}  // namespace web4
