#include "web4/expr.hpp"
#include "web4/jet.hpp"

#include <doctest.h>

#include <random>

using namespace web4;
using Q = Rational;
using JQ = Jet<Q>;
using JD = Jet<double>;

namespace {

JQ poly(std::initializer_list<std::tuple<int, int, Q>> terms, int order) {
    JQ j(order);
    for (const auto& [i, k, c] : terms) {
        if (i + k <= order) j.coeff(i, k) = c;
    }
    return j;
}

JQ random_jet(std::mt19937& rng, int order) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
    JQ j(order);
    for (int d = 0; d <= order; ++d) {
        for (int k = 0; k <= d; ++k) {
            Q c(num(rng), den(rng));
            c.canonicalize();
            j.coeff(d - k, k) = c;
        }
    }
    if (is_zero(j.value())) j.coeff(0, 0) = Q(1);
    return j;
}

}  // namespace

TEST_CASE("coordinate jets") {
    const auto x = JQ::variable(Axis::x, Q(2), 3);
    CHECK(x.coeff(0, 0) == 2);
    CHECK(x.coeff(1, 0) == 1);
    for (int d = 1; d <= 3; ++d) {
        for (int k = 0; k <= d; ++k) {
            if (d == 1 && k == 0) continue;
            CHECK(is_zero(x.coeff(d - k, k)));
        }
    }
    const auto y = JQ::variable(Axis::y, Q(0), 1);
    CHECK(y.coeff(0, 0) == 0);
    CHECK(y.coeff(0, 1) == 1);
    const auto x0 = JQ::variable(Axis::x, Q(5), 0);
    CHECK(x0.coeffs().size() == 1);
    CHECK(x0.value() == 5);
}

TEST_CASE("products truncate at the jet order") {
    const auto one_x = poly({{0, 0, Q(1)}, {1, 0, Q(1)}}, 2);
    const auto one_y = poly({{0, 0, Q(1)}, {0, 1, Q(1)}}, 2);
    CHECK(one_x * one_y == poly({{0, 0, Q(1)}, {1, 0, Q(1)}, {0, 1, Q(1)}, {1, 1, Q(1)}}, 2));
    const auto x = JQ::variable(Axis::x, Q(0), 1);
    CHECK(x * x == JQ(1));
    const auto s = poly({{0, 0, Q(1)}, {1, 0, Q(1)}, {0, 1, Q(1)}}, 3);
    CHECK(s * JQ::constant(Q(1), 3) == s);
}

TEST_CASE("division") {
    const auto g = JQ::constant(Q(1), 3) / poly({{0, 0, Q(1)}, {1, 0, Q(-1)}}, 3);
    CHECK(g == poly({{0, 0, Q(1)}, {1, 0, Q(1)}, {2, 0, Q(1)}, {3, 0, Q(1)}}, 3));
    const auto s = poly({{1, 0, Q(1)}, {0, 1, Q(1)}}, 3);
    CHECK(s / JQ::constant(Q(1), 3) == s);
    const auto t = poly({{0, 0, Q(1)}, {1, 0, Q(1)}}, 3);
    CHECK(t / t == JQ::constant(Q(1), 3));
}

TEST_CASE("division by a jet with zero constant term is rejected") {
    const auto x = JQ::variable(Axis::x, Q(0), 2);
    try {
        (void)(JQ::constant(Q(1), 2) / x);
        FAIL("expected an error");
    } catch (const WebError& e) {
        CHECK(e.kind() == ErrorKind::division_by_degenerate_jet);
    }
    const auto tiny = JD::constant(1e-20, 2) + JD::variable(Axis::x, 0.0, 2);
    CHECK_THROWS_AS((void)(JD::constant(1.0, 2) / tiny), WebError);
}

TEST_CASE("mixed orders are rejected") {
    CHECK_THROWS_AS((void)(JQ(2) + JQ(3)), WebError);
    CHECK_THROWS_AS((void)(JQ(2) * JQ(3)), WebError);
}

TEST_CASE("analytic functions") {
    CHECK(apply(Function::exp, JQ(2)) == JQ::constant(Q(1), 2));
    const auto ln = apply(Function::ln, poly({{0, 0, Q(1)}, {1, 0, Q(1)}}, 3));
    CHECK(ln == poly({{1, 0, Q(1)}, {2, 0, Q(-1, 2)}, {3, 0, Q(1, 3)}}, 3));
    CHECK(apply(Function::sqrt, JQ::constant(Q(4), 0)).value() == 2);
    CHECK(apply(Function::sin, JQ(3)) == JQ(3));
    CHECK(apply(Function::cos, JQ(3)).value() == 1);
}

TEST_CASE("transcendental values are unsupported on the exact backend") {
    try {
        (void)apply(Function::exp, JQ::constant(Q(1), 2));
        FAIL("expected an error");
    } catch (const WebError& e) {
        CHECK(e.kind() == ErrorKind::unsupported_on_exact_backend);
    }
    CHECK_THROWS_AS((void)apply(Function::sqrt, JQ::constant(Q(2), 2)), WebError);
}

TEST_CASE("logarithm and square root need a positive argument") {
    try {
        (void)apply(Function::ln, JD::constant(-1.0, 2));
        FAIL("expected an error");
    } catch (const WebError& e) {
        CHECK(e.kind() == ErrorKind::domain_error);
    }
    CHECK_THROWS_AS((void)apply(Function::sqrt, JD::constant(0.0, 2)), WebError);
}

TEST_CASE("partial derivatives") {
    const auto x = JQ::variable(Axis::x, Q(0), 2);
    const auto y = JQ::variable(Axis::y, Q(0), 2);
    CHECK(partial(x * x, Axis::x) == poly({{1, 0, Q(2)}}, 1));
    CHECK(partial(x, Axis::y) == JQ(1));
    CHECK(partial(x * y, Axis::x) == poly({{0, 1, Q(1)}}, 1));
    CHECK_THROWS_AS((void)partial(JQ(0), Axis::x), WebError);
}

TEST_CASE("ring identities on random rational jets") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 1 + trial % 6;
        const auto a = random_jet(rng, n), b = random_jet(rng, n), c = random_jet(rng, n);
        CHECK(a * b == b * a);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK((a / b) * b == a);
        if (n >= 2) CHECK(partial(partial(a, Axis::x), Axis::y) == partial(partial(a, Axis::y), Axis::x));
    }
}

TEST_CASE("ring identities on random float jets hold to rounding") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4;
        JD a(n), b(n), c(n);
        for (std::size_t k = 0; k < JD::size_for(n); ++k) {
            const int d = static_cast<int>((std::sqrt(8.0 * k + 1) - 1) / 2);
            const int j = static_cast<int>(k) - d * (d + 1) / 2;
            a.coeff(d - j, j) = u(rng);
            b.coeff(d - j, j) = u(rng);
            c.coeff(d - j, j) = u(rng);
        }
        b.coeff(0, 0) = 3.0;
        const auto lhs = (a * b) * c, rhs = a * (b * c);
        const auto q = (a / b) * b;
        for (std::size_t k = 0; k < lhs.coeffs().size(); ++k) {
            CHECK(lhs.coeffs()[k] == doctest::Approx(rhs.coeffs()[k]).epsilon(1e-12));
            CHECK(q.coeffs()[k] == doctest::Approx(a.coeffs()[k]).epsilon(1e-10));
        }
    }
}

TEST_CASE("integer powers") {
    const auto t = poly({{0, 0, Q(1)}, {1, 0, Q(1)}}, 4);
    CHECK(ipow(t, 3) == t * t * t);
    CHECK(ipow(t, -2) * ipow(t, 2) == JQ::constant(Q(1), 4));
    CHECK(ipow(t, 0) == JQ::constant(Q(1), 4));
}

TEST_CASE("truncation cannot raise the order") {
    CHECK(JQ(3).truncated(1).order() == 1);
    CHECK_THROWS_AS((void)JQ(1).truncated(2), WebError);
}
