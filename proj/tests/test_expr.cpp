#include "web4/errors.hpp"
#include "web4/expr.hpp"

#include <doctest.h>

#include <random>

using namespace web4;
using Q = Rational;

namespace {

Expr var(Axis a) { return Expr::variable(a); }
Expr lit(const char* t) { return Expr::literal(t); }

/// Random AST over the whole node vocabulary.
Expr random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 8);
    static const char* literals[] = {"0", "1", "2", "3.5", "0.25", "10"};
    static const Function fns[] = {Function::exp, Function::ln, Function::sin, Function::cos, Function::sqrt};
    static const BinaryOp ops[] = {BinaryOp::add, BinaryOp::sub, BinaryOp::mul, BinaryOp::div};
    switch (pick(rng)) {
        case 0: return var(Axis::x);
        case 1: return var(Axis::y);
        case 2: return lit(literals[std::uniform_int_distribution<int>(0, 5)(rng)]);
        case 3: return Expr::negate(random_expr(rng, depth - 1));
        case 4: return Expr::power(random_expr(rng, depth - 1), std::uniform_int_distribution<long>(-3, 4)(rng));
        case 5: return Expr::call(fns[std::uniform_int_distribution<int>(0, 4)(rng)], random_expr(rng, depth - 1));
        default:
            return Expr::binary(ops[std::uniform_int_distribution<int>(0, 3)(rng)], random_expr(rng, depth - 1),
                                random_expr(rng, depth - 1));
    }
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
    CHECK(parse("x + y") == Expr::binary(BinaryOp::add, var(Axis::x), var(Axis::y)));
    CHECK(parse("(y - 1)/(x - 1)") ==
          Expr::binary(BinaryOp::div, Expr::binary(BinaryOp::sub, var(Axis::y), lit("1")),
                       Expr::binary(BinaryOp::sub, var(Axis::x), lit("1"))));
    CHECK(parse("1/(1 + exp(-x))") ==
          Expr::binary(BinaryOp::div, lit("1"),
                       Expr::binary(BinaryOp::add, lit("1"),
                                    Expr::call(Function::exp, Expr::negate(var(Axis::x))))));
}

TEST_CASE("precedence and associativity") {
    CHECK(parse("x+y*2") == parse("x+(y*2)"));
    CHECK(parse("-x^2") == Expr::negate(Expr::power(var(Axis::x), 2)));
    CHECK(parse("x - y - 1") == parse("(x - y) - 1"));
    CHECK(parse("x / y / 2") == parse("(x / y) / 2"));
}

TEST_CASE("exponent chains fold right to left") {
    CHECK(parse("2^3^2") == parse("2^9"));
    CHECK(eval_scalar(parse("2^3^2"), Point<Q>{Q(0), Q(0)}) == 512);
    CHECK(parse("x^2^2") == Expr::power(var(Axis::x), 4));
    CHECK(parse("x^-2") == Expr::power(var(Axis::x), -2));
}

TEST_CASE("exponents are capped at 4096") {
    CHECK_NOTHROW(parse("x^4096"));
    CHECK_THROWS_AS(parse("x^4097"), ParseError);
    CHECK_THROWS_AS(parse("x^2^13"), ParseError);
}

TEST_CASE("parse errors carry the byte offset") {
    try {
        (void)parse("x + z");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(parse("x +"), ParseError);
    CHECK_THROWS_AS(parse("(x"), ParseError);
    CHECK_THROWS_AS(parse("x y"), ParseError);
    CHECK_THROWS_AS(parse("tan(x)"), ParseError);
    CHECK_THROWS_AS(parse("x^y"), ParseError);
    CHECK_THROWS_AS(parse("x^1.5"), ParseError);
    CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("render round-trips generated trees") {
    std::mt19937 rng(3);
    for (int k = 0; k < 300; ++k) {
        const Expr e = random_expr(rng, 4);
        INFO(render(e));
        CHECK(parse(render(e)) == e);
    }
}

TEST_CASE("rational expressions are recognized") {
    CHECK(parse("(x^2 + y)/(3 - x*y)").is_rational());
    CHECK_FALSE(parse("1/(1 + exp(-x))").is_rational());
    CHECK_FALSE(parse("sqrt(4)").is_rational());
}

TEST_CASE("jet evaluation") {
    const auto j = eval_jet(parse("x*y"), Point<Q>{Q(2), Q(3)}, 1);
    CHECK(j.value() == 6);
    CHECK(j.coeff(1, 0) == 3);
    CHECK(j.coeff(0, 1) == 2);
    const auto s = eval_jet(parse("x + y"), Point<Q>{Q(0), Q(0)}, 2);
    CHECK(s.coeff(1, 0) == 1);
    CHECK(s.coeff(0, 1) == 1);
    CHECK(is_zero(s.coeff(2, 0)));
    const auto t = eval_jet(parse("x^2 + y^2"), Point<Q>{Q(1), Q(1)}, 2);
    CHECK(t.value() == 2);
    CHECK(t.coeff(1, 0) == 2);
    CHECK(t.coeff(0, 1) == 2);
    CHECK(t.coeff(2, 0) == 1);
    CHECK(t.coeff(0, 2) == 1);
    CHECK(is_zero(t.coeff(1, 1)));
}

TEST_CASE("scalar evaluation") {
    CHECK(eval_scalar(parse("x - y"), Point<Q>{Q(5), Q(2)}) == 3);
    CHECK(eval_scalar(parse("42"), Point<Q>{Q(-7), Q(1, 3)}) == 42);
    CHECK(eval_scalar(parse("ln(x)"), Point<Q>{Q(1), Q(0)}) == 0);
    CHECK(eval_scalar(parse("0.25*x"), Point<Q>{Q(2), Q(0)}) == Q(1, 2));
}

TEST_CASE("scalar evaluation equals the constant term of every jet") {
    std::mt19937 rng(5);
    const Point<double> p{0.4, 0.7};
    int evaluated = 0;
    for (int k = 0; k < 200; ++k) {
        const Expr e = random_expr(rng, 3);
        double v;
        try {
            v = eval_scalar(e, p);
        } catch (const WebError&) {
            continue;
        }
        ++evaluated;
        for (int n : {0, 1, 3, 6}) {
            CHECK(eval_jet(e, p, n).value() == v);
        }
    }
    CHECK(evaluated > 50);
}

TEST_CASE("exact backend rejects irrational values") {
    CHECK_THROWS_AS(eval_scalar(parse("exp(x)"), Point<Q>{Q(1), Q(0)}), WebError);
    CHECK(eval_scalar(parse("exp(x)"), Point<Q>{Q(0), Q(0)}) == 1);
    CHECK(eval_scalar(parse("sqrt(x)"), Point<Q>{Q(9, 4), Q(0)}) == Q(3, 2));
}
