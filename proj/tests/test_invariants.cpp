#include "web4/errors.hpp"
#include "web4/invariants.hpp"

#include <doctest.h>

using namespace web4;
using Q = Rational;

namespace {

WebSpec web(const char* u1, const char* u2, const char* u3, const char* u4) {
    WebSpec s = WebSpec::potential(parse(u1), parse(u2), parse(u3), parse(u4));
    s.backend = Backend::rational;
    return s;
}

WebSpec synthetic(const char* u1, const char* u2, const char* u3, const char* a) {
    WebSpec s = WebSpec::synthetic(parse(u1), parse(u2), parse(u3), parse(a));
    s.backend = Backend::rational;
    return s;
}

const WebSpec kGeneric = web("x", "y", "x + y + x^2*y", "x + 2*y + x*y");
const WebSpec kPencils = web("y/x", "y/(x - 1)", "(y - 1)/x", "(y - 1)/(x - 1)");
const WebSpec kCurvedNW = synthetic("x", "y", "x + y + x^2*y", "2");

/// K_abc times this factor is the bracket shared with Theta_abc.
Q multiplier(Triple t, const Q& a) {
    switch (t) {
        case Triple::t123: return Q(1);
        case Triple::t124: return a;
        case Triple::t134: return a - 1;
        default: return a * (a - 1);
    }
}

}  // namespace

TEST_CASE("covariant derivative of a constant") {
    const auto f = build_coframe(kGeneric, Point<Q>{Q(1), Q(1)});
    const auto c = covariant_components(Jet<Q>::constant(Q(7), f.order()), 0, f);
    CHECK(is_zero(c.c1.value()));
    CHECK(is_zero(c.c2.value()));
}

TEST_CASE("a = 2 + x over the parallel three-web") {
    const auto inv = compute_invariants(synthetic("x", "y", "x + y", "2 + x"), Point<Q>{Q(1, 2), Q(1, 3)});
    CHECK(inv[Entry::a] == Q(5, 2));
    CHECK(inv[Entry::a1] == -1);
    CHECK(inv[Entry::a2] == 0);
    CHECK(inv[Entry::K] == 0);
}

TEST_CASE("a = 2 + x + y has equal first derivatives") {
    const auto inv = compute_invariants(synthetic("x", "y", "x + y", "2 + x + y"), Point<Q>{Q(1, 2), Q(1, 3)});
    CHECK(inv[Entry::a1] == -1);
    CHECK(inv[Entry::a2] == -1);
}

TEST_CASE("parallel web has a flat ladder") {
    const auto inv = compute_invariants(web("x", "y", "x + y", "2*x + y"), Point<Q>{Q(0), Q(0)});
    CHECK(inv[Entry::a] == 2);
    for (Entry e : kEntries) {
        if (e != Entry::a) CHECK(is_zero(inv[e]));
    }
    for (Triple t : kTriples) CHECK(is_zero(inv.Theta_of(t)));
}

TEST_CASE("four-pencil ladder at (2, 3)") {
    const auto inv = compute_invariants(kPencils, Point<Q>{Q(2), Q(3)});
    CHECK(inv[Entry::a] == Q(-1, 2));
    CHECK(inv[Entry::a1] == -1);
    CHECK(inv[Entry::a2] == 1);
    CHECK(inv[Entry::a11] == Q(-10, 3));
    CHECK(inv[Entry::a12] == 2);
    CHECK(inv[Entry::a22] == Q(2, 3));
    CHECK(inv[Entry::a111] == Q(-148, 9));
    CHECK(inv[Entry::a112] == Q(20, 3));
    CHECK(inv[Entry::a122] == Q(4, 3));
    CHECK(inv[Entry::a222] == Q(4, 9));
    CHECK(inv[Entry::K] == 0);
    for (Triple t : kTriples) CHECK(is_zero(inv.Theta_of(t)));
    CHECK(inv.surface == Q(-3, 32));
}

TEST_CASE("constant a over a curved three-web") {
    for (const auto& p : {Point<Q>{Q(1), Q(1)}, Point<Q>{Q(3, 4), Q(5, 4)}}) {
        const auto inv = compute_invariants(kCurvedNW, p);
        for (Entry e : kEntries) {
            if (e == Entry::a || e == Entry::K || e == Entry::K1 || e == Entry::K2) continue;
            CHECK(is_zero(inv[e]));
        }
        CHECK_FALSE(is_zero(inv[Entry::K]));
        for (Triple t : kTriples) {
            CHECK(inv.Theta_of(t) == inv.Theta_of(Triple::t123));
            CHECK(inv.K_of(t) * multiplier(t, inv[Entry::a]) == inv[Entry::K]);
        }
    }
}

TEST_CASE("both routes for a12 agree and the third-order routes differ by a_i K") {
    for (const auto& p : {Point<Q>{Q(1), Q(1)}, Point<Q>{Q(1, 2), Q(3, 2)}, Point<Q>{Q(5, 4), Q(2, 3)}}) {
        const auto inv = compute_invariants(kGeneric, p);
        CHECK(inv.routes.a12_from_a1 == inv.routes.a12_from_a2);
        CHECK(inv.routes.a112_from_a11 - inv.routes.a112_from_a12 == inv[Entry::a1] * inv[Entry::K]);
        CHECK(inv.routes.a122_from_a12 - inv.routes.a122_from_a22 == inv[Entry::a2] * inv[Entry::K]);
        CHECK_FALSE(is_zero(inv[Entry::K]));
    }
}

TEST_CASE("direct subweb curvature forms equal the closed forms") {
    for (const auto* s : {&kGeneric, &kPencils, &kCurvedNW}) {
        const Point<Q> p{Q(5, 4), Q(2, 3)};
        const auto f = build_coframe(*s, p);
        const auto inv = ladder(*s, f, p);
        for (Triple t : kTriples) {
            CHECK(subweb_curvature_direct(t, *s, f, p) == inv.Theta_of(t));
        }
        CHECK(subweb_curvature_direct(Triple::t123, *s, p) == inv.surface * inv[Entry::K]);
    }
}

TEST_CASE("curvature weights under a gauge change") {
    const Point<Q> p{Q(1), Q(1)};
    const auto f = build_coframe(kGeneric, p);
    const Expr s = parse("2 + x*y");
    const Q s0 = eval_scalar(s, p);
    const auto g = gauge_rescale(f, s, p);
    CHECK(g.K.value() == f.K.value() / (s0 * s0));
    const auto dk = covariant_components(f.K, 2, f);
    const auto dk2 = covariant_components(g.K, 2, g);
    CHECK(dk2.c1.value() == dk.c1.value() / (s0 * s0 * s0));
    CHECK(dk2.c2.value() == dk.c2.value() / (s0 * s0 * s0));
}

TEST_CASE("weights") {
    CHECK(weight(Entry::a) == 0);
    CHECK(weight(Entry::a2) == 1);
    CHECK(weight(Entry::K) == 2);
    CHECK(weight(Entry::a12) == 2);
    CHECK(weight(Entry::K1) == 3);
    CHECK(weight(Entry::a222) == 3);
}

TEST_CASE("the ladder needs order at least 5") {
    WebSpec s = kGeneric;
    s.order = 4;
    try {
        (void)compute_invariants(s, Point<Q>{Q(1), Q(1)});
        FAIL("expected an error");
    } catch (const WebError& e) {
        CHECK(e.kind() == ErrorKind::order_exhausted);
    }
}

TEST_CASE("float and rational ladders agree") {
    WebSpec fs = kGeneric;
    fs.backend = Backend::floating;
    const auto q = compute_invariants(kGeneric, Point<Q>{Q(3, 4), Q(5, 4)});
    const auto d = compute_invariants(fs, Point<double>{0.75, 1.25});
    for (Entry e : kEntries) {
        CHECK(d[e] == doctest::Approx(q[e].get_d()).epsilon(1e-9).scale(d.scale(e)));
    }
}
