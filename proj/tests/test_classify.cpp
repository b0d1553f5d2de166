#include "web4/classify.hpp"
#include "web4/errors.hpp"
#include "web4/specfile.hpp"
#include "web4/verify.hpp"

#include <doctest.h>

using namespace web4;
using Q = Rational;

namespace {

SpecFile corpus(const char* name) { return load_spec_file(default_corpus_dir() / (std::string(name) + ".web")); }

WebSpec synthetic(const char* u1, const char* u2, const char* u3, const char* a, Backend b) {
    WebSpec s = WebSpec::synthetic(parse(u1), parse(u2), parse(u3), parse(a));
    s.backend = b;
    return s;
}

template <Scalar S>
void check_lattice(const PointVerdict<S>& v) {
    const auto has = [&](Label l) { return v.labels.count(l) > 0; };
    INFO(exact_string(v.point.x) << ", " << exact_string(v.point.y));
    if (has(Label::Parallelizable)) {
        CHECK(has(Label::NW));
        CHECK(has(Label::LinearizabilityConditionsHold));
    }
    if (has(Label::NW)) {
        CHECK_FALSE(has(Label::MW));
        for (int k = 1; k <= 4; ++k) CHECK_FALSE(has(apw_label(k)));
    }
    if (has(Label::MW)) CHECK(has(Label::LinearizabilityConditionsHold));
    int apw = 0;
    for (int k = 1; k <= 4; ++k) {
        if (has(apw_label(k))) ++apw;
        if (has(mw_label(k))) {
            CHECK(has(Label::MW));
            CHECK(has(apw_label(k)));
        }
        if (has(apw_label(k)) && has(Label::LinearizabilityConditionsHold)) CHECK(has(mw_label(k)));
    }
    CHECK(apw <= 1);
    if (has(Label::Generic)) CHECK(v.labels.size() == 1);
    CHECK(!v.labels.empty());
    CHECK(v.anomalies.empty());
}

}  // namespace

TEST_CASE("linearizability residuals of the parallel web vanish term by term") {
    const auto f = corpus("parallel");
    const auto inv = compute_invariants(f.spec, Point<Q>{Q(0), Q(0)});
    const auto [l1, l2] = linearizability_residuals(inv);
    CHECK(is_zero(l1.value));
    CHECK(is_zero(l2.value));
    for (Entry e : kEntries) {
        if (e != Entry::a) CHECK(is_zero(inv[e]));
    }
}

TEST_CASE("four-pencil web satisfies the MW identities") {
    auto f = corpus("pencils");
    f.spec.backend = Backend::floating;
    for (const auto& p : {Point<double>{2.0, 3.0}, Point<double>{1.6, 2.2}, Point<double>{2.7, 1.9},
                          Point<double>{3.0, 1.5}, Point<double>{1.75, 2.9}}) {
        const auto inv = compute_invariants(f.spec, p);
        const auto mw = mw_residuals(inv);
        CHECK(relative(mw.mw11) <= 1e-8);
        CHECK(relative(mw.mw12) <= 1e-8);
        CHECK(relative(mw.mw22) <= 1e-8);
        for (const auto& r : mw.mw3rd) CHECK(relative(r) <= 1e-8);
        const auto [l1, l2] = linearizability_residuals(inv);
        CHECK(relative(l1) <= 1e-7);
        CHECK(relative(l2) <= 1e-7);
    }
}

TEST_CASE("APW_1 affine web fails the first MW identity") {
    const auto s = synthetic("x", "y", "x + y", "2 + x", Backend::rational);
    const auto inv = compute_invariants(s, Point<Q>{Q(1, 2), Q(1, 2)});
    CHECK(inv[Entry::a11] == 0);
    const auto mw = mw_residuals(inv);
    const Q a = inv[Entry::a];
    CHECK(mw.mw11.value == -(1 - 2 * a) * inv[Entry::a1] * inv[Entry::a1] / (a - a * a));
    CHECK_FALSE(is_zero(mw.mw11.value));
}

TEST_CASE("constant a over a curved web: residuals are K1 and K2") {
    const auto f = corpus("nw_curved");
    const auto inv = compute_invariants(f.spec, Point<Q>{Q(1), Q(1)});
    const auto [l1, l2] = linearizability_residuals(inv);
    CHECK(l1.value == inv[Entry::K1]);
    CHECK(l2.value == inv[Entry::K2]);
    CHECK_FALSE(is_zero(l1.value));
}

TEST_CASE("APW class detection") {
    const Point<Q> p{Q(1, 2), Q(1, 3)};
    const auto one = compute_invariants(synthetic("x", "y", "x + y", "2 + x", Backend::rational), p);
    CHECK(apw_class(one, 1e-9) == 1);
    const auto three = compute_invariants(synthetic("x", "y", "x + y", "2 + x + y", Backend::rational), p);
    CHECK(apw_class(three, 1e-9) == 3);
    const auto two = compute_invariants(synthetic("x", "y", "x + y", "2 + y", Backend::rational), p);
    CHECK(apw_class(two, 1e-9) == 2);
    const auto nw = compute_invariants(synthetic("x", "y", "x + y", "2", Backend::rational), p);
    CHECK_FALSE(apw_class(nw, 1e-9).has_value());
}

TEST_CASE("subweb vanishing profiles") {
    const Point<Q> p{Q(1, 2), Q(1, 3)};
    const auto apw = subweb_vanishing_profile(
        compute_invariants(synthetic("x", "y", "x + y", "2 + x", Backend::rational), p), 1e-9);
    CHECK(apw.apw == 1);
    CHECK(apw.pattern_holds);
    CHECK(apw.vanishing[0]);
    CHECK(apw.vanishing[1]);
    CHECK(apw.vanishing[2]);
    CHECK_FALSE(apw.vanishing[3]);

    const auto mw = subweb_vanishing_profile(compute_invariants(corpus("pencils").spec, Point<Q>{Q(2), Q(3)}), 1e-9);
    for (bool v : mw.vanishing) CHECK(v);

    const auto nw = subweb_vanishing_profile(compute_invariants(corpus("nw_curved").spec, Point<Q>{Q(1), Q(1)}), 1e-9);
    for (bool v : nw.vanishing) CHECK_FALSE(v);
    for (bool e : nw.equal) CHECK(e);
}

TEST_CASE("point verdicts") {
    const auto par = classify_point(corpus("parallel").spec, Point<Q>{Q(0), Q(0)});
    CHECK(par.labels == LabelSet{Label::Parallelizable, Label::NW, Label::LinearizabilityConditionsHold});

    const auto logistic = classify_point(corpus("mw1_logistic").spec, Point<double>{0.3, 0.2});
    CHECK(logistic.labels ==
          LabelSet{Label::APW_1, Label::MW, Label::MW_1, Label::LinearizabilityConditionsHold});

    const auto affine = classify_point(corpus("apw1_affine").spec, Point<Q>{Q(1, 2), Q(1, 2)});
    CHECK(affine.labels == LabelSet{Label::APW_1});
    CHECK_FALSE(is_zero(affine.residuals.lin1.value));

    const auto generic = classify_point(corpus("generic").spec, Point<Q>{Q(1), Q(1)});
    CHECK(generic.labels == LabelSet{Label::Generic});
}

TEST_CASE("inadmissible points are skipped with a reason") {
    const auto pencils = corpus("pencils").spec;
    const auto v = classify_point(pencils, Point<Q>{Q(2), Q(2)});
    CHECK_FALSE(v.admissible);
    CHECK_FALSE(v.skip_reason.empty());
    const auto one = classify_point(synthetic("x", "y", "x + y", "1", Backend::rational), Point<Q>{Q(0), Q(0)});
    CHECK_FALSE(one.admissible);
}

TEST_CASE("region classification") {
    auto pencils = corpus("pencils");
    const auto region = classify_region<Q>(pencils.spec, Grid{10, 10});
    CHECK(region.labels.count(Label::MW));
    CHECK(region.skipped == 10);  // the diagonal y = x

    const auto par = corpus("parallel");
    const auto pr = classify_region<Q>(par.spec, Grid{3, 4});
    CHECK(pr.labels == LabelSet{Label::Parallelizable, Label::NW, Label::LinearizabilityConditionsHold});
    CHECK(pr.skipped == 0);
    CHECK(pr.points.size() == 12);

    const auto dup = corpus("duplicate");
    try {
        (void)classify_region<Q>(dup.spec, dup.grid);
        FAIL("expected an error");
    } catch (const WebError& e) {
        CHECK(e.kind() == ErrorKind::empty_admissible_set);
    }
}

TEST_CASE("region verdicts do not depend on evaluation order") {
    const auto f = corpus("apw1_perturbed");
    const auto a = classify_region<double>(f.spec, f.grid);
    const auto b = classify_region<double>(f.spec, f.grid);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        CHECK(a.points[k].point.x == b.points[k].point.x);
        CHECK(a.points[k].labels == b.points[k].labels);
        CHECK(a.points[k].residuals.lin1.value == b.points[k].residuals.lin1.value);
    }
    CHECK(a.labels == b.labels);
}

TEST_CASE("label implications hold across the corpus") {
    for (const char* name : {"parallel", "pencils", "mw1_logistic", "apw1_affine", "apw1_perturbed", "apw3_affine",
                             "nw_curved", "generic"}) {
        const auto f = corpus(name);
        INFO(name);
        if (f.spec.backend == Backend::rational) {
            for (const auto& v : classify_region<Q>(f.spec, f.grid).points) {
                if (v.admissible) check_lattice(v);
            }
        } else {
            for (const auto& v : classify_region<double>(f.spec, f.grid).points) {
                if (v.admissible) check_lattice(v);
            }
        }
    }
}

TEST_CASE("vanishing curvature forms go with MW_1 under perturbation of the logistic invariant") {
    // sigma(1.1 x) is again MW_1; the quadratic perturbation is only APW_1.
    const auto scaled = synthetic("x", "y", "x + y", "1/(1 + exp(-1.1*x))", Backend::floating);
    const auto perturbed = synthetic("x", "y", "x + y", "1/(1 + exp(-x - x^2/10))", Backend::floating);
    for (double x : {-1.5, -0.5, 0.4, 1.2}) {
        const Point<double> p{x, 0.3};
        const auto s = classify_point(scaled, p);
        CHECK(s.conditions.theta_all_zero);
        CHECK(s.labels.count(Label::MW_1));
        const auto q = classify_point(perturbed, p);
        CHECK_FALSE(q.conditions.theta_all_zero);
        CHECK_FALSE(q.labels.count(Label::MW_1));
        CHECK(q.labels.count(Label::APW_1));
    }
}

TEST_CASE("constant invariant: linearizability conditions hold exactly when K vanishes") {
    for (const char* name : {"nw_curved", "parallel"}) {
        const auto f = corpus(name);
        for (const auto& v : classify_region<Q>(f.spec, f.grid).points) {
            if (!v.admissible || !v.labels.count(Label::NW)) continue;
            const bool lch = v.labels.count(Label::LinearizabilityConditionsHold) > 0;
            CHECK(lch == v.conditions.K_zero);
            if (lch) CHECK(v.labels.count(Label::Parallelizable));
        }
    }
}

TEST_CASE("residuals carry their weights under a gauge change") {
    const auto f = corpus("generic");
    const Point<Q> p{Q(1), Q(3, 4)};
    const auto frame = build_coframe(f.spec, p);
    const Expr s = parse("1 + x^2 + y^2");
    const Q s0 = eval_scalar(s, p);
    const auto inv = ladder(f.spec, frame, p);
    const auto inv2 = ladder(f.spec, gauge_rescale(frame, s, p), p);
    const auto r = compute_residuals(inv), r2 = compute_residuals(inv2);
    CHECK(r2.lin1.value == r.lin1.value / (s0 * s0 * s0));
    CHECK(r2.lin2.value == r.lin2.value / (s0 * s0 * s0));
    CHECK(r2.mw11.value == r.mw11.value / (s0 * s0));
    CHECK(r2.mw12.value == r.mw12.value / (s0 * s0));
    CHECK(r2.mw22.value == r.mw22.value / (s0 * s0));
    PointVerdict<Q> a, b;
    a.residuals = r;
    b.residuals = r2;
    assign_labels(a, f.spec.epsilon);
    assign_labels(b, f.spec.epsilon);
    CHECK(a.labels == b.labels);
}

TEST_CASE("grid sampling") {
    const Domain d{"0", "1", "-1", "1"};
    const auto pts = grid_points<Q>(d, Grid{3, 2});
    REQUIRE(pts.size() == 6);
    CHECK(pts.front().x == 0);
    CHECK(pts.front().y == -1);
    CHECK(pts.back().x == 1);
    CHECK(pts.back().y == 1);
    const auto mid = grid_points<Q>(d, Grid{1, 1});
    REQUIRE(mid.size() == 1);
    CHECK(mid[0].x == Q(1, 2));
    CHECK(mid[0].y == 0);
}
