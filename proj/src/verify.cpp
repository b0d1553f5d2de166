#include "web4/verify.hpp"

#include "web4/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace web4 {

bool SuiteResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::size_t SuiteResult::failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
}

std::filesystem::path default_corpus_dir() {
    if (const char* env = std::getenv("WEB4_CORPUS_DIR"); env && *env) return env;
#ifdef WEB4_CORPUS_DIR
    return WEB4_CORPUS_DIR;
#else
    return "corpus";
#endif
}

VerifyOptions default_verify_options() {
    VerifyOptions o;
    o.corpus_dir = default_corpus_dir();
    return o;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "parallel",     "pencils",      "mw1-logistic", "apw1-affine", "nw-curved",
        "oracle-random", "gauge-random", "consistency",  "cross-ratio", "jets"};
    return names;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

template <Scalar S>
std::string where(const Point<S>& p) {
    return "(" + exact_string(p.x) + ", " + exact_string(p.y) + ")";
}

class Recorder {
public:
    explicit Recorder(std::string suite) { result_.suite = std::move(suite); }

    void check(const std::string& name, bool ok, double measure, const std::string& at,
               const std::string& detail = {}) {
        auto [it, inserted] = index_.emplace(name, result_.checks.size());
        if (inserted) {
            Check c;
            c.name = name;
            result_.checks.push_back(c);
        }
        Check& c = result_.checks[it->second];
        ++c.evaluations;
        if (measure > c.worst || c.worst_where.empty()) {
            c.worst = std::max(c.worst, measure);
            c.worst_where = at;
        }
        if (!ok && c.passed) {
            c.passed = false;
            c.failure = at + (detail.empty() ? "" : ": " + detail);
        }
    }

    void at_most(const std::string& name, double measure, double tol, const std::string& at) {
        check(name, measure <= tol, measure, at, "measured " + fmt(measure) + " > " + fmt(tol));
    }

    void at_least(const std::string& name, double measure, double bound, const std::string& at) {
        check(name, measure >= bound, measure, at, "measured " + fmt(measure) + " < " + fmt(bound));
    }

    /// Exact zero on rationals, |value| <= tol on doubles.
    template <Scalar S>
    void zero(const std::string& name, const S& value, double tol, const std::string& at) {
        if constexpr (is_exact_v<S>) {
            check(name, is_zero(value), magnitude(value), at, "value " + exact_string(value));
        } else {
            at_most(name, magnitude(value), tol, at);
        }
    }

    /// Exact equality on rationals, relative difference <= tol on doubles.
    template <Scalar S>
    void equal(const std::string& name, const S& got, const S& want, double scale, double tol,
               const std::string& at) {
        const double diff = magnitude(S(got - want));
        const double ref = std::max({magnitude(got), magnitude(want), scale});
        const double rel = diff == 0.0 ? 0.0 : (ref > 0.0 ? diff / ref : diff);
        if constexpr (is_exact_v<S>) {
            check(name, got == want, rel, at, exact_string(got) + " != " + exact_string(want));
        } else {
            check(name, rel <= tol, rel, at,
                  exact_string(got) + " vs " + exact_string(want) + " (relative " + fmt(rel) + ")");
        }
    }

    template <Scalar S>
    void residual(const std::string& name, const Residual<S>& r, double tol, const std::string& at) {
        const double rel = relative(r);
        if constexpr (is_exact_v<S>) {
            check(name, is_zero(r.value), rel, at, "value " + exact_string(r.value));
        } else {
            check(name, rel <= tol, rel, at, "relative " + fmt(rel) + " > " + fmt(tol));
        }
    }

    SuiteResult done() { return std::move(result_); }

private:
    SuiteResult result_;
    std::map<std::string, std::size_t> index_;
};

std::string tag(Backend b) { return "[" + std::string(to_string(b)) + "] "; }

template <Scalar S>
std::string tag() {
    return tag(backend_of_v<S>);
}

std::string labels_text(const LabelSet& l) {
    std::string s = "{";
    for (Label x : l) s += (s.size() > 1 ? ", " : "") + std::string(name(x));
    return s + "}";
}

SpecFile corpus(const VerifyOptions& o, const std::string& name) {
    return load_spec_file(o.corpus_dir / (name + ".web"));
}

SpecFile with_backend(SpecFile f, Backend b) {
    f.spec.backend = b;
    return f;
}

/// Runs fn with the scalar type matching the spec's backend.
template <class F>
void dispatch(const SpecFile& f, F&& fn) {
    if (f.spec.backend == Backend::rational) {
        fn.template operator()<Rational>();
    } else {
        fn.template operator()<double>();
    }
}

const std::vector<std::string> kCorpusWebs = {"parallel",    "pencils",        "mw1_logistic",
                                              "apw1_affine", "apw1_perturbed", "apw3_affine",
                                              "nw_curved",   "generic"};

// ---------------------------------------------------------------------------

template <Scalar S>
void parallel_checks(Recorder& R, const SpecFile& f) {
    const std::string t = tag<S>();
    const LabelSet expected = {Label::Parallelizable, Label::NW, Label::LinearizabilityConditionsHold};
    const auto region = classify_region<S>(f.spec, f.grid);
    R.check(t + "region labels {Parallelizable, NW, LinearizabilityConditionsHold}",
            region.labels == expected, 0.0, "region", labels_text(region.labels));
    R.check(t + "no skipped grid points", region.skipped == 0, static_cast<double>(region.skipped),
            "region");
    for (const auto& v : region.points) {
        const auto at = where(v.point);
        if (!v.admissible) continue;
        const auto& inv = *v.invariants;
        R.equal(t + "a = 2", inv[Entry::a], S(2), 0.0, 1e-12, at);
        for (Entry e : kEntries) {
            if (e == Entry::a) continue;
            R.zero(t + std::string(name(e)) + " = 0", inv[e], 1e-12, at);
        }
        R.zero(t + "lin1 = 0", v.residuals.lin1.value, 1e-12, at);
        R.zero(t + "lin2 = 0", v.residuals.lin2.value, 1e-12, at);
        R.check(t + "point labels {Parallelizable, NW, LinearizabilityConditionsHold}",
                v.labels == expected, 0.0, at, labels_text(v.labels));
        R.equal(t + "cross-ratio of tangents = 2", cross_ratio_tangents(f.spec, v.point), S(2), 0.0,
                1e-12, at);
    }

    const Point<S> p{S(0), S(0)};
    const auto frame = build_coframe(f.spec, p);
    R.equal(t + "gauge (g1, g2, g3) = (-1, -1, 1)", frame.gauge[0].value(), S(-1), 0.0, 0.0, "origin");
    R.equal(t + "gauge (g1, g2, g3) = (-1, -1, 1)", frame.gauge[1].value(), S(-1), 0.0, 0.0, "origin");
    R.equal(t + "gauge (g1, g2, g3) = (-1, -1, 1)", frame.gauge[2].value(), S(1), 0.0, 0.0, "origin");
    const int n = frame.order();
    const OneForm<S> dx{Jet<S>::constant(S(1), n), Jet<S>(n)};
    const auto [c1, c2] = to_omega_basis(dx, frame);
    R.equal(t + "dx = -omega1", c1.value(), S(-1), 0.0, 0.0, "origin");
    R.zero(t + "dx = -omega1", c2.value(), 0.0, "origin");
    R.zero(t + "theta = 0", frame.theta.P.value(), 0.0, "origin");
    R.zero(t + "theta = 0", frame.theta.Q.value(), 0.0, "origin");

    WebSpec one = WebSpec::synthetic(parse("x"), parse("y"), parse("x + y"), parse("1"));
    one.backend = backend_of_v<S>;
    const auto gp = check_general_position(one, p);
    R.check(t + "synthetic a = 1 is flagged inadmissible", !gp.a_not_one && !gp.admissible(), 0.0,
            "origin");
}

template <Scalar S>
void pencil_checks(Recorder& R, const SpecFile& f) {
    const std::string t = tag<S>();
    const auto region = classify_region<S>(f.spec, f.grid);
    R.check(t + "region labels include MW and LinearizabilityConditionsHold",
            region.labels.count(Label::MW) && region.labels.count(Label::LinearizabilityConditionsHold),
            0.0, "region", labels_text(region.labels));
    std::size_t diagonal = 0;
    for (const auto& v : region.points) {
        const auto at = where(v.point);
        const bool on_diagonal = v.point.x == v.point.y;
        diagonal += on_diagonal ? 1 : 0;
        R.check(t + "only the diagonal y = x is skipped", v.admissible != on_diagonal, 0.0, at,
                v.skip_reason);
        if (!v.admissible) continue;
        const auto& r = v.residuals;
        for (std::size_t k = 0; k < 4; ++k) {
            R.residual(t + "theta" + std::string(name(kTriples[k])) + " vanishes (<= 1e-8)", r.theta[k],
                       1e-8, at);
        }
        R.residual(t + "mw11 (<= 1e-7)", r.mw11, 1e-7, at);
        R.residual(t + "mw12 (<= 1e-7)", r.mw12, 1e-7, at);
        R.residual(t + "mw22 (<= 1e-7)", r.mw22, 1e-7, at);
        static const char* third[] = {"mw111", "mw112", "mw122", "mw222"};
        for (std::size_t k = 0; k < 4; ++k) {
            R.residual(t + third[k] + " (<= 1e-7)", r.mw3rd[k], 1e-7, at);
        }
        R.residual(t + "lin1 (<= 1e-7)", r.lin1, 1e-7, at);
        R.residual(t + "lin2 (<= 1e-7)", r.lin2, 1e-7, at);
        R.check(t + "point labels include MW", v.labels.count(Label::MW) > 0, 0.0, at,
                labels_text(v.labels));
    }
    R.check(t + "skipped count equals diagonal samples", region.skipped == diagonal,
            static_cast<double>(region.skipped), "region");
}

SuiteResult suite_parallel(const VerifyOptions& o) {
    Recorder R("parallel");
    const auto f = corpus(o, "parallel");
    parallel_checks<Rational>(R, with_backend(f, Backend::rational));
    parallel_checks<double>(R, with_backend(f, Backend::floating));
    return R.done();
}

SuiteResult suite_pencils(const VerifyOptions& o) {
    Recorder R("pencils");
    const auto f = corpus(o, "pencils");
    pencil_checks<Rational>(R, with_backend(f, Backend::rational));
    pencil_checks<double>(R, with_backend(f, Backend::floating));
    // Hand-checked values at (2, 3).
    const Point<Rational> p{Rational(2), Rational(3)};
    const auto inv = compute_invariants(f.spec, p);
    const std::vector<std::pair<Entry, Rational>> known = {
        {Entry::a, Rational(-1, 2)},   {Entry::a1, Rational(-1)},      {Entry::a2, Rational(1)},
        {Entry::a11, Rational(-10, 3)}, {Entry::a12, Rational(2)},     {Entry::a22, Rational(2, 3)},
        {Entry::a111, Rational(-148, 9)}, {Entry::a112, Rational(20, 3)}, {Entry::a122, Rational(4, 3)},
        {Entry::a222, Rational(4, 9)},  {Entry::K, Rational(0)}};
    for (const auto& [e, want] : known) {
        R.equal("[rational] " + std::string(name(e)) + " at (2, 3) matches hand computation", inv[e],
                want, 0.0, 0.0, "(2, 3)");
    }
    R.equal("[rational] basic invariant = cross-ratio at (2, 3)", inv[Entry::a],
            cross_ratio_tangents(f.spec, p), 0.0, 0.0, "(2, 3)");
    return R.done();
}

double sigma(double x) { return 1.0 / (1.0 + std::exp(-x)); }

SuiteResult suite_mw1_logistic(const VerifyOptions& o) {
    Recorder R("mw1-logistic");
    const auto f = corpus(o, "mw1_logistic");
    // The characterization row checked by hand first: sigma' = sigma(1 - sigma).
    for (double x : {-2.0, -1.0, 0.0, 0.5, 1.5}) {
        const std::string at = "x = " + fmt(x);
        const double s = sigma(x);
        const double s1 = s * (1 - s);
        const double s2 = s1 * (1 - 2 * s);
        const double D = s - s * s;
        R.equal("sigma'' = (1 - 2a) a1^2 / (a - a^2) with a1 = -sigma'", s2, (1 - 2 * s) * s1 * s1 / D,
                0.0, 1e-12, at);
        const Point<double> p{x, 0.25};
        const auto inv = compute_invariants(f.spec, p);
        R.equal("pipeline a1 = -sigma'", inv[Entry::a1], -s1, 0.0, 1e-10, at);
        R.equal("pipeline a11 = sigma''", inv[Entry::a11], s2, inv.scale(Entry::a11), 1e-10, at);
        R.zero("pipeline a2 = 0", inv[Entry::a2], 1e-12, at);
    }
    const auto region = classify_region<double>(f.spec, f.grid);
    for (Label l : {Label::APW_1, Label::MW, Label::MW_1, Label::LinearizabilityConditionsHold}) {
        R.check("region labels include " + std::string(name(l)), region.labels.count(l) > 0, 0.0,
                "region", labels_text(region.labels));
    }
    for (const auto& v : region.points) {
        if (!v.admissible) continue;
        const auto at = where(v.point);
        R.residual("lin1 (<= 1e-8)", v.residuals.lin1, 1e-8, at);
        R.residual("lin2 (<= 1e-8)", v.residuals.lin2, 1e-8, at);
    }

    // All four curvature forms vanish exactly when the MW_1 label is present.
    for (const char* web : {"mw1_logistic", "apw1_perturbed", "apw1_affine"}) {
        const auto g = corpus(o, web);
        dispatch(g, [&]<Scalar S>() {
            const auto reg = classify_region<S>(g.spec, g.grid);
            const bool expect_mw = std::string(web) == "mw1_logistic";
            for (const auto& v : reg.points) {
                if (!v.admissible) continue;
                const auto at = std::string(web) + " " + where(v.point);
                const bool all_vanish = v.conditions.theta_all_zero;
                const bool mw1 = v.labels.count(Label::MW_1) > 0;
                R.check("all curvature forms vanish <=> MW_1", all_vanish == mw1, 0.0, at,
                        "vanish=" + std::to_string(all_vanish) + " MW_1=" + std::to_string(mw1));
                R.check("MW_1 present exactly on the logistic web", mw1 == expect_mw, 0.0, at);
            }
        });
    }
    return R.done();
}

template <Scalar S>
void apw1_checks(Recorder& R, const SpecFile& f) {
    const std::string t = tag<S>();
    const double eps = f.spec.epsilon;
    const auto region = classify_region<S>(f.spec, f.grid);
    R.check(t + "region labels {APW_1}", region.labels == LabelSet{Label::APW_1}, 0.0, "region",
            labels_text(region.labels));
    for (const auto& v : region.points) {
        const auto at = where(v.point);
        R.check(t + "every point admissible", v.admissible, 0.0, at, v.skip_reason);
        if (!v.admissible) continue;
        R.check(t + "APW_1 present, MW and MW_1 absent",
                v.labels.count(Label::APW_1) && !v.labels.count(Label::MW) && !v.labels.count(Label::MW_1),
                0.0, at, labels_text(v.labels));
        const auto& r = v.residuals;
        R.at_least(t + "|mw11| >= 1e3 eps", magnitude(r.mw11.value), 1e3 * eps, at);
        R.at_least(t + "|lin1| >= 1e3 eps", magnitude(r.lin1.value), 1e3 * eps, at);
        R.at_least(t + "mw11 relative >= 1e3 eps", relative(r.mw11), 1e3 * eps, at);
        R.at_least(t + "lin1 relative >= 1e3 eps", relative(r.lin1), 1e3 * eps, at);
        for (std::size_t k = 0; k < 3; ++k) {
            R.residual(t + "theta" + std::string(name(kTriples[k])) + " = 0", r.theta[k], eps, at);
        }
        const auto& inv = *v.invariants;
        const S a = inv[Entry::a];
        const S D = a - a * a;
        const S expected = ((1 - 2 * a) * inv[Entry::a1] * inv[Entry::a1] - D * inv[Entry::a11]) / (D * D * D);
        R.equal(t + "K234 matches the APW_1 closed form (<= 1e-8)", inv.K_of(Triple::t234), expected,
                0.0, 1e-8, at);
        R.check(t + "subweb profile matches the APW_1 pattern",
                v.profile.apw == 1 && v.profile.pattern_holds, v.profile.max_expected_relative, at);
    }
}

SuiteResult suite_apw1_affine(const VerifyOptions& o) {
    Recorder R("apw1-affine");
    const auto f = corpus(o, "apw1_affine");
    apw1_checks<Rational>(R, with_backend(f, Backend::rational));
    apw1_checks<double>(R, with_backend(f, Backend::floating));
    // a = 2 + x gives a1 = -1, a2 = 0 in the canonical gauge.
    const auto inv = compute_invariants(f.spec, Point<Rational>{Rational(1, 2), Rational(1, 3)});
    R.equal("[rational] a1 = -1", inv[Entry::a1], Rational(-1), 0.0, 0.0, "(1/2, 1/3)");
    R.equal("[rational] a2 = 0", inv[Entry::a2], Rational(0), 0.0, 0.0, "(1/2, 1/3)");
    const auto g = corpus(o, "apw3_affine");
    const auto v = classify_point(g.spec, Point<Rational>{Rational(1, 2), Rational(1, 3)});
    R.check("[rational] a = 2 + x + y is APW_3", v.labels.count(Label::APW_3) > 0, 0.0, "(1/2, 1/3)",
            labels_text(v.labels));
    return R.done();
}

template <Scalar S>
void nw_checks(Recorder& R, const SpecFile& f) {
    const std::string t = tag<S>();
    const double eps = f.spec.epsilon;
    const auto region = classify_region<S>(f.spec, f.grid);
    R.check(t + "region labels {NW}", region.labels == LabelSet{Label::NW}, 0.0, "region",
            labels_text(region.labels));
    const bool note = std::any_of(region.notes.begin(), region.notes.end(), [](const std::string& n) {
        return n.find("linearizable only if parallelizable") != std::string::npos;
    });
    R.check(t + "region note on linearizability", note, 0.0, "region");
    for (const auto& v : region.points) {
        const auto at = where(v.point);
        R.check(t + "every point admissible", v.admissible, 0.0, at, v.skip_reason);
        if (!v.admissible) continue;
        const auto& inv = *v.invariants;
        for (Entry e : kEntries) {
            if (e == Entry::a || e == Entry::K || e == Entry::K1 || e == Entry::K2) continue;
            R.zero(t + "a-ladder entry " + std::string(name(e)) + " = 0", inv[e], 0.0, at);
        }
        R.check(t + "K != 0", !vanishes(v.residuals.K, eps), magnitude(inv[Entry::K]), at);
        for (std::size_t i = 0; i < 4; ++i) {
            R.check(t + "theta" + std::string(name(kTriples[i])) + " nonzero",
                    !vanishes(v.residuals.theta[i], eps), relative(v.residuals.theta[i]), at);
            for (std::size_t j = i + 1; j < 4; ++j) {
                R.equal(t + "curvature forms pairwise equal (<= 1e-9)", inv.Theta_sub[i],
                        inv.Theta_sub[j], std::max(inv.Theta_scales[i], inv.Theta_scales[j]), 1e-9, at);
            }
        }
        R.equal(t + "lin1 = K1", v.residuals.lin1.value, inv[Entry::K1], 0.0, 0.0, at);
        R.equal(t + "lin2 = K2", v.residuals.lin2.value, inv[Entry::K2], 0.0, 0.0, at);
        const bool lin_zero = vanishes(v.residuals.lin1, eps) && vanishes(v.residuals.lin2, eps);
        const bool k_derivs_zero = vanishes(v.residuals.K1, eps) && vanishes(v.residuals.K2, eps);
        R.check(t + "residuals vanish iff K1 = K2 = 0", lin_zero == k_derivs_zero, 0.0, at);
        R.check(t + "no point with vanishing residuals while K != 0",
                !(lin_zero && !vanishes(v.residuals.K, eps)), 0.0, at);
        R.check(t + "no LinearizabilityConditionsHold label",
                !v.labels.count(Label::LinearizabilityConditionsHold), 0.0, at);
    }
}

SuiteResult suite_nw_curved(const VerifyOptions& o) {
    Recorder R("nw-curved");
    const auto f = corpus(o, "nw_curved");
    nw_checks<Rational>(R, with_backend(f, Backend::rational));
    nw_checks<double>(R, with_backend(f, Backend::floating));
    return R.done();
}

// ---------------------------------------------------------------------------

/// Polynomial web near the parallel web (x, y, x + y, x - 2y) with small
/// random quadratic and cubic terms.
struct RandomWeb {
    std::array<std::string, 4> u;
    WebSpec spec;
};

RandomWeb random_web(std::mt19937& rng) {
    static const char* monomials[] = {"x^2", "x*y", "y^2", "x^3", "x^2*y", "x*y^2", "y^3"};
    static const char* linear[] = {"x", "y", "x + y", "x - 2*y"};
    std::uniform_int_distribution<int> num(-3, 3), den(1, 4), coin(0, 1);
    RandomWeb w;
    for (int k = 0; k < 4; ++k) {
        std::string s = linear[k];
        for (const char* m : monomials) {
            if (!coin(rng)) continue;
            const int n = num(rng);
            if (n == 0) continue;
            s += " + (" + std::to_string(n) + "/" + std::to_string(den(rng)) + ")*" + m;
        }
        w.u[static_cast<std::size_t>(k)] = s;
    }
    w.spec = WebSpec::potential(parse(w.u[0]), parse(w.u[1]), parse(w.u[2]), parse(w.u[3]));
    w.spec.backend = Backend::rational;
    return w;
}

/// Up to `count` admissible rational points near the origin.
std::vector<Point<Rational>> random_points(const WebSpec& spec, std::mt19937& rng, std::size_t count) {
    std::uniform_int_distribution<int> coord(-3, 3);
    std::vector<Point<Rational>> pts;
    for (int attempt = 0; attempt < 200 && pts.size() < count; ++attempt) {
        Point<Rational> p{Rational(coord(rng), 8), Rational(coord(rng), 8)};
        p.x.canonicalize();
        p.y.canonicalize();
        if (!check_general_position(spec, p).admissible()) continue;
        try {
            (void)build_coframe(spec, p);
        } catch (const WebError&) {
            continue;
        }
        pts.push_back(p);
    }
    return pts;
}

SuiteResult suite_oracle_random(const VerifyOptions& o) {
    Recorder R("oracle-random");
    std::mt19937 rng(o.seed);
    for (int web = 0; web < 20; ++web) {
        const auto w = random_web(rng);
        const auto pts = random_points(w.spec, rng, 5);
        const std::string id = "web " + std::to_string(web + 1);
        R.check("5 admissible points per web", pts.size() == 5, static_cast<double>(pts.size()), id,
                "u = (" + w.u[0] + "; " + w.u[1] + "; " + w.u[2] + "; " + w.u[3] + ")");
        for (const auto& p : pts) {
            const auto at = id + " " + where(p);
            const auto frame = build_coframe(w.spec, p);
            const auto inv = ladder(w.spec, frame, p);
            for (Triple t : kTriples) {
                const Rational direct = subweb_curvature_direct(t, w.spec, frame, p);
                R.equal("theta" + std::string(name(t)) + " direct = closed form", direct,
                        inv.Theta_of(t), 0.0, 0.0, at);
            }
        }
    }
    return R.done();
}

struct GaugeCase {
    const char* web;
    double x, y;
};

template <Scalar S>
void gauge_checks(Recorder& R, const SpecFile& f, const Point<S>& p, const std::string& gauge_text,
                  const std::string& label) {
    const std::string t = tag<S>();
    const auto frame = build_coframe(f.spec, p);
    const auto inv = ladder(f.spec, frame, p);
    const Expr s = parse(gauge_text);
    const auto rescaled = gauge_rescale(frame, s, p);
    const auto inv2 = ladder(f.spec, rescaled, p);
    const S s0 = eval_scalar(s, p);
    const std::string at = label + " s = " + gauge_text;

    R.equal(t + "a invariant (<= 1e-9)", inv2[Entry::a], inv[Entry::a], 0.0, 1e-9, at);
    for (std::size_t k = 0; k < 4; ++k) {
        R.equal(t + "theta" + std::string(name(kTriples[k])) + " invariant (<= 1e-9)", inv2.Theta_sub[k],
                inv.Theta_sub[k], inv.Theta_scales[k], 1e-9, at);
    }
    for (Entry e : kEntries) {
        const int w = weight(e);
        if (w == 0) continue;
        S factor(1);
        for (int k = 0; k < w; ++k) factor *= s0;
        const S want = inv[e] / factor;
        const double scale = std::max(inv.scale(e) / magnitude(factor), inv2.scale(e));
        R.equal(t + std::string(name(e)) + " scales by s^-" + std::to_string(w) + " (<= 1e-8)", inv2[e],
                want, scale, 1e-8, at);
    }
    const auto res = compute_residuals(inv);
    const auto res2 = compute_residuals(inv2);
    const S cube = s0 * s0 * s0;
    R.equal(t + "lin1 scales by s^-3 (<= 1e-8)", res2.lin1.value, S(res.lin1.value / cube),
            std::max(res.lin1.scale / magnitude(cube), res2.lin1.scale), 1e-8, at);
    R.equal(t + "lin2 scales by s^-3 (<= 1e-8)", res2.lin2.value, S(res.lin2.value / cube),
            std::max(res.lin2.scale / magnitude(cube), res2.lin2.scale), 1e-8, at);

    PointVerdict<S> before, after;
    before.invariants = inv;
    before.residuals = res;
    after.invariants = inv2;
    after.residuals = res2;
    assign_labels(before, f.spec.epsilon);
    assign_labels(after, f.spec.epsilon);
    R.check(t + "labels unchanged", before.labels == after.labels, 0.0, at,
            labels_text(before.labels) + " vs " + labels_text(after.labels));
}

SuiteResult suite_gauge_random(const VerifyOptions& o) {
    Recorder R("gauge-random");
    const std::vector<GaugeCase> cases = {{"pencils", 2.0, 2.5},
                                          {"generic", 1.0, 0.75},
                                          {"nw_curved", 1.0, 1.25},
                                          {"apw1_affine", 0.5, 0.25},
                                          {"mw1_logistic", 0.5, -0.25}};
    const std::vector<std::string> rational_gauges = {"1 + x^2 + y^2", "2 + x*y", "1/(3 + x - y)",
                                                      "(2 + x)^2*(1 + y^2)"};
    const std::string float_gauge = "exp(x/3 - y/5)";
    for (const auto& c : cases) {
        const auto f = corpus(o, c.web);
        const std::string label = std::string(c.web) + " (" + fmt(c.x) + ", " + fmt(c.y) + ")";
        const Point<double> pd{c.x, c.y};
        if (f.spec.backend == Backend::rational) {
            const Point<Rational> pr{rational_from_decimal(fmt(c.x)), rational_from_decimal(fmt(c.y))};
            for (const auto& g : rational_gauges) gauge_checks<Rational>(R, f, pr, g, label);
        } else {
            for (const auto& g : rational_gauges) gauge_checks<double>(R, f, pd, g, label);
        }
        gauge_checks<double>(R, with_backend(f, Backend::floating), pd, float_gauge, label);
    }
    return R.done();
}

// ---------------------------------------------------------------------------

template <Scalar S>
double max_coeff(const Jet<S>& j) {
    return j.scale();
}

template <Scalar S>
void consistency_checks(Recorder& R, const SpecFile& f, const std::string& web) {
    const std::string t = tag<S>();
    const double tol = 1e-9;
    for (const auto& p : grid_points<S>(f.spec.domain, f.grid)) {
        const auto at = web + " " + where(p);
        if (!check_general_position(f.spec, p).admissible()) continue;
        Coframe<S> frame;
        InvariantSet<S> inv;
        try {
            frame = build_coframe(f.spec, p);
            inv = ladder(f.spec, frame, p);
        } catch (const WebError& e) {
            R.check(t + "ladder evaluates at admissible points", false, 0.0, at, e.what());
            continue;
        }
        const auto& r = inv.routes;
        R.equal(t + "Cartan symmetry of a12", r.a12_from_a1, r.a12_from_a2,
                inv.scale(Entry::a12), tol, at);
        R.equal(t + "a112 routes differ by a1 K", S(r.a112_from_a11 - r.a112_from_a12),
                S(inv[Entry::a1] * inv[Entry::K]), inv.scale(Entry::a112), tol, at);
        R.equal(t + "a122 routes differ by a2 K", S(r.a122_from_a12 - r.a122_from_a22),
                S(inv[Entry::a2] * inv[Entry::K]), inv.scale(Entry::a122), tol, at);

        const auto sum = frame.omega[0] + frame.omega[1] + frame.omega[2];
        const double wscale = std::max({max_coeff(frame.omega[0].P), max_coeff(frame.omega[0].Q),
                                        max_coeff(frame.omega[1].P), max_coeff(frame.omega[1].Q)});
        R.at_most(t + "omega1 + omega2 + omega3 = 0",
                  std::max(max_coeff(sum.P), max_coeff(sum.Q)) / std::max(wscale, 1e-300),
                  is_exact_v<S> ? 0.0 : 1e-14, at);
        for (int k = 0; k < 3; ++k) {
            const Jet<S> d = exterior_derivative(frame.omega[k]);
            const Jet<S> w = wedge(frame.omega[k].truncated(d.order()), frame.theta.truncated(d.order()));
            const double ref = std::max({max_coeff(d), max_coeff(w), 1e-300});
            R.at_most(t + "d omega_" + std::to_string(k + 1) + " = omega_" + std::to_string(k + 1) +
                          " ^ theta",
                      max_coeff(Jet<S>(d - w)) / ref, is_exact_v<S> ? 0.0 : 1e-10, at);
        }
        const auto du = foliation_differentials(f.spec, p);
        const auto theta_g = connection_form_via_gauge(std::span<const OneForm<S>>(du.data(), 3), frame);
        const int m = std::min(theta_g.order(), frame.theta.order());
        const double ref = std::max({max_coeff(frame.theta.P), max_coeff(frame.theta.Q),
                                     max_coeff(frame.K) * wscale, 1e-300});
        const double diff = std::max(max_coeff(Jet<S>(theta_g.P.truncated(m) - frame.theta.P.truncated(m))),
                                     max_coeff(Jet<S>(theta_g.Q.truncated(m) - frame.theta.Q.truncated(m))));
        R.at_most(t + "theta from -d ln g agrees with the direct solve", diff / ref,
                  is_exact_v<S> ? 0.0 : 1e-10, at);
    }
}

SuiteResult suite_consistency(const VerifyOptions& o) {
    Recorder R("consistency");
    for (const auto& web : kCorpusWebs) {
        const auto f = corpus(o, web);
        dispatch(f, [&]<Scalar S>() { consistency_checks<S>(R, f, web); });
    }
    return R.done();
}

SuiteResult suite_cross_ratio(const VerifyOptions& o) {
    Recorder R("cross-ratio");
    for (const auto& web : kCorpusWebs) {
        const auto f = corpus(o, web);
        dispatch(f, [&]<Scalar S>() {
            const std::string t = tag<S>();
            for (const auto& p : grid_points<S>(f.spec.domain, f.grid)) {
                if (!check_general_position(f.spec, p).admissible()) continue;
                const auto at = web + " " + where(p);
                const auto frame = build_coframe(f.spec, p);
                const S a = basic_invariant(f.spec, frame, p).value();
                const S cr = cross_ratio_tangents(f.spec, p);
                R.equal(t + "basic invariant = cross-ratio of tangents (<= 1e-10)", a, cr, 0.0, 1e-10, at);
                R.check(t + "cross-ratio outside {0, 1}", !is_zero(cr) && !is_zero(S(cr - 1)),
                        magnitude(cr), at);
            }
        });
    }
    return R.done();
}

// ---------------------------------------------------------------------------

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Central-difference estimate of d^{i+j} e / dx^i dy^j with two Richardson
/// steps (steps h, h/2, h/4; error of order h^6).
double finite_difference(const Expr& e, double x0, double y0, int i, int j, double h) {
    auto stencil = [&](double step) {
        double acc = 0.0;
        for (int k = 0; k <= i; ++k) {
            for (int l = 0; l <= j; ++l) {
                const double w = ((k + l) % 2 ? -1.0 : 1.0) * binomial(i, k) * binomial(j, l);
                const Point<double> p{x0 + (i / 2.0 - k) * step, y0 + (j / 2.0 - l) * step};
                acc += w * eval_scalar(e, p);
            }
        }
        return acc / std::pow(step, i + j);
    };
    const double d0 = stencil(h), d1 = stencil(h / 2), d2 = stencil(h / 4);
    const double r0 = (4.0 * d1 - d0) / 3.0, r1 = (4.0 * d2 - d1) / 3.0;
    return (16.0 * r1 - r0) / 15.0;
}

SuiteResult suite_jets(const VerifyOptions&) {
    Recorder R("jets");
    const std::vector<std::string> smooth = {"exp(x)*sin(y)",      "ln(1 + x^2 + y^2)",
                                             "sqrt(2 + x*y)",      "cos(x - y)/(2 + x)",
                                             "(1 + x)^-3*y^2",     "1/(1 + exp(-x - 2*y))",
                                             "x^2*y/(1 + y^2)",    "sin(x*y) + exp(-y)*x^3"};
    const std::vector<std::pair<double, double>> bases = {{0.3, -0.2}, {0.7, 0.4}, {-0.5, 0.9}};
    const int order = 5;
    for (const auto& text : smooth) {
        const Expr e = parse(text);
        for (const auto& [x0, y0] : bases) {
            const auto jet = eval_jet(e, Point<double>{x0, y0}, order);
            const std::string at = text + " at (" + fmt(x0) + ", " + fmt(y0) + ")";
            for (int deg = 0; deg <= order - 2; ++deg) {
                double M = 0.0;
                for (int j = 0; j <= deg; ++j) M = std::max(M, std::fabs(jet.derivative(deg - j, j)));
                for (int j = 0; j <= deg; ++j) {
                    const int i = deg - j;
                    const double exact = jet.derivative(i, j);
                    const double fd = finite_difference(e, x0, y0, i, j, 0.04);
                    const double rel = std::fabs(fd - exact) / std::max({std::fabs(exact), 1e-2 * M, 1e-12});
                    R.at_most("derivative matches central differences (<= 1e-5)", rel, 1e-5,
                              at + " d" + std::to_string(i) + "," + std::to_string(j));
                }
            }
        }
    }

    const int n = 6;
    const Point<Rational> origin{Rational(0), Rational(0)};
    auto exact_series = [&](const std::string& name, const std::string& text, Point<Rational> base,
                            const std::function<Rational(int, int)>& coeff) {
        const auto jet = eval_jet(parse(text), base, n);
        for (int deg = 0; deg <= n; ++deg) {
            for (int j = 0; j <= deg; ++j) {
                const int i = deg - j;
                R.equal("[rational] " + name, jet.coeff(i, j), coeff(i, j), 0.0, 0.0,
                        "c" + std::to_string(i) + "," + std::to_string(j));
            }
        }
    };
    exact_series("1/(1 - x) is the geometric series", "1/(1 - x)", origin,
                 [](int, int j) { return Rational(j == 0 ? 1 : 0); });
    exact_series("1/(1 - x - y) has binomial coefficients", "1/(1 - x - y)", origin, [](int i, int j) {
        mpz_class c;
        mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(i + j), static_cast<unsigned long>(i));
        return Rational(c);
    });
    exact_series("ln(1 + x) = x - x^2/2 + x^3/3 - ...", "ln(1 + x)", origin, [](int i, int j) {
        if (j != 0 || i == 0) return Rational(0);
        Rational r(i % 2 ? 1 : -1, i);
        r.canonicalize();
        return r;
    });
    exact_series("ln(x) about x = 1", "ln(x)", Point<Rational>{Rational(1), Rational(0)},
                 [](int i, int j) {
                     if (j != 0 || i == 0) return Rational(0);
                     Rational r(i % 2 ? 1 : -1, i);
                     r.canonicalize();
                     return r;
                 });
    exact_series("exp(x + y) = sum x^i y^j / (i! j!)", "exp(x + y)", origin, [](int i, int j) {
        mpz_class fi, fj;
        mpz_fac_ui(fi.get_mpz_t(), static_cast<unsigned long>(i));
        mpz_fac_ui(fj.get_mpz_t(), static_cast<unsigned long>(j));
        return Rational(mpz_class(1), fi * fj);
    });

    const Point<Rational> q{Rational(1, 3), Rational(2, 5)};
    const auto num = eval_jet(parse("1 + x + y^2"), q, n);
    const auto den = eval_jet(parse("2 - x*y + x^3"), q, n);
    R.check("[rational] (a / b) * b reproduces a exactly", (num / den) * den == num, 0.0, "(1/3, 2/5)");
    return R.done();
}

}  // namespace

SuiteResult run_suite(std::string_view name, const VerifyOptions& options) {
    static const std::map<std::string, std::function<SuiteResult(const VerifyOptions&)>, std::less<>>
        suites = {
            {"parallel", suite_parallel},         {"pencils", suite_pencils},
            {"mw1-logistic", suite_mw1_logistic}, {"apw1-affine", suite_apw1_affine},
            {"nw-curved", suite_nw_curved},       {"oracle-random", suite_oracle_random},
            {"gauge-random", suite_gauge_random}, {"consistency", suite_consistency},
            {"cross-ratio", suite_cross_ratio},   {"jets", suite_jets},
        };
    const auto it = suites.find(name);
    if (it == suites.end()) {
        std::string known;
        for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
        throw std::invalid_argument("unknown suite '" + std::string(name) + "' (known: " + known + ")");
    }
    try {
        return it->second(options);
    } catch (const std::exception& e) {
        SuiteResult r;
        r.suite = std::string(name);
        r.checks.push_back(Check{"suite ran to completion", false, 1, 0.0, "", e.what()});
        return r;
    }
}

Json suite_json(const SuiteResult& result) {
    Json checks = Json::array();
    for (const auto& c : result.checks) {
        Json j = {{"name", c.name},   {"passed", c.passed}, {"evaluations", c.evaluations},
                  {"worst", c.worst}, {"worst_at", c.worst_where}};
        if (!c.passed) j["failure"] = c.failure;
        checks.push_back(j);
    }
    return {{"suite", result.suite}, {"passed", result.passed()}, {"failures", result.failures()},
            {"checks", checks}};
}

std::string suite_text(const SuiteResult& result) {
    std::ostringstream out;
    for (const auto& c : result.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << result.suite << ": " << c.name << "  [n=" << c.evaluations
            << ", worst=" << fmt(c.worst);
        if (!c.worst_where.empty()) out << " at " << c.worst_where;
        out << "]\n";
        if (!c.passed) out << "     first failure: " << c.failure << "\n";
    }
    out << (result.passed() ? "suite " + result.suite + ": PASS"
                            : "suite " + result.suite + ": FAIL (" + std::to_string(result.failures()) +
                                  " failing check(s))")
        << "\n";
    return out.str();
}

}  // namespace web4
