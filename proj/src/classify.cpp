#include "web4/classify.hpp"

#include "web4/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

namespace web4 {

std::string_view name(Label l) {
    switch (l) {
        case Label::Parallelizable: return "Parallelizable";
        case Label::NW: return "NW";
        case Label::APW_1: return "APW_1";
        case Label::APW_2: return "APW_2";
        case Label::APW_3: return "APW_3";
        case Label::APW_4: return "APW_4";
        case Label::MW: return "MW";
        case Label::MW_1: return "MW_1";
        case Label::MW_2: return "MW_2";
        case Label::MW_3: return "MW_3";
        case Label::MW_4: return "MW_4";
        case Label::LinearizabilityConditionsHold: return "LinearizabilityConditionsHold";
        case Label::Generic: return "Generic";
    }
    return "?";
}

Label apw_label(int k) { return static_cast<Label>(static_cast<int>(Label::APW_1) + k - 1); }
Label mw_label(int k) { return static_cast<Label>(static_cast<int>(Label::MW_1) + k - 1); }

namespace {

/// Running sum that remembers the largest term.
template <Scalar S>
struct Sum {
    S value{0};
    double scale = 0.0;

    Sum& add(const S& term, double extra = 0.0) {
        value += term;
        scale = std::max({scale, magnitude(term), extra});
        return *this;
    }
    Residual<S> residual() const { return {value, scale}; }
};

template <Scalar S>
Residual<S> bare(const S& v, double scale) {
    return {v, std::max(scale, magnitude(v))};
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Shorthand for the ladder values used in the long identities below.
template <Scalar S>
struct Vars {
    S a, a1, a2, a11, a12, a22, a111, a112, a122, a222, K, K1, K2;
    double s11, s12, s22, s111, s112, s122, s222, sK, sK1, sK2;

    explicit Vars(const InvariantSet<S>& inv)
        : a(inv[Entry::a]), a1(inv[Entry::a1]), a2(inv[Entry::a2]), a11(inv[Entry::a11]),
          a12(inv[Entry::a12]), a22(inv[Entry::a22]), a111(inv[Entry::a111]),
          a112(inv[Entry::a112]), a122(inv[Entry::a122]), a222(inv[Entry::a222]),
          K(inv[Entry::K]), K1(inv[Entry::K1]), K2(inv[Entry::K2]),
          s11(inv.scale(Entry::a11)), s12(inv.scale(Entry::a12)), s22(inv.scale(Entry::a22)),
          s111(inv.scale(Entry::a111)), s112(inv.scale(Entry::a112)),
          s122(inv.scale(Entry::a122)), s222(inv.scale(Entry::a222)), sK(inv.scale(Entry::K)),
          sK1(inv.scale(Entry::K1)), sK2(inv.scale(Entry::K2)) {
        if (is_zero(a) || is_zero(S(a - 1))) {
            throw WebError(ErrorKind::inadmissible_invariant,
                           "identities need the basic invariant outside {0, 1}");
        }
    }
};

}  // namespace

template <Scalar S>
std::vector<std::pair<std::string, const Residual<S>*>> Residuals<S>::named() const {
    std::vector<std::pair<std::string, const Residual<S>*>> out = {
        {"lin1", &lin1},          {"lin2", &lin2},          {"mw11", &mw11},
        {"mw12", &mw12},          {"mw22", &mw22},          {"mw111", &mw3rd[0]},
        {"mw112", &mw3rd[1]},     {"mw122", &mw3rd[2]},     {"mw222", &mw3rd[3]},
        {"apw1", &apw[0]},        {"apw2", &apw[1]},        {"apw3", &apw[2]},
        {"apw4", &apw[3]},        {"K", &K},                {"K1", &K1},
        {"K2", &K2},              {"theta123", &theta[0]},  {"theta124", &theta[1]},
        {"theta134", &theta[2]},  {"theta234", &theta[3]},
    };
    return out;
}

template <Scalar S>
std::pair<Residual<S>, Residual<S>> linearizability_residuals(const InvariantSet<S>& inv) {
    const Vars<S> v(inv);
    const S& a = v.a;
    const S& a1 = v.a1;
    const S& a2 = v.a2;
    const S one(1);
    const S third = one / S(3);
    const S D = a - a * a;
    const S i1 = one / D;
    const S i2 = i1 * i1;
    const S i3 = i2 * i1;
    const S a_2 = a * a;
    const S a_3 = a_2 * a;
    const S a1_2 = a1 * a1;
    const S a2_2 = a2 * a2;
    auto m = [](const S& c) { return magnitude(c); };

    Sum<S> r1;
    r1.add(v.K1, v.sK1);
    {
        const S c0 = i1 * third * (a1 * (one - a) + a * a2);
        const S c1 = -i1;
        const S c2 = i1 * (2 + a);
        const S c3 = -i1 * 2 * a;
        const S c4 = i2 * ((4 - 6 * a) * a1 + (-2 + 3 * a + a_2) * a2);
        const S c5 = i2 * ((-6 + 7 * a + 2 * a_2) * a1 + (2 * a - 3 * a_2) * a2);
        const S c6 = i2 * (2 * a * (one - a) * a1 - 2 * a_2 * a2);
        r1.add(S(-c0 * v.K), m(c0) * v.sK);
        r1.add(S(-c1 * v.a111), m(c1) * v.s111);
        r1.add(S(-c2 * v.a112), m(c2) * v.s112);
        r1.add(S(-c3 * v.a122), m(c3) * v.s122);
        r1.add(S(-c4 * v.a11), m(c4) * v.s11);
        r1.add(S(-c5 * v.a12), m(c5) * v.s12);
        r1.add(S(-c6 * v.a22), m(c6) * v.s22);
        r1.add(S(-i3 * (-3 + 8 * a - 6 * a_2) * a1_2 * a1));
        r1.add(S(i3 * 2 * a_3 * a2_2 * a2));
        r1.add(S(-i3 * (6 - 15 * a + 9 * a_2 + 2 * a_3) * a1_2 * a2));
        r1.add(S(-i3 * (-2 * a + 6 * a_2 - 3 * a_3) * a1 * a2_2));
    }

    Sum<S> r2;
    r2.add(v.K2, v.sK2);
    {
        const S c0 = i1 * third * (a1 + a2 * (a - one));
        const S c1 = i1 * 2;
        const S c2 = -i1 * (2 * a + 1);
        const S c3 = i1 * a;
        const S c4 = i2 * (2 * a1 + (2 * a - 2) * a2);
        const S c5 = i2 * ((-5 + 6 * a) * a1 + (2 - 3 * a - 2 * a_2) * a2);
        const S c6 = i2 * ((1 - a - 2 * a_2) * a1 + 2 * a_2 * a2);
        r2.add(S(-c0 * v.K), m(c0) * v.sK);
        r2.add(S(-c1 * v.a112), m(c1) * v.s112);
        r2.add(S(-c2 * v.a122), m(c2) * v.s122);
        r2.add(S(-c3 * v.a222), m(c3) * v.s222);
        r2.add(S(-c4 * v.a11), m(c4) * v.s11);
        r2.add(S(-c5 * v.a12), m(c5) * v.s12);
        r2.add(S(-c6 * v.a22), m(c6) * v.s22);
        r2.add(S(-i3 * (4 * a - 2) * a1_2 * a1));
        r2.add(S(-i3 * a_3 * a2_2 * a2));
        r2.add(S(-i3 * (5 - 12 * a + 6 * a_2) * a1_2 * a2));
        r2.add(S(-i3 * (-2 + 5 * a - 3 * a_2 - 2 * a_3) * a1 * a2_2));
    }
    return {r1.residual(), r2.residual()};
}

template <Scalar S>
MwResiduals<S> mw_residuals(const InvariantSet<S>& inv) {
    const Vars<S> v(inv);
    const S& a = v.a;
    const S& a1 = v.a1;
    const S& a2 = v.a2;
    const S one(1);
    const S D = a - a * a;
    const S D2 = D * D;
    const S a_2 = a * a;
    const S a1_2 = a1 * a1;
    const S a2_2 = a2 * a2;

    MwResiduals<S> r;
    r.mw11 = Sum<S>{}
                 .add(v.a11, v.s11)
                 .add(S(-(one - 2 * a) * a1_2 / D))
                 .add(S(-a * a1 * a2 / D))
                 .residual();
    r.mw12 = Sum<S>{}.add(v.a12, v.s12).add(S(-a1 * a2 / a)).residual();
    r.mw22 = Sum<S>{}
                 .add(v.a22, v.s22)
                 .add(S(-a2 * a1 / D))
                 .add(S(a * a2_2 / D))
                 .residual();
    r.mw3rd[0] = Sum<S>{}
                     .add(v.a111, v.s111)
                     .add(S(-(6 * a_2 - 6 * a + 1) * a1_2 * a1 / D2))
                     .add(S(-(4 * a - 6 * a_2) * a1_2 * a2 / D2))
                     .add(S(-a_2 * a1 * a2_2 / D2))
                     .residual();
    r.mw3rd[1] = Sum<S>{}
                     .add(v.a112, v.s112)
                     .add(S(-(one - 2 * a) * (one - a) * a1_2 * a2 / D2))
                     .add(S(-a1 * a2_2 / D))
                     .residual();
    r.mw3rd[2] = Sum<S>{}
                     .add(v.a122, v.s122)
                     .add(S(-a1_2 * a2 / (a_2 * (one - a))))
                     .add(S(a * a1 * a2_2 / (a_2 * (one - a))))
                     .residual();
    r.mw3rd[3] = Sum<S>{}
                     .add(v.a222, v.s222)
                     .add(S(-a1_2 * a2 / D2))
                     .add(S(2 * a * a1 * a2_2 / D2))
                     .add(S(-a_2 * a2_2 * a2 / D2))
                     .residual();
    return r;
}

template <Scalar S>
Residuals<S> compute_residuals(const InvariantSet<S>& inv) {
    const Vars<S> v(inv);
    const S& a = v.a;
    const S& a1 = v.a1;
    const S& a2 = v.a2;
    const S one(1);
    const S D = a - a * a;

    Residuals<S> r;
    std::tie(r.lin1, r.lin2) = linearizability_residuals(inv);
    const auto mw = mw_residuals(inv);
    r.mw11 = mw.mw11;
    r.mw12 = mw.mw12;
    r.mw22 = mw.mw22;
    r.mw3rd = mw.mw3rd;

    // First-order relations share one reference magnitude so that a1 = 0 is
    // judged against the size of a2 and vice versa.
    const double A = std::max({magnitude(a1), magnitude(a2), magnitude(S(a * a2)),
                               inv.scale(Entry::a1), inv.scale(Entry::a2)});
    r.apw[0] = {a2, A};
    r.apw[1] = {a1, A};
    r.apw[2] = {S(a1 - a2), A};
    r.apw[3] = {S(a1 - a * a2), A};
    r.nw = {Residual<S>{a1, A}, Residual<S>{a2, A}};

    r.K = bare(v.K, v.sK);
    r.K1 = bare(v.K1, v.sK1);
    r.K2 = bare(v.K2, v.sK2);
    r.parallel = {r.K, r.nw[0], r.nw[1]};

    const double R2 = std::max({magnitude(v.a11), magnitude(v.a12), magnitude(v.a22), v.s11, v.s12,
                                v.s22, magnitude(S(a1 * a1)), magnitude(S(a2 * a2))});
    const double R3 = std::max({magnitude(v.a111), magnitude(v.a112), magnitude(v.a122),
                                magnitude(v.a222), v.s111, v.s112, v.s122, v.s222,
                                A * R2, A * A * A});
    r.higher = {Residual<S>{v.a11, R2},  Residual<S>{v.a12, R2},  Residual<S>{v.a22, R2},
                Residual<S>{v.a111, R3}, Residual<S>{v.a112, R3}, Residual<S>{v.a122, R3},
                Residual<S>{v.a222, R3}};

    for (std::size_t t = 0; t < 4; ++t) {
        r.theta[t] = {inv.Theta_sub[t], std::max(inv.Theta_scales[t], magnitude(inv.Theta_sub[t]))};
    }

    auto row = [&](const S& v11, const S& v12, const S& v22) {
        return std::array<Residual<S>, 3>{
            Sum<S>{}.add(v.a11, R2).add(S(-v11)).residual(),
            Sum<S>{}.add(v.a12, R2).add(S(-v12)).residual(),
            Sum<S>{}.add(v.a22, R2).add(S(-v22)).residual()};
    };
    const S zero(0);
    const std::array<std::array<Residual<S>, 3>, 4> second = {
        row(S((one - 2 * a) * a1 * a1 / D), zero, zero),
        row(zero, zero, S(-a2 * a2 / (one - a))),
        row(S(a1 * a1 / a), S(a1 * a1 / a), S(a1 * a1 / a)),
        row(S(2 * a * a2 * a2), S(a2 * a2), zero),
    };
    for (std::size_t k = 0; k < 4; ++k) {
        r.mw_rows[k] = {r.apw[k], second[k][0], second[k][1], second[k][2]};
    }
    return r;
}

template <Scalar S>
std::optional<int> apw_class(const Residuals<S>& r, double epsilon) {
    if (!vanishes(r.K, epsilon)) return std::nullopt;
    std::optional<int> found;
    int count = 0;
    for (int k = 0; k < 4; ++k) {
        if (vanishes(r.apw[k], epsilon)) {
            found = k + 1;
            ++count;
        }
    }
    // Two relations together force a1 = a2 = 0: constant a, not APW.
    return count == 1 ? found : std::nullopt;
}

template <Scalar S>
std::optional<int> apw_class(const InvariantSet<S>& inv, double epsilon) {
    return apw_class(compute_residuals(inv), epsilon);
}

template <Scalar S>
SubwebProfile subweb_vanishing_profile(const InvariantSet<S>& inv, double epsilon) {
    const auto r = compute_residuals(inv);
    SubwebProfile prof;
    for (std::size_t t = 0; t < 4; ++t) prof.vanishing[t] = vanishes(r.theta[t], epsilon);
    std::size_t pair = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j, ++pair) {
            const Residual<S> diff{S(inv.Theta_sub[i] - inv.Theta_sub[j]),
                                   std::max({r.theta[i].scale, r.theta[j].scale})};
            prof.equal[pair] = vanishes(diff, epsilon);
        }
    }
    prof.apw = apw_class(r, epsilon);
    if (!prof.apw) return prof;

    const Vars<S> v(inv);
    const S& a = v.a;
    const S one(1);
    const S D = a - a * a;
    std::array<bool, 4> must_vanish{};
    std::vector<std::pair<Triple, S>> expected;
    switch (*prof.apw) {
        case 1:
            must_vanish = {true, true, true, false};
            expected.emplace_back(Triple::t234,
                                  S(((one - 2 * a) * v.a1 * v.a1 - D * v.a11) / (D * D * D)));
            break;
        case 2:
            must_vanish = {true, true, false, true};
            expected.emplace_back(Triple::t134, S((v.a2 * v.a2 + (one - a) * v.a22) /
                                                  ((one - a) * (one - a) * (one - a))));
            break;
        case 3:
            must_vanish = {true, false, true, true};
            expected.emplace_back(Triple::t124, S((v.a1 * v.a1 - a * v.a11) / (a * a * a)));
            break;
        case 4:
            must_vanish = {true, false, false, false};
            expected.emplace_back(Triple::t124, S(-v.a22 / a));
            expected.emplace_back(Triple::t134, S(v.a22 / (one - a)));
            expected.emplace_back(Triple::t234, S(v.a22 / D));
            break;
    }
    for (std::size_t t = 0; t < 4; ++t) {
        if (must_vanish[t] && !prof.vanishing[t]) {
            prof.pattern_holds = false;
            prof.mismatches.push_back("theta" + std::string(name(kTriples[t])) + " should vanish");
        }
    }
    for (const auto& [triple, value] : expected) {
        const S& got = inv.K_of(triple);
        const auto t = static_cast<std::size_t>(triple);
        const std::array<S, 4> multiplier = {one, a, S(a - one), S(a * (a - one))};
        const double ks =
            r.theta[t].scale / (magnitude(inv.surface) * magnitude(multiplier[t]));
        const Residual<S> diff{S(got - value), std::max({ks, magnitude(got), magnitude(value)})};
        prof.max_expected_relative = std::max(prof.max_expected_relative, relative(diff));
        if (!vanishes(diff, epsilon)) {
            prof.pattern_holds = false;
            prof.mismatches.push_back("K" + std::string(name(triple)) +
                                      " differs from its APW closed form");
        }
    }
    return prof;
}

template <Scalar S>
void assign_labels(PointVerdict<S>& v, double eps) {
    const auto& r = v.residuals;
    auto& c = v.conditions;
    auto all = [&](auto first, auto last) {
        return std::all_of(first, last, [&](const Residual<S>& x) { return vanishes(x, eps); });
    };
    c.K_zero = vanishes(r.K, eps);
    c.K_derivatives_zero = vanishes(r.K1, eps) && vanishes(r.K2, eps);
    const bool first_zero = vanishes(r.nw[0], eps) && vanishes(r.nw[1], eps);
    c.nonconstant = !first_zero;
    c.ladder_zero = first_zero && all(r.higher.begin(), r.higher.end());
    c.theta_all_zero = all(r.theta.begin(), r.theta.end());
    c.mw_identities = vanishes(r.mw11, eps) && vanishes(r.mw12, eps) && vanishes(r.mw22, eps) &&
                      all(r.mw3rd.begin(), r.mw3rd.end());
    for (int k = 0; k < 4; ++k) {
        c.relation[k] = vanishes(r.apw[k], eps);
        c.mw_row[k] = c.K_zero && all(r.mw_rows[k].begin(), r.mw_rows[k].end());
    }
    c.lin = vanishes(r.lin1, eps) && vanishes(r.lin2, eps);

    LabelSet& L = v.labels;
    L.clear();
    if (c.ladder_zero) {
        L.insert(Label::NW);
        if (c.K_zero && c.K_derivatives_zero) L.insert(Label::Parallelizable);
    }
    const bool mw = c.nonconstant && c.K_zero && c.theta_all_zero && c.mw_identities;
    if (mw) L.insert(Label::MW);
    std::optional<int> apw;
    if (c.nonconstant && c.K_zero) {
        for (int k = 0; k < 4; ++k) {
            if (c.relation[k]) apw = k + 1;
        }
    }
    if (apw) L.insert(apw_label(*apw));
    for (int k = 1; k <= 4; ++k) {
        if (!c.nonconstant || !c.mw_row[k - 1]) continue;
        if (mw && apw == k) {
            L.insert(mw_label(k));
        } else {
            v.anomalies.push_back("MW_" + std::to_string(k) +
                                  " characterization holds without MW and APW_" +
                                  std::to_string(k));
        }
    }
    if (c.lin) {
        if (c.ladder_zero && !c.K_zero) {
            v.notes.push_back("linearizability residuals vanish at a critical point of K of a "
                              "web with constant basic invariant and K != 0; such a web is "
                              "linearizable only if parallelizable");
        } else {
            L.insert(Label::LinearizabilityConditionsHold);
        }
    }
    if (mw && !c.lin) {
        v.anomalies.push_back("MW identities hold but the linearizability residuals do not vanish");
    }
    if (L.empty()) L.insert(Label::Generic);
}

template <Scalar S>
PointVerdict<S> classify_point(const WebSpec& spec, const Point<S>& p) {
    PointVerdict<S> v;
    v.point = p;
    const auto gp = check_general_position(spec, p);
    if (!gp.failure.empty()) {
        v.skip_reason = gp.failure;
        return v;
    }
    if (const auto pairs = gp.coincident_pairs(); !pairs.empty()) {
        v.skip_reason = "general position violated: foliations " +
                        std::to_string(pairs.front().first) + "," +
                        std::to_string(pairs.front().second);
        return v;
    }
    if (!gp.a_nonzero || !gp.a_not_one) {
        v.skip_reason = "basic invariant a = " + (gp.a ? exact_string(*gp.a) : "?") +
                        " is inadmissible (0 or 1)";
        return v;
    }
    try {
        v.invariants = compute_invariants(spec, p);
        v.residuals = compute_residuals(*v.invariants);
        v.profile = subweb_vanishing_profile(*v.invariants, spec.epsilon);
    } catch (const WebError& e) {
        v.invariants.reset();
        v.skip_reason = std::string(to_string(e.kind())) + ": " + e.what();
        return v;
    }
    v.admissible = true;
    assign_labels(v, spec.epsilon);
    return v;
}

template <Scalar S>
std::vector<Point<S>> grid_points(const Domain& domain, const Grid& grid) {
    if (grid.nx < 1 || grid.ny < 1) {
        throw WebError(ErrorKind::invalid_spec, "grid dimensions must be positive");
    }
    const auto b = domain.bounds<S>();
    auto coord = [](const S& lo, const S& hi, int i, int n) -> S {
        if (n == 1) return S((lo + hi) / 2);
        return S(lo + (hi - lo) * S(i) / S(n - 1));
    };
    std::vector<Point<S>> pts;
    pts.reserve(static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny));
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            pts.push_back({coord(b[0], b[1], i, grid.nx), coord(b[2], b[3], j, grid.ny)});
        }
    }
    return pts;
}

template <Scalar S>
RegionReport<S> classify_region(const WebSpec& spec, const Grid& grid) {
    RegionReport<S> rep;
    rep.grid = grid;
    const auto pts = grid_points<S>(spec.domain, grid);
    rep.points.resize(pts.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < pts.size(); k = next++) {
            rep.points[k] = classify_point(spec, pts[k]);
        }
    };
    const std::size_t n_threads =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(pts.size(), 1));
    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    std::vector<const PointVerdict<S>*> ok;
    for (const auto& v : rep.points) {
        if (v.admissible) {
            ok.push_back(&v);
        } else {
            ++rep.skipped;
        }
    }
    if (ok.empty()) {
        throw WebError(ErrorKind::empty_admissible_set,
                       "no admissible grid point: general position or a outside {0,1} fails at "
                       "every sample");
    }

    auto every = [&](auto pred) { return std::all_of(ok.begin(), ok.end(), pred); };
    auto some = [&](auto pred) { return std::any_of(ok.begin(), ok.end(), pred); };
    auto has = [](Label l) { return [l](const PointVerdict<S>* v) { return v->labels.count(l) > 0; }; };

    const bool any_nonconstant = some([](const auto* v) { return v->conditions.nonconstant; });
    LabelSet& L = rep.labels;
    if (every(has(Label::Parallelizable))) L.insert(Label::Parallelizable);
    if (every(has(Label::NW))) L.insert(Label::NW);
    // A critical point of a looks constant on its own, so the nonconstancy
    // needed by MW and APW is judged over the whole sample.
    const bool mw = any_nonconstant && every([](const auto* v) {
                        const auto& c = v->conditions;
                        return c.K_zero && c.theta_all_zero && c.mw_identities;
                    });
    if (mw) L.insert(Label::MW);
    std::array<bool, 4> apw{};
    for (int k = 0; k < 4; ++k) {
        apw[k] = any_nonconstant && every([k](const auto* v) {
                     return v->conditions.K_zero && v->conditions.relation[k];
                 });
        if (apw[k]) L.insert(apw_label(k + 1));
        if (mw && apw[k] && every([k](const auto* v) { return v->conditions.mw_row[k]; })) {
            L.insert(mw_label(k + 1));
        }
    }
    if (every(has(Label::LinearizabilityConditionsHold))) {
        L.insert(Label::LinearizabilityConditionsHold);
    }
    if (L.empty()) L.insert(Label::Generic);

    for (const auto* v : ok) {
        for (const auto& [key, res] : v->residuals.named()) {
            auto& s = rep.residuals[key];
            s.max_abs = std::max(s.max_abs, magnitude(res->value));
            s.max_relative = std::max(s.max_relative, relative(*res));
        }
        rep.max_abs_K = std::max(rep.max_abs_K, magnitude((*v->invariants)[Entry::K]));
        for (const auto& a : v->anomalies) {
            rep.anomalies.push_back(a + " at (" + format_double(to_double(v->point.x)) + ", " +
                                    format_double(to_double(v->point.y)) + ")");
        }
    }
    if (L.count(Label::NW) && !L.count(Label::Parallelizable) &&
        some([](const auto* v) { return !v->conditions.K_zero; })) {
        rep.notes.push_back("basic invariant constant with K != 0 (max |K| = " +
                            format_double(rep.max_abs_K) +
                            "): such a web is linearizable only if parallelizable");
    }
    if (mw && !L.count(Label::LinearizabilityConditionsHold)) {
        rep.anomalies.push_back("region satisfies the MW identities but not the linearizability conditions");
    }
    if (rep.skipped > 0) {
        rep.notes.push_back(std::to_string(rep.skipped) +
                            " grid point(s) skipped as degenerate or inadmissible");
    }
    return rep;
}

#define WEB4_INSTANTIATE(S)                                                                        \
    template struct Residuals<S>;                                                                 \
    template std::pair<Residual<S>, Residual<S>> linearizability_residuals(const InvariantSet<S>&); \
    template MwResiduals<S> mw_residuals(const InvariantSet<S>&);                                 \
    template Residuals<S> compute_residuals(const InvariantSet<S>&);                              \
    template std::optional<int> apw_class(const Residuals<S>&, double);                           \
    template std::optional<int> apw_class(const InvariantSet<S>&, double);                        \
    template SubwebProfile subweb_vanishing_profile(const InvariantSet<S>&, double);              \
    template void assign_labels(PointVerdict<S>&, double);                                        \
    template PointVerdict<S> classify_point(const WebSpec&, const Point<S>&);                     \
    template std::vector<Point<S>> grid_points(const Domain&, const Grid&);                       \
    template RegionReport<S> classify_region(const WebSpec&, const Grid&);

WEB4_INSTANTIATE(double)
WEB4_INSTANTIATE(Rational)

#undef WEB4_INSTANTIATE

}  // namespace web4
