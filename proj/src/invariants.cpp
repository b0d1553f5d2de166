#include "web4/invariants.hpp"

#include "web4/errors.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

namespace web4 {

std::string_view name(Entry e) {
    static constexpr std::array<std::string_view, kEntryCount> names = {
        "a", "a1", "a2", "a11", "a12", "a22", "a111", "a112", "a122", "a222", "K", "K1", "K2"};
    return names[static_cast<std::size_t>(e)];
}

int weight(Entry e) {
    switch (e) {
        case Entry::a: return 0;
        case Entry::a1:
        case Entry::a2: return 1;
        case Entry::a11:
        case Entry::a12:
        case Entry::a22:
        case Entry::K: return 2;
        default: return 3;
    }
}

std::string_view name(Triple t) {
    static constexpr std::array<std::string_view, 4> names = {"123", "124", "134", "234"};
    return names[static_cast<std::size_t>(t)];
}

namespace {

double max_magnitude(std::initializer_list<double> xs) { return std::max(xs); }

/// Merges two extraction routes of the same quantity.
template <Scalar S>
S reconcile(const S& r1, const S& r2, double scale, const char* what) {
    if constexpr (is_exact_v<S>) {
        if (r1 != r2) {
            throw WebError(ErrorKind::consistency_failure,
                           std::string(what) + ": routes disagree (" + exact_string(r1) + " vs " +
                               exact_string(r2) + ")");
        }
        return r1;
    } else {
        const double ref = std::max({scale, std::fabs(r1), std::fabs(r2)});
        if (std::fabs(r1 - r2) > kConsistencyTolerance * ref) {
            throw WebError(ErrorKind::consistency_failure,
                           std::string(what) + ": routes disagree (" + exact_string(r1) + " vs " +
                               exact_string(r2) + ")");
        }
        return (r1 + r2) / 2.0;
    }
}

}  // namespace

template <Scalar S>
double frame_rate(const Coframe<S>& frame) {
    const double p1 = to_double(frame.omega[0].P.value()), q1 = to_double(frame.omega[0].Q.value());
    const double p2 = to_double(frame.omega[1].P.value()), q2 = to_double(frame.omega[1].Q.value());
    const double det = std::fabs(p1 * q2 - q1 * p2);
    if (det == 0.0) return 0.0;
    const double tp = to_double(frame.theta.P.value()), tq = to_double(frame.theta.Q.value());
    const double inverse = std::max({std::fabs(p1), std::fabs(q1), std::fabs(p2), std::fabs(q2)}) / det;
    return std::max(inverse, (std::fabs(q2 * tp - p2 * tq) + std::fabs(p1 * tq - q1 * tp)) / det);
}

template <Scalar S>
Covariant<S> covariant_components(const Jet<S>& u, int weight, const Coframe<S>& frame,
                                  double input_scale) {
    const Jet<S> du_x = partial(u, Axis::x);
    const Jet<S> du_y = partial(u, Axis::y);
    const int m = du_x.order();
    const OneForm<S> du{du_x, du_y};
    auto [c1, c2] = to_omega_basis(du, frame);
    double scale = std::max(magnitude(c1.value()), magnitude(c2.value()));
    if (weight != 0) {
        const int n = std::min(m, frame.theta.order());
        const Jet<S> ku = u.truncated(n) * S(weight);
        const OneForm<S> correction{ku * frame.theta.P.truncated(n), ku * frame.theta.Q.truncated(n)};
        auto [t1, t2] = to_omega_basis(correction, frame);
        scale = std::max({scale, magnitude(t1.value()), magnitude(t2.value())});
        c1 = c1.truncated(t1.order()) - t1;
        c2 = c2.truncated(t2.order()) - t2;
    }
    if (input_scale > 0.0) scale = std::max(scale, input_scale * frame_rate(frame));
    return {std::move(c1), std::move(c2), scale};
}

template <Scalar S>
SubwebCurvature<S> subweb_curvature_closed(Triple which, const InvariantSet<S>& inv) {
    const S& a = inv[Entry::a];
    const S& a1 = inv[Entry::a1];
    const S& a2 = inv[Entry::a2];
    const S& a11 = inv[Entry::a11];
    const S& a12 = inv[Entry::a12];
    const S& a22 = inv[Entry::a22];
    const S& K = inv[Entry::K];
    if (is_zero(a) || is_zero(S(a - 1))) {
        throw WebError(ErrorKind::inadmissible_invariant, "subweb curvature needs a outside {0, 1}");
    }
    const S one(1);
    const S b = one - a;
    S bracket(0), multiplier(1);
    double terms = 0.0;
    switch (which) {
        case Triple::t123:
            bracket = K;
            multiplier = one;
            terms = inv.scale(Entry::K);
            break;
        case Triple::t124: {
            const S t1 = a12 / a;
            const S t2 = a1 * a2 / (a * a);
            bracket = K - t1 + t2;
            multiplier = a;
            terms = max_magnitude({inv.scale(Entry::K), magnitude(t1), magnitude(t2), inv.scale(Entry::a12) / magnitude(a)});
            break;
        }
        case Triple::t134: {
            const S t1 = a2 * (a1 - a2) / (b * b);
            const S t2 = (a12 - a22) / b;
            bracket = K + t1 + t2;
            multiplier = a - one;
            terms = max_magnitude({inv.scale(Entry::K), magnitude(t1), magnitude(a12 / b), magnitude(a22 / b),
                                   std::max(inv.scale(Entry::a12), inv.scale(Entry::a22)) / magnitude(b)});
            break;
        }
        case Triple::t234: {
            const S t1 = (2 * a - one) * a1 * (a1 - a2) / (a * a * b * b);
            const S t2 = (a11 - a12) / (a * b);
            bracket = K + t1 + t2;
            multiplier = a * (a - one);
            terms = max_magnitude({inv.scale(Entry::K), magnitude(t1), magnitude(a11 / (a * b)), magnitude(a12 / (a * b)),
                                   std::max(inv.scale(Entry::a11), inv.scale(Entry::a12)) /
                                       magnitude(S(a * b))});
            break;
        }
    }
    SubwebCurvature<S> out;
    out.K = bracket / multiplier;
    out.Theta = bracket * inv.surface;
    out.scale = terms * magnitude(inv.surface);
    return out;
}

template <Scalar S>
InvariantSet<S> ladder(const WebSpec& spec, const Coframe<S>& frame, const Point<S>& p) {
    if (spec.order < kMinOrder) {
        throw WebError(ErrorKind::order_exhausted,
                       "jet order " + std::to_string(spec.order) + " is below the minimum " +
                           std::to_string(kMinOrder) + " for the third-order ladder");
    }
    InvariantSet<S> inv;
    auto set = [&](Entry e, const S& v, double scale) {
        inv[e] = v;
        inv.scales[static_cast<std::size_t>(e)] = scale;
    };

    const Jet<S> a = basic_invariant(spec, frame, p);
    set(Entry::a, a.value(), magnitude(a.value()));

    const auto da = covariant_components(a, 0, frame, magnitude(a.value()));
    set(Entry::a1, da.c1.value(), da.scale);
    set(Entry::a2, da.c2.value(), da.scale);

    const auto d1 = covariant_components(da.c1, 1, frame, da.scale);
    const auto d2 = covariant_components(da.c2, 1, frame, da.scale);
    set(Entry::a11, d1.c1.value(), d1.scale);
    set(Entry::a22, d2.c2.value(), d2.scale);
    inv.routes.a12_from_a1 = d1.c2.value();
    inv.routes.a12_from_a2 = d2.c1.value();
    const double s12 = std::max(d1.scale, d2.scale);
    set(Entry::a12, reconcile(d1.c2.value(), d2.c1.value(), s12, "a12 (Cartan symmetry)"), s12);

    // a12 as a jet for the next step: both routes, averaged on floats.
    Jet<S> a12_jet = d1.c2;
    if constexpr (!is_exact_v<S>) {
        a12_jet = (d1.c2 + d2.c1) * 0.5;
    }

    const S& K = frame.K.value();
    set(Entry::K, K, frame.curvature_scale);

    const auto d11 = covariant_components(d1.c1, 2, frame, d1.scale);
    const auto d12 = covariant_components(a12_jet, 2, frame, s12);
    const auto d22 = covariant_components(d2.c2, 2, frame, d2.scale);
    const S a1K = inv[Entry::a1] * K;
    const S a2K = inv[Entry::a2] * K;
    const S third(S(1) / S(3));

    inv.routes.a112_from_a11 = d11.c2.value();
    inv.routes.a112_from_a12 = d12.c1.value();
    inv.routes.a122_from_a12 = d12.c2.value();
    inv.routes.a122_from_a22 = d22.c1.value();

    set(Entry::a111, d11.c1.value(), d11.scale);
    const double s112 = std::max({d11.scale, d12.scale, magnitude(a1K)});
    set(Entry::a112,
        reconcile(S(d11.c2.value() - 2 * third * a1K), S(d12.c1.value() + third * a1K), s112, "a112"),
        s112);
    const double s122 = std::max({d12.scale, d22.scale, magnitude(a2K)});
    set(Entry::a122,
        reconcile(S(d12.c2.value() - third * a2K), S(d22.c1.value() + 2 * third * a2K), s122, "a122"),
        s122);
    set(Entry::a222, d22.c2.value(), d22.scale);

    const auto dK = covariant_components(frame.K, 2, frame, frame.curvature_scale);
    set(Entry::K1, dK.c1.value(), dK.scale);
    set(Entry::K2, dK.c2.value(), dK.scale);

    inv.surface = frame.surface.value();
    for (int k = 0; k < 3; ++k) inv.gauge[k] = frame.gauge[k].value();
    for (std::size_t t = 0; t < kTriples.size(); ++t) {
        const auto c = subweb_curvature_closed(kTriples[t], inv);
        inv.K_sub[t] = c.K;
        inv.Theta_sub[t] = c.Theta;
        inv.Theta_scales[t] = c.scale;
    }
    return inv;
}

template <Scalar S>
InvariantSet<S> compute_invariants(const WebSpec& spec, const Point<S>& p) {
    return ladder(spec, build_coframe(spec, p), p);
}

template <Scalar S>
S subweb_curvature_direct(Triple which, const WebSpec& spec, const Coframe<S>& frame,
                          const Point<S>& p) {
    const Jet<S> a = basic_invariant(spec, frame, p);
    const int n = a.order();
    const OneForm<S> w1 = frame.omega[0].truncated(n);
    const OneForm<S> w2 = frame.omega[1].truncated(n);
    const S one(1);
    OneForm<S> f1, f2;
    switch (which) {
        case Triple::t123:
            f1 = w1;
            f2 = w2;
            break;
        case Triple::t124:
            f1 = a * w1;
            f2 = w2;
            break;
        case Triple::t134:
            f1 = (a - one) * w1;
            f2 = w1 + w2;
            break;
        case Triple::t234:
            f1 = (one - a) * w2;
            f2 = a * (w1 + w2);
            break;
    }
    return exterior_derivative(connection_form(f1, f2)).value();
}

template <Scalar S>
S subweb_curvature_direct(Triple which, const WebSpec& spec, const Point<S>& p) {
    return subweb_curvature_direct(which, spec, build_coframe(spec, p), p);
}

#define WEB4_INSTANTIATE(S)                                                                        \
    template double frame_rate(const Coframe<S>&);                                                \
    template Covariant<S> covariant_components(const Jet<S>&, int, const Coframe<S>&, double);            \
    template SubwebCurvature<S> subweb_curvature_closed(Triple, const InvariantSet<S>&);          \
    template InvariantSet<S> ladder(const WebSpec&, const Coframe<S>&, const Point<S>&);          \
    template InvariantSet<S> compute_invariants(const WebSpec&, const Point<S>&);                 \
    template S subweb_curvature_direct(Triple, const WebSpec&, const Coframe<S>&, const Point<S>&); \
    template S subweb_curvature_direct(Triple, const WebSpec&, const Point<S>&);

WEB4_INSTANTIATE(double)
WEB4_INSTANTIATE(Rational)

#undef WEB4_INSTANTIATE

}  // namespace web4
