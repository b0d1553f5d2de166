#include "web4/coframe.hpp"

#include "web4/errors.hpp"

#include <algorithm>
#include <cmath>

namespace web4 {

WebSpec WebSpec::potential(Expr u1, Expr u2, Expr u3, Expr u4) {
    WebSpec s;
    s.u = {std::move(u1), std::move(u2), std::move(u3)};
    s.fourth_kind = FourthKind::potential;
    s.fourth = std::move(u4);
    return s;
}

WebSpec WebSpec::synthetic(Expr u1, Expr u2, Expr u3, Expr a) {
    WebSpec s = potential(std::move(u1), std::move(u2), std::move(u3), std::move(a));
    s.fourth_kind = FourthKind::synthetic;
    return s;
}

bool WebSpec::all_rational() const {
    return std::all_of(u.begin(), u.end(), [](const Expr& e) { return e.is_rational(); }) &&
           fourth.is_rational();
}

void WebSpec::validate() const {
    if (order < kMinOrder) {
        throw WebError(ErrorKind::invalid_spec, "jet order must be at least " +
                                                    std::to_string(kMinOrder) + ", got " +
                                                    std::to_string(order));
    }
    const auto b = domain.bounds<Rational>();
    if (!(b[0] < b[1]) || !(b[2] < b[3])) {
        throw WebError(ErrorKind::invalid_spec, "domain must satisfy xmin < xmax and ymin < ymax");
    }
    if (backend == Backend::rational && !all_rational()) {
        throw WebError(ErrorKind::invalid_spec,
                       "rational backend requested but a formula uses a transcendental function");
    }
}

namespace {

template <Scalar S>
[[noreturn]] void degenerate(const std::string& what) {
    throw WebError(ErrorKind::degenerate_web_point, what);
}

template <Scalar S>
OneForm<S> differential(const Jet<S>& u) {
    return {partial(u, Axis::x), partial(u, Axis::y)};
}

/// Direction test for two covectors; relative to their lengths on doubles.
template <Scalar S>
bool transverse(const S& p1, const S& q1, const S& p2, const S& q2, S& det) {
    det = p1 * q2 - p2 * q1;
    const double n1 = std::hypot(to_double(p1), to_double(q1));
    const double n2 = std::hypot(to_double(p2), to_double(q2));
    return !negligible(det, n1 * n2, kDegenerateDivisorRatio);
}

template <Scalar S>
bool near(const S& value, int target) {
    if constexpr (is_exact_v<S>) {
        return value == target;
    } else {
        return std::fabs(value - target) <= kAdmissibilityTolerance;
    }
}

}  // namespace

template <Scalar S>
bool GeneralPositionReport<S>::admissible() const {
    return failure.empty() && a_nonzero && a_not_one &&
           std::all_of(transverse.begin(), transverse.end(), [](bool b) { return b; });
}

template <Scalar S>
std::vector<std::pair<int, int>> GeneralPositionReport<S>::coincident_pairs() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t k = 0; k < kFoliationPairs.size(); ++k) {
        if (!transverse[k]) out.push_back(kFoliationPairs[k]);
    }
    return out;
}

template <Scalar S>
std::vector<OneForm<S>> foliation_differentials(const WebSpec& spec, const Point<S>& p) {
    std::vector<OneForm<S>> out;
    for (const auto& u : spec.u) out.push_back(differential(eval_jet(u, p, spec.order)));
    if (spec.fourth_kind == FourthKind::potential) {
        out.push_back(differential(eval_jet(spec.fourth, p, spec.order)));
    }
    return out;
}

template <Scalar S>
GeneralPositionReport<S> check_general_position(const WebSpec& spec, const Point<S>& p) {
    GeneralPositionReport<S> r;
    try {
        std::array<std::pair<S, S>, 4> dir;
        for (int k = 0; k < 3; ++k) {
            const auto j = eval_jet(spec.u[k], p, 1);
            dir[k] = {j.coeff(1, 0), j.coeff(0, 1)};
        }
        bool first_three_ok = true;
        if (spec.fourth_kind == FourthKind::potential) {
            const auto j = eval_jet(spec.fourth, p, 1);
            dir[3] = {j.coeff(1, 0), j.coeff(0, 1)};
        } else {
            // omega4 is proportional to a omega1 + omega2 with omega_k = g_k du_k.
            const auto& [p1, q1] = dir[0];
            const auto& [p2, q2] = dir[1];
            const auto& [p3, q3] = dir[2];
            const S g1 = p2 * q3 - p3 * q2;
            const S g2 = p3 * q1 - p1 * q3;
            const S a = eval_scalar(spec.fourth, p);
            dir[3] = {a * g1 * p1 + g2 * p2, a * g1 * q1 + g2 * q2};
            r.a = a;
        }
        for (std::size_t k = 0; k < kFoliationPairs.size(); ++k) {
            const auto [i, j] = kFoliationPairs[k];
            r.transverse[k] = transverse(dir[i - 1].first, dir[i - 1].second, dir[j - 1].first,
                                         dir[j - 1].second, r.determinants[k]);
            if (i <= 3 && j <= 3 && !r.transverse[k]) first_three_ok = false;
        }
        if (!first_three_ok) {
            if (spec.fourth_kind == FourthKind::synthetic) {
                // The fourth direction is built from the normalized frame, which does not exist.
                r.transverse[2] = r.transverse[4] = r.transverse[5] = false;
            }
            return r;
        }
        if (spec.fourth_kind == FourthKind::potential) {
            // du4 = c1 omega1 + c2 omega2 at the point; a = c1 / c2.
            const auto& [p1, q1] = dir[0];
            const auto& [p2, q2] = dir[1];
            const auto& [p3, q3] = dir[2];
            const auto& [p4, q4] = dir[3];
            const S g1 = p2 * q3 - p3 * q2;
            const S g2 = p3 * q1 - p1 * q3;
            const S P1 = g1 * p1, Q1 = g1 * q1, P2 = g2 * p2, Q2 = g2 * q2;
            const S c1 = p4 * Q2 - q4 * P2;
            const S c2 = P1 * q4 - Q1 * p4;
            if (!is_zero(c2)) r.a = S(c1 / c2);
        }
        if (r.a) {
            r.a_nonzero = !near(*r.a, 0);
            r.a_not_one = !near(*r.a, 1);
        }
    } catch (const WebError& e) {
        r.failure = e.what();
    }
    return r;
}

template <Scalar S>
Normalized<S> normalize(std::span<const OneForm<S>> du) {
    const auto& d1 = du[0];
    const auto& d2 = du[1];
    const auto& d3 = du[2];
    Normalized<S> n{
        {d2.P * d3.Q - d3.P * d2.Q, d3.P * d1.Q - d1.P * d3.Q, d1.P * d2.Q - d2.P * d1.Q},
        {}};
    for (int k = 0; k < 3; ++k) {
        if (n.gauge[k].is_degenerate_divisor()) {
            degenerate<S>("general position violated among foliations 1, 2, 3 (gauge factor " +
                          std::to_string(k + 1) + " vanishes)");
        }
        n.omega[k] = n.gauge[k] * du[k];
    }
    return n;
}

template <Scalar S>
OneForm<S> connection_form(const OneForm<S>& omega1, const OneForm<S>& omega2) {
    // d omega_a = omega_a ^ theta reads P_a T_Q - Q_a T_P = dQ_a/dx - dP_a/dy.
    const Jet<S> r1 = exterior_derivative(omega1);
    const Jet<S> r2 = exterior_derivative(omega2);
    const int m = r1.order();
    const auto w1 = omega1.truncated(m);
    const auto w2 = omega2.truncated(m);
    const Jet<S> det = w1.Q * w2.P - w1.P * w2.Q;
    if (det.is_degenerate_divisor()) {
        degenerate<S>("connection form: the two forms are dependent at the point");
    }
    return {(w1.P * r2 - w2.P * r1) / det, (w1.Q * r2 - w2.Q * r1) / det};
}

template <Scalar S>
Jet<S> curvature(const OneForm<S>& theta, const Coframe<S>& frame) {
    const Jet<S> dtheta = exterior_derivative(theta);
    const Jet<S> surface = frame.surface.truncated(dtheta.order());
    if (surface.is_degenerate_divisor()) degenerate<S>("surface element vanishes");
    return dtheta / surface;
}

template <Scalar S>
Coframe<S> make_coframe(const std::array<OneForm<S>, 3>& omega, const std::array<Jet<S>, 3>& gauge) {
    Coframe<S> f;
    f.omega = omega;
    f.gauge = gauge;
    f.surface = wedge(omega[0], omega[1]);
    if (f.surface.is_degenerate_divisor()) degenerate<S>("surface element vanishes");
    f.theta = connection_form(omega[0], omega[1]);
    f.K = curvature(f.theta, f);
    const double area = magnitude(f.surface.value());
    const double tp = magnitude(f.theta.P.value());
    const double tq = magnitude(f.theta.Q.value());
    f.curvature_scale = std::max({magnitude(partial(f.theta.Q, Axis::x).value()),
                                  magnitude(partial(f.theta.P, Axis::y).value()), tp * tp, tq * tq,
                                  tp * tq}) /
                        area;
    return f;
}

template <Scalar S>
Coframe<S> build_coframe(const WebSpec& spec, const Point<S>& p) {
    const auto du = foliation_differentials(spec, p);
    const auto n = normalize(std::span<const OneForm<S>>(du.data(), 3));
    return make_coframe(n.omega, n.gauge);
}

template <Scalar S>
std::pair<Jet<S>, Jet<S>> to_omega_basis(const OneForm<S>& f, const Coframe<S>& frame) {
    const int m = std::min(f.order(), frame.order());
    const auto w1 = frame.omega[0].truncated(m);
    const auto w2 = frame.omega[1].truncated(m);
    const auto g = f.truncated(m);
    const Jet<S> surface = frame.surface.truncated(m);
    if (surface.is_degenerate_divisor()) degenerate<S>("surface element vanishes");
    return {(g.P * w2.Q - g.Q * w2.P) / surface, (w1.P * g.Q - w1.Q * g.P) / surface};
}

template <Scalar S>
Jet<S> basic_invariant(const WebSpec& spec, const Coframe<S>& frame, const Point<S>& p) {
    Jet<S> a;
    if (spec.fourth_kind == FourthKind::potential) {
        const auto du4 = differential(eval_jet(spec.fourth, p, spec.order));
        const auto [c1, c2] = to_omega_basis(du4, frame);
        if (c2.is_degenerate_divisor()) {
            degenerate<S>("general position violated: foliations 1,4");
        }
        a = c1 / c2;
    } else {
        a = eval_jet(spec.fourth, p, spec.order).truncated(spec.order - 1);
    }
    if (near(a.value(), 0) || near(a.value(), 1)) {
        throw WebError(ErrorKind::inadmissible_invariant,
                       "basic invariant a = " + exact_string(a.value()) + " is inadmissible (0 or 1)");
    }
    return a;
}

template <Scalar S>
S cross_ratio_tangents(const WebSpec& spec, const Point<S>& p) {
    std::array<std::pair<S, S>, 4> dir;
    for (int k = 0; k < 3; ++k) {
        const auto j = eval_jet(spec.u[k], p, 1);
        dir[k] = {j.coeff(1, 0), j.coeff(0, 1)};
    }
    if (spec.fourth_kind == FourthKind::potential) {
        const auto j = eval_jet(spec.fourth, p, 1);
        dir[3] = {j.coeff(1, 0), j.coeff(0, 1)};
    } else {
        const auto frame = build_coframe(spec, p);
        const S a = eval_scalar(spec.fourth, p);
        dir[3] = {a * frame.omega[0].P.value() + frame.omega[1].P.value(),
                  a * frame.omega[0].Q.value() + frame.omega[1].Q.value()};
    }
    // A tangent to p dx + q dy = 0 is the projective point (-q : p); differences
    // of affine slopes become 2x2 determinants, so vertical tangents need no
    // special case.
    auto d = [&](int i, int j) {
        S det;
        if (!transverse(dir[i - 1].first, dir[i - 1].second, dir[j - 1].first, dir[j - 1].second,
                        det)) {
            degenerate<S>("general position violated: foliations " + std::to_string(i) + "," +
                          std::to_string(j));
        }
        return det;
    };
    return S((d(1, 3) * d(2, 4)) / (d(2, 3) * d(1, 4)));
}

template <Scalar S>
Coframe<S> gauge_rescale(const Coframe<S>& frame, const Jet<S>& s) {
    const Jet<S> factor = s.truncated(frame.order());
    if (factor.is_degenerate_divisor()) {
        throw WebError(ErrorKind::domain_error, "gauge factor vanishes at the point");
    }
    std::array<OneForm<S>, 3> omega;
    std::array<Jet<S>, 3> gauge;
    for (int k = 0; k < 3; ++k) {
        omega[k] = factor * frame.omega[k];
        gauge[k] = factor * frame.gauge[k];
    }
    return make_coframe(omega, gauge);
}

template <Scalar S>
Coframe<S> gauge_rescale(const Coframe<S>& frame, const Expr& s, const Point<S>& p) {
    return gauge_rescale(frame, eval_jet(s, p, frame.order()));
}

template <Scalar S>
OneForm<S> connection_form_via_gauge(std::span<const OneForm<S>> du, const Coframe<S>& frame) {
    (void)du;
    std::array<OneForm<S>, 3> th;
    for (int k = 0; k < 3; ++k) {
        const Jet<S>& g = frame.gauge[k];
        const auto dg = differential(g);
        const Jet<S> gm = g.truncated(dg.order());
        th[k] = {-(dg.P / gm), -(dg.Q / gm)};
    }
    // theta_1 - theta_3 = l w1 + m w2,  theta_2 - theta_3 = m' w1 + n w2,
    // theta = theta_3 + m (w1 + w2).
    const auto [l, m] = to_omega_basis(th[0] - th[2], frame);
    const auto [m2, n] = to_omega_basis(th[1] - th[2], frame);
    (void)l;
    (void)n;
    Jet<S> mu = m + m2;
    mu *= S(1) / S(2);
    const int ord = mu.order();
    return th[2].truncated(ord) + mu * (frame.omega[0].truncated(ord) + frame.omega[1].truncated(ord));
}

#define WEB4_INSTANTIATE(S)                                                                        \
    template struct GeneralPositionReport<S>;                                                     \
    template std::vector<OneForm<S>> foliation_differentials(const WebSpec&, const Point<S>&);    \
    template GeneralPositionReport<S> check_general_position(const WebSpec&, const Point<S>&);    \
    template Normalized<S> normalize(std::span<const OneForm<S>>);                                \
    template OneForm<S> connection_form(const OneForm<S>&, const OneForm<S>&);                    \
    template Jet<S> curvature(const OneForm<S>&, const Coframe<S>&);                              \
    template Coframe<S> make_coframe(const std::array<OneForm<S>, 3>&,                            \
                                     const std::array<Jet<S>, 3>&);                               \
    template Coframe<S> build_coframe(const WebSpec&, const Point<S>&);                           \
    template std::pair<Jet<S>, Jet<S>> to_omega_basis(const OneForm<S>&, const Coframe<S>&);      \
    template Jet<S> basic_invariant(const WebSpec&, const Coframe<S>&, const Point<S>&);          \
    template S cross_ratio_tangents(const WebSpec&, const Point<S>&);                             \
    template Coframe<S> gauge_rescale(const Coframe<S>&, const Jet<S>&);                          \
    template Coframe<S> gauge_rescale(const Coframe<S>&, const Expr&, const Point<S>&);           \
    template OneForm<S> connection_form_via_gauge(std::span<const OneForm<S>>, const Coframe<S>&);

WEB4_INSTANTIATE(double)
WEB4_INSTANTIATE(Rational)

#undef WEB4_INSTANTIATE

}  // namespace web4
