#pragma once

#include "web4/expr.hpp"
#include "web4/jet.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace web4 {

/// How the fourth foliation is given.
enum class FourthKind {
    potential,  ///< level sets of u4
    synthetic,  ///< direction field a*omega1 + omega2 = 0 with a prescribed
};

struct Domain {
    std::string xmin = "-1", xmax = "1", ymin = "-1", ymax = "1";

    template <Scalar S>
    std::array<S, 4> bounds() const {
        return {from_decimal<S>(xmin), from_decimal<S>(xmax), from_decimal<S>(ymin),
                from_decimal<S>(ymax)};
    }
};

/// Four foliations of the plane, or three plus a prescribed basic invariant.
struct WebSpec {
    std::array<Expr, 3> u;
    FourthKind fourth_kind = FourthKind::potential;
    Expr fourth;  ///< u4, or the prescribed a in synthetic mode
    Domain domain;
    Backend backend = Backend::rational;
    int order = 6;
    double epsilon = 1e-9;

    static WebSpec potential(Expr u1, Expr u2, Expr u3, Expr u4);
    static WebSpec synthetic(Expr u1, Expr u2, Expr u3, Expr a);

    /// True when every formula evaluates with field operations only.
    bool all_rational() const;

    /// Throws WebError(invalid_spec) on order < 5 or an empty domain.
    void validate() const;
};

/// Minimum jet order that still yields values for the whole third-order ladder.
///
/// Derivative budget, starting from the web functions at order N:
///   du, g, omega          N-1
///   theta                 N-2
///   K                     N-3,  K_i   N-4
///   a                     N-1,  a_i   N-2,  a_ij  N-3,  a_ijk  N-4
inline constexpr int kMinOrder = 5;

inline constexpr double kAdmissibilityTolerance = 1e-9;

/// P dx + Q dy with jet coefficients.
template <Scalar S>
struct OneForm {
    Jet<S> P;
    Jet<S> Q;

    int order() const { return P.order(); }
    OneForm truncated(int order) const { return {P.truncated(order), Q.truncated(order)}; }

    friend OneForm operator+(const OneForm& a, const OneForm& b) { return {a.P + b.P, a.Q + b.Q}; }
    friend OneForm operator-(const OneForm& a, const OneForm& b) { return {a.P - b.P, a.Q - b.Q}; }
    friend OneForm operator-(const OneForm& a) { return {-a.P, -a.Q}; }
    friend OneForm operator*(const Jet<S>& f, const OneForm& a) { return {f * a.P, f * a.Q}; }
    friend OneForm operator*(const S& f, const OneForm& a) { return {a.P * f, a.Q * f}; }
};

/// Exterior derivative of a 1-form: the dx^dy coefficient dQ/dx - dP/dy.
template <Scalar S>
Jet<S> exterior_derivative(const OneForm<S>& f) {
    return partial(f.Q, Axis::x) - partial(f.P, Axis::y);
}

/// dx^dy coefficient of f ^ g.
template <Scalar S>
Jet<S> wedge(const OneForm<S>& f, const OneForm<S>& g) {
    return f.P * g.Q - f.Q * g.P;
}

/// Normalized coframe of the 3-subweb [1,2,3] in the canonical gauge.
template <Scalar S>
struct Coframe {
    std::array<OneForm<S>, 3> omega;  ///< omega1 + omega2 + omega3 = 0
    std::array<Jet<S>, 3> gauge;      ///< omega_a = gauge_a du_a
    OneForm<S> theta;                 ///< connection form
    Jet<S> surface;                   ///< omega1 ^ omega2 over dx^dy
    Jet<S> K;                         ///< curvature, d theta = K omega1 ^ omega2
    double curvature_scale = 0.0;     ///< magnitude of the terms that cancel in K

    int order() const { return omega[0].order(); }
};

template <Scalar S>
struct GeneralPositionReport {
    /// p_a q_b - p_b q_a for (1,2), (1,3), (1,4), (2,3), (2,4), (3,4).
    std::array<S, 6> determinants{};
    std::array<bool, 6> transverse{};
    std::optional<S> a;
    bool a_nonzero = false;
    bool a_not_one = false;
    std::string failure;  ///< evaluation error, if any

    bool admissible() const;
    /// Foliation index pairs whose tangents coincide, e.g. {1,4}.
    std::vector<std::pair<int, int>> coincident_pairs() const;
};

inline constexpr std::array<std::pair<int, int>, 6> kFoliationPairs = {
    {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};

template <Scalar S>
struct Normalized {
    std::array<Jet<S>, 3> gauge;
    std::array<OneForm<S>, 3> omega;
};

/// (du/dx, du/dy) for each potential, as jets of order N-1. Four entries in
/// potential mode, three in synthetic mode.
template <Scalar S>
std::vector<OneForm<S>> foliation_differentials(const WebSpec& spec, const Point<S>& p);

template <Scalar S>
GeneralPositionReport<S> check_general_position(const WebSpec& spec, const Point<S>& p);

/// Gauge factors from the cross product of (p1,p2,p3) and (q1,q2,q3); with
/// them omega1 + omega2 + omega3 = 0 identically.
template <Scalar S>
Normalized<S> normalize(std::span<const OneForm<S>> du);

/// The unique theta with d(omega_a) = omega_a ^ theta for both forms.
template <Scalar S>
OneForm<S> connection_form(const OneForm<S>& omega1, const OneForm<S>& omega2);

/// K = d(theta) / surface.
template <Scalar S>
Jet<S> curvature(const OneForm<S>& theta, const Coframe<S>& frame);

/// Assembles theta, surface and K around already-normalized forms.
template <Scalar S>
Coframe<S> make_coframe(const std::array<OneForm<S>, 3>& omega, const std::array<Jet<S>, 3>& gauge);

template <Scalar S>
Coframe<S> build_coframe(const WebSpec& spec, const Point<S>& p);

/// Coefficients (c1, c2) with f = c1 omega1 + c2 omega2.
template <Scalar S>
std::pair<Jet<S>, Jet<S>> to_omega_basis(const OneForm<S>& f, const Coframe<S>& frame);

/// a with -omega4 proportional to a omega1 + omega2, as a jet of order N-1.
/// Throws InadmissibleInvariant when a is 0 or 1 at the point.
template <Scalar S>
Jet<S> basic_invariant(const WebSpec& spec, const Coframe<S>& frame, const Point<S>& p);

/// Cross-ratio of the tangents to the leaves through p, taken in the order
/// (F2, F1, F3, F4) and arranged so that it equals the basic invariant.
template <Scalar S>
S cross_ratio_tangents(const WebSpec& spec, const Point<S>& p);

/// Coframe after omega_a -> s omega_a, rebuilt from the rescaled forms.
template <Scalar S>
Coframe<S> gauge_rescale(const Coframe<S>& frame, const Jet<S>& s);

template <Scalar S>
Coframe<S> gauge_rescale(const Coframe<S>& frame, const Expr& s, const Point<S>& p);

/// theta from the gauge factors, theta_a = -d ln g_a, closed up with the
/// symmetric Cartan coefficients. Only valid for the canonical frame where
/// omega_a = g_a du_a; used to cross-check connection_form.
template <Scalar S>
OneForm<S> connection_form_via_gauge(std::span<const OneForm<S>> du, const Coframe<S>& frame);

/// Zero test used for pointwise degeneracy: exact on rationals, relative on doubles.
template <Scalar S>
bool negligible(const S& value, double scale, double tolerance) {
    if constexpr (is_exact_v<S>) {
        return is_zero(value);
    } else {
        return magnitude(value) <= tolerance * scale;
    }
}

}  // namespace web4
