#pragma once

#include "web4/coframe.hpp"

#include <array>
#include <string_view>

namespace web4 {

/// Scalar entries of the invariant ladder, in report order.
enum class Entry { a, a1, a2, a11, a12, a22, a111, a112, a122, a222, K, K1, K2 };

inline constexpr std::size_t kEntryCount = 13;

inline constexpr std::array<Entry, kEntryCount> kEntries = {
    Entry::a,    Entry::a1,   Entry::a2,   Entry::a11, Entry::a12, Entry::a22, Entry::a111,
    Entry::a112, Entry::a122, Entry::a222, Entry::K,   Entry::K1,  Entry::K2};

std::string_view name(Entry e);

/// Relative-invariant weight: the entry picks up s^-weight under omega -> s omega.
int weight(Entry e);

/// The four 3-subwebs, by foliation indices.
enum class Triple { t123, t124, t134, t234 };

inline constexpr std::array<Triple, 4> kTriples = {Triple::t123, Triple::t124, Triple::t134,
                                                   Triple::t234};

std::string_view name(Triple t);  ///< "123", "124", ...

/// Both extraction routes of the entries that are computed twice.
template <Scalar S>
struct RouteDiagnostics {
    S a12_from_a1;   ///< omega2-component of nabla a1
    S a12_from_a2;   ///< omega1-component of nabla a2
    S a112_from_a11; ///< omega2-component of nabla a11, uncorrected
    S a112_from_a12; ///< omega1-component of nabla a12, uncorrected
    S a122_from_a12; ///< omega2-component of nabla a12, uncorrected
    S a122_from_a22; ///< omega1-component of nabla a22, uncorrected
};

/// Every scalar invariant at one point, in the canonical gauge of the frame it
/// was computed from.
template <Scalar S>
struct InvariantSet {
    std::array<S, kEntryCount> values{};
    /// Magnitude of the terms that were combined into each entry; a floating
    /// entry is only trusted to about machine epsilon times this.
    std::array<double, kEntryCount> scales{};
    std::array<S, 4> K_sub{};      ///< subweb curvatures, indexed like kTriples
    std::array<S, 4> Theta_sub{};  ///< curvature-form coefficients over dx^dy
    std::array<double, 4> Theta_scales{};
    S surface{};                   ///< omega1 ^ omega2 over dx^dy
    std::array<S, 3> gauge{};      ///< g_1, g_2, g_3 at the point
    RouteDiagnostics<S> routes{};

    const S& operator[](Entry e) const { return values[static_cast<std::size_t>(e)]; }
    S& operator[](Entry e) { return values[static_cast<std::size_t>(e)]; }
    double scale(Entry e) const { return scales[static_cast<std::size_t>(e)]; }
    const S& K_of(Triple t) const { return K_sub[static_cast<std::size_t>(t)]; }
    const S& Theta_of(Triple t) const { return Theta_sub[static_cast<std::size_t>(t)]; }
};

/// Routes that should agree on floating runs may differ by this much, relative
/// to their term scale, before ConsistencyFailure.
inline constexpr double kConsistencyTolerance = 1e-6;

template <Scalar S>
struct Covariant {
    Jet<S> c1;
    Jet<S> c2;
    double scale = 0.0;  ///< largest constant-term contribution to c1 or c2
};

/// Largest coefficient of dx, dy and theta in the omega basis at the point;
/// converts the scale of a quantity into the scale of its derivatives.
template <Scalar S>
double frame_rate(const Coframe<S>& frame);

/// nabla u = du - k u theta, expanded in the omega basis. The scale is at
/// least input_scale * frame_rate, so rounding noise carried by u stays
/// measured against the terms it came from.
template <Scalar S>
Covariant<S> covariant_components(const Jet<S>& u, int weight, const Coframe<S>& frame,
                                  double input_scale = 0.0);

/// a through a_ijk, K, K_1, K_2 and the closed-form subweb curvatures.
/// Throws ConsistencyFailure when two extraction routes disagree.
template <Scalar S>
InvariantSet<S> ladder(const WebSpec& spec, const Coframe<S>& frame, const Point<S>& p);

/// build_coframe followed by ladder.
template <Scalar S>
InvariantSet<S> compute_invariants(const WebSpec& spec, const Point<S>& p);

template <Scalar S>
struct SubwebCurvature {
    S K;
    S Theta;
    double scale = 0.0;  ///< magnitude of the terms summed into Theta
};

/// Subweb curvature from the ladder through second order.
template <Scalar S>
SubwebCurvature<S> subweb_curvature_closed(Triple which, const InvariantSet<S>& inv);

/// Curvature form of a subweb recomputed from scratch: the three forms of the
/// triple are rescaled to sum to zero, and the dx^dy coefficient of d theta
/// of that triple is returned.
template <Scalar S>
S subweb_curvature_direct(Triple which, const WebSpec& spec, const Point<S>& p);

template <Scalar S>
S subweb_curvature_direct(Triple which, const WebSpec& spec, const Coframe<S>& frame,
                          const Point<S>& p);

}  // namespace web4
