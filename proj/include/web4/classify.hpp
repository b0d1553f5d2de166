#pragma once

#include "web4/invariants.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace web4 {

enum class Label {
    Parallelizable,
    NW,
    APW_1,
    APW_2,
    APW_3,
    APW_4,
    MW,
    MW_1,
    MW_2,
    MW_3,
    MW_4,
    LinearizabilityConditionsHold,
    Generic,
};

std::string_view name(Label l);
Label apw_label(int k);  ///< k in 1..4
Label mw_label(int k);

using LabelSet = std::set<Label>;

/// A quantity that should vanish, with the magnitude of the terms it was
/// summed from. Zero scale means every term was zero.
template <Scalar S>
struct Residual {
    S value{};
    double scale = 0.0;
};

/// Exact zero on rationals; |value| <= epsilon * scale on doubles.
template <Scalar S>
bool vanishes(const Residual<S>& r, double epsilon) {
    if constexpr (is_exact_v<S>) {
        (void)epsilon;
        return is_zero(r.value);
    } else {
        return std::fabs(r.value) <= epsilon * r.scale;
    }
}

/// |value| / scale, or 0 for an identically zero residual.
template <Scalar S>
double relative(const Residual<S>& r) {
    const double v = magnitude(r.value);
    if (v == 0.0) return 0.0;
    return r.scale > 0.0 ? v / r.scale : std::numeric_limits<double>::infinity();
}

template <Scalar S>
struct Residuals {
    Residual<S> lin1, lin2;
    Residual<S> mw11, mw12, mw22;
    std::array<Residual<S>, 4> mw3rd;  ///< a111, a112, a122, a222
    std::array<Residual<S>, 4> apw;    ///< a2; a1; a1 - a2; a1 - a a2
    std::array<Residual<S>, 2> nw;     ///< a1, a2
    std::array<Residual<S>, 3> parallel;  ///< K, a1, a2
    Residual<S> K, K1, K2;
    std::array<Residual<S>, 4> theta;  ///< curvature forms, indexed like kTriples
    /// Remaining second- and third-order ladder entries as bare zero tests.
    std::array<Residual<S>, 7> higher;  ///< a11, a12, a22, a111, a112, a122, a222
    /// Four rows of the MW_k characterization, each four conditions besides K = 0.
    std::array<std::array<Residual<S>, 4>, 4> mw_rows;

    /// Name and residual of everything above, in a fixed order.
    std::vector<std::pair<std::string, const Residual<S>*>> named() const;
};

template <Scalar S>
std::pair<Residual<S>, Residual<S>> linearizability_residuals(const InvariantSet<S>& inv);

template <Scalar S>
struct MwResiduals {
    Residual<S> mw11, mw12, mw22;
    std::array<Residual<S>, 4> mw3rd;
};

template <Scalar S>
MwResiduals<S> mw_residuals(const InvariantSet<S>& inv);

template <Scalar S>
Residuals<S> compute_residuals(const InvariantSet<S>& inv);

/// APW index 1..4 when K vanishes and exactly one defining relation holds.
template <Scalar S>
std::optional<int> apw_class(const InvariantSet<S>& inv, double epsilon);

template <Scalar S>
std::optional<int> apw_class(const Residuals<S>& r, double epsilon);

struct SubwebProfile {
    std::array<bool, 4> vanishing{};
    /// Pairs (1,2), (1,3), (1,4), (2,3), (2,4), (3,4) of kTriples.
    std::array<bool, 6> equal{};
    std::optional<int> apw;
    /// For the detected APW class: do the vanishing pattern and the expected
    /// subweb curvatures match?
    bool pattern_holds = true;
    std::vector<std::string> mismatches;
    double max_expected_relative = 0.0;  ///< worst relative error of the expected K_abc
};

template <Scalar S>
SubwebProfile subweb_vanishing_profile(const InvariantSet<S>& inv, double epsilon);

/// Boolean summary of the conditions that labels are built from.
struct Conditions {
    bool K_zero = false;
    bool K_derivatives_zero = false;
    bool ladder_zero = false;   ///< a1 .. a222 all vanish
    bool nonconstant = false;   ///< a1 or a2 nonzero at the point
    bool theta_all_zero = false;
    bool mw_identities = false;  ///< second- and third-order MW identities
    std::array<bool, 4> relation{};
    std::array<bool, 4> mw_row{};  ///< row k including K = 0
    bool lin = false;
};

template <Scalar S>
struct PointVerdict {
    Point<S> point;
    bool admissible = false;
    std::string skip_reason;
    std::optional<InvariantSet<S>> invariants;
    Residuals<S> residuals;
    Conditions conditions;
    LabelSet labels;
    SubwebProfile profile;
    std::vector<std::string> notes;
    /// Label implications that failed; empty on a consistent run.
    std::vector<std::string> anomalies;
};

template <Scalar S>
PointVerdict<S> classify_point(const WebSpec& spec, const Point<S>& p);

/// Labels from residuals; exposed so a rescaled frame can be classified too.
template <Scalar S>
void assign_labels(PointVerdict<S>& v, double epsilon);

struct Grid {
    int nx = 9;
    int ny = 9;
};

template <Scalar S>
std::vector<Point<S>> grid_points(const Domain& domain, const Grid& grid);

struct ResidualSummary {
    double max_abs = 0.0;
    double max_relative = 0.0;
};

template <Scalar S>
struct RegionReport {
    Grid grid;
    std::vector<PointVerdict<S>> points;
    LabelSet labels;
    std::size_t skipped = 0;
    std::map<std::string, ResidualSummary> residuals;
    double max_abs_K = 0.0;
    std::vector<std::string> notes;
    std::vector<std::string> anomalies;
};

/// Classifies every grid point (in parallel) and intersects the labels.
/// Throws EmptyAdmissibleSet when no point is admissible.
template <Scalar S>
RegionReport<S> classify_region(const WebSpec& spec, const Grid& grid);

}  // namespace web4
