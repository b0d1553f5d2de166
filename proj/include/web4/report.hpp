#pragma once

#include "web4/classify.hpp"
#include "web4/specfile.hpp"

#include <json.hpp>

#include <string>

namespace web4 {

/// Object keys are kept sorted by the default std::map backing.
using Json = nlohmann::json;

/// Deterministic text form: sorted keys, two-space indent, every floating
/// value printed with 17 significant digits, non-finite values as null.
std::string serialize(const Json& doc);

/// Indented human-readable rendering of the same document.
std::string render_pretty(const Json& doc);

/// Scalar as a JSON number; exact rationals also go into the exact block.
template <Scalar S>
Json number(const S& v);

template <Scalar S>
Json point_json(const Point<S>& p);

template <Scalar S>
Json invariants_json(const InvariantSet<S>& inv);

template <Scalar S>
Json residuals_json(const Residuals<S>& r);

template <Scalar S>
Json verdict_json(const PointVerdict<S>& v);

Json labels_json(const LabelSet& labels);

Json spec_json(const SpecFile& file);

/// Full record for one point: invariants, subweb curvatures, residuals, labels.
/// Throws DegenerateWebPoint when the point is not admissible.
template <Scalar S>
Json invariants_document(const SpecFile& file, const Point<S>& p);

template <Scalar S>
Json classify_document(const SpecFile& file, const RegionReport<S>& region);

inline constexpr const char* kGaugeNote =
    "entries are given in the canonical gauge omega_k = g_k du_k; under omega -> s omega an "
    "entry of weight w scales by s^-w, while a and the curvature forms theta_abc are invariant";

}  // namespace web4
