#include "web4/report.hpp"

#include "web4/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace web4 {

namespace {

void write(std::ostringstream& out, const Json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ",\n";
                first = false;
                out << inner << Json(it.key()).dump() << ": ";
                write(out, it.value(), indent + 1);
            }
            out << "\n" << pad << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            out << "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out << ",\n";
                first = false;
                out << inner;
                write(out, v, indent + 1);
            }
            out << "\n" << pad << "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out << "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf;
            return;
        }
        default:
            out << j.dump();
    }
}

std::string scalar_text(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
        return buf;
    }
    return j.dump();
}

bool is_scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void pretty(std::ostringstream& out, const Json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const Json& v = it.value();
            if (is_scalar(v)) {
                out << pad << it.key() << ": " << scalar_text(v) << "\n";
            } else if (v.is_array() && std::all_of(v.begin(), v.end(), is_scalar)) {
                out << pad << it.key() << ": [";
                bool first = true;
                for (const auto& x : v) {
                    out << (first ? "" : ", ") << scalar_text(x);
                    first = false;
                }
                out << "]\n";
            } else {
                out << pad << it.key() << ":\n";
                pretty(out, v, indent + 1);
            }
        }
    } else if (j.is_array()) {
        std::size_t k = 0;
        for (const auto& v : j) {
            out << pad << "- [" << k++ << "]\n";
            if (is_scalar(v)) {
                out << pad << "  " << scalar_text(v) << "\n";
            } else {
                pretty(out, v, indent + 1);
            }
        }
    } else {
        out << pad << scalar_text(j) << "\n";
    }
}

}  // namespace

std::string serialize(const Json& doc) {
    std::ostringstream out;
    write(out, doc, 0);
    out << "\n";
    return out.str();
}

std::string render_pretty(const Json& doc) {
    std::ostringstream out;
    pretty(out, doc, 0);
    return out.str();
}

template <Scalar S>
Json number(const S& v) {
    return Json(to_double(v));
}

template <Scalar S>
Json point_json(const Point<S>& p) {
    return {{"x", number(p.x)}, {"y", number(p.y)}};
}

Json labels_json(const LabelSet& labels) {
    Json arr = Json::array();
    for (Label l : labels) arr.push_back(std::string(name(l)));
    return arr;
}

template <Scalar S>
Json invariants_json(const InvariantSet<S>& inv) {
    Json values = Json::object();
    for (Entry e : kEntries) values[std::string(name(e))] = number(inv[e]);
    Json subwebs = Json::object();
    for (std::size_t t = 0; t < kTriples.size(); ++t) {
        subwebs[std::string(name(kTriples[t]))] = {{"K", number(inv.K_sub[t])},
                                                    {"Theta", number(inv.Theta_sub[t])}};
    }
    Json weights = Json::object();
    for (Entry e : kEntries) weights[std::string(name(e))] = weight(e);
    Json out = {
        {"values", values},
        {"weights", weights},
        {"subwebs", subwebs},
        {"gauge",
         {{"g1", number(inv.gauge[0])},
          {"g2", number(inv.gauge[1])},
          {"g3", number(inv.gauge[2])},
          {"surface", number(inv.surface)}}},
    };
    if constexpr (is_exact_v<S>) {
        Json exact = Json::object();
        for (Entry e : kEntries) exact[std::string(name(e))] = exact_string(inv[e]);
        for (std::size_t t = 0; t < kTriples.size(); ++t) {
            const std::string n(name(kTriples[t]));
            exact["K" + n] = exact_string(inv.K_sub[t]);
            exact["Theta" + n] = exact_string(inv.Theta_sub[t]);
        }
        exact["surface"] = exact_string(inv.surface);
        out["exact"] = exact;
    }
    return out;
}

template <Scalar S>
Json residuals_json(const Residuals<S>& r) {
    Json out = Json::object();
    for (const auto& [key, res] : r.named()) {
        Json entry = {{"value", number(res->value)}, {"scale", Json(res->scale)},
                      {"relative", Json(relative(*res))}};
        if constexpr (is_exact_v<S>) entry["exact"] = exact_string(res->value);
        out[key] = entry;
    }
    return out;
}

template <Scalar S>
Json verdict_json(const PointVerdict<S>& v) {
    Json out = {{"point", point_json(v.point)}, {"admissible", v.admissible}};
    if (!v.admissible) {
        out["skip_reason"] = v.skip_reason;
        return out;
    }
    out["invariants"] = invariants_json(*v.invariants);
    out["residuals"] = residuals_json(v.residuals);
    out["labels"] = labels_json(v.labels);
    Json vanish = Json::array();
    for (std::size_t t = 0; t < 4; ++t) {
        if (v.profile.vanishing[t]) vanish.push_back(std::string(name(kTriples[t])));
    }
    Json equal = Json::array();
    std::size_t pair = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j, ++pair) {
            if (v.profile.equal[pair]) {
                equal.push_back(std::string(name(kTriples[i])) + "=" + std::string(name(kTriples[j])));
            }
        }
    }
    out["subweb_profile"] = {{"vanishing", vanish}, {"equal", equal}};
    if (v.profile.apw) {
        out["subweb_profile"]["apw"] = *v.profile.apw;
        out["subweb_profile"]["apw_pattern_holds"] = v.profile.pattern_holds;
    }
    out["notes"] = v.notes;
    out["anomalies"] = v.anomalies;
    return out;
}

Json spec_json(const SpecFile& file) {
    const auto& s = file.spec;
    Json out = {
        {"u1", file.source_u[0]},
        {"u2", file.source_u[1]},
        {"u3", file.source_u[2]},
        {"domain", {s.domain.xmin, s.domain.xmax, s.domain.ymin, s.domain.ymax}},
        {"backend", std::string(to_string(s.backend))},
        {"order", s.order},
        {"epsilon", s.epsilon},
        {"grid", {file.grid.nx, file.grid.ny}},
    };
    out[s.fourth_kind == FourthKind::potential ? "u4" : "a"] = file.source_fourth;
    return out;
}

template <Scalar S>
Json invariants_document(const SpecFile& file, const Point<S>& p) {
    const auto gp = check_general_position(file.spec, p);
    if (!gp.failure.empty()) throw WebError(ErrorKind::degenerate_web_point, gp.failure);
    if (const auto pairs = gp.coincident_pairs(); !pairs.empty()) {
        throw WebError(ErrorKind::degenerate_web_point,
                       "general position violated: foliations " + std::to_string(pairs.front().first) +
                           "," + std::to_string(pairs.front().second));
    }
    const auto v = classify_point(file.spec, p);
    if (!v.admissible) throw WebError(ErrorKind::degenerate_web_point, v.skip_reason);
    Json doc = verdict_json(v);
    doc["command"] = "invariants";
    doc["spec"] = spec_json(file);
    doc["gauge_note"] = kGaugeNote;
    return doc;
}

template <Scalar S>
Json classify_document(const SpecFile& file, const RegionReport<S>& region) {
    Json points = Json::array();
    for (const auto& v : region.points) points.push_back(verdict_json(v));
    Json maxres = Json::object();
    for (const auto& [key, s] : region.residuals) {
        maxres[key] = {{"abs", s.max_abs}, {"relative", s.max_relative}};
    }
    Json aggregate = {
        {"labels", labels_json(region.labels)},
        {"max_residuals", maxres},
        {"skipped", region.skipped},
        {"admissible", region.points.size() - region.skipped},
        {"max_abs_K", region.max_abs_K},
        {"gauge_note", kGaugeNote},
        {"notes", region.notes},
        {"anomalies", region.anomalies},
    };
    return {
        {"command", "classify"},
        {"spec", spec_json(file)},
        {"grid", {region.grid.nx, region.grid.ny}},
        {"points", points},
        {"aggregate", aggregate},
    };
}

#define WEB4_INSTANTIATE(S)                                                                        \
    template Json number(const S&);                                                               \
    template Json point_json(const Point<S>&);                                                    \
    template Json invariants_json(const InvariantSet<S>&);                                        \
    template Json residuals_json(const Residuals<S>&);                                            \
    template Json verdict_json(const PointVerdict<S>&);                                           \
    template Json invariants_document(const SpecFile&, const Point<S>&);                          \
    template Json classify_document(const SpecFile&, const RegionReport<S>&);

WEB4_INSTANTIATE(double)
WEB4_INSTANTIATE(Rational)

#undef WEB4_INSTANTIATE

}  // namespace web4
