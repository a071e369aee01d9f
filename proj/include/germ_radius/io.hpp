#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cramerops.hpp"
#include "error.hpp"
#include "jacobian.hpp"
#include "mindex.hpp"
#include "pseries.hpp"
#include "radius.hpp"
#include "recovery.hpp"

namespace germ_radius::io {

using nlohmann::json;

inline json to_json(const MultiIndex& g) {
    json out = json::array();
    for (unsigned e : g.exponents()) out.push_back(e);
    return out;
}

inline json to_json(const Point& p) {
    json out = json::array();
    for (const auto& q : p) out.push_back(to_string(q));
    return out;
}

inline MultiIndex multi_index_from_json(const json& j, std::size_t n) {
    if (!j.is_array() || j.size() != n)
        throw InputError("io", "index must be an array of " + std::to_string(n) + " naturals");
    std::vector<unsigned> e;
    for (const auto& v : j) {
        if (!v.is_number_unsigned()) throw InputError("io", "index entries must be naturals");
        e.push_back(v.get<unsigned>());
    }
    return MultiIndex(std::span<const unsigned>(e));
}

/// Rationals arrive as "p/q" strings or plain integers.
inline Rational rational_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(std::to_string(j.get<long long>()));
    throw InputError("io", "rational must be a \"p/q\" string or an integer, got " + j.dump());
}

inline Point point_from_json(const json& j) {
    if (!j.is_array()) throw InputError("io", "point must be an array of rationals");
    Point p;
    for (const auto& v : j) p.push_back(rational_from_json(v));
    return p;
}

/// Series literal: {n, center, degree, terms: [{index, coeff}]}, terms in
/// graded-lex order, zero coefficients omitted.
inline json to_json(const TruncatedSeries& f) {
    json terms = json::array();
    for (const auto& [g, c] : f.terms()) terms.push_back({{"index", to_json(g)}, {"coeff", to_string(c)}});
    return {{"n", f.dimension()}, {"center", to_json(f.center())}, {"degree", f.trunc_degree()},
            {"terms", terms}};
}

inline TruncatedSeries series_from_json(const json& j) {
    if (!j.is_object()) throw InputError("io", "series literal must be an object");
    for (const char* key : {"n", "center", "degree", "terms"})
        if (!j.contains(key)) throw InputError("io", std::string("series literal missing '") + key + "'");
    if (!j["n"].is_number_unsigned() || !j["degree"].is_number_unsigned())
        throw InputError("io", "series literal: n and degree must be naturals");
    const auto n = j["n"].get<std::size_t>();
    Point center = point_from_json(j["center"]);
    if (center.size() != n) throw InputError("io", "series literal: centre has wrong dimension");
    TruncatedSeries out(center, j["degree"].get<unsigned>());
    std::set<std::vector<unsigned>> seen;
    for (const auto& t : j["terms"]) {
        if (!t.is_object() || !t.contains("index") || !t.contains("coeff"))
            throw InputError("io", "series term must be {index, coeff}");
        MultiIndex g = multi_index_from_json(t["index"], n);
        std::vector<unsigned> key(g.exponents().begin(), g.exponents().end());
        if (!seen.insert(key).second)
            throw InputError("io", "series literal repeats index " + to_string(g));
        if (g.degree() > out.trunc_degree())
            throw InputError("io", "series term " + to_string(g) + " exceeds degree " +
                                       std::to_string(out.trunc_degree()));
        out.set(g, rational_from_json(t["coeff"]));
    }
    return out;
}

inline json to_json(const JacobianProfile& p) {
    return {{"mu", p.mu},
            {"nu", p.nu},
            {"alpha", to_json(p.alpha)},
            {"lambda", p.lambda},
            {"d_alpha_delta", to_string(p.d_alpha_delta)},
            {"computed_at_degree", p.computed_at_degree}};
}

inline json to_json(const RecoveryReport& r, bool trace) {
    json out = {{"g", to_json(r.g_series)},
                {"residual", to_json(r.residual)},
                {"composite", r.is_composite()},
                {"max_recoverable_degree", r.max_recoverable_degree},
                {"working_degree", r.working_degree},
                {"profile", to_json(r.profile)}};
    if (auto lead = r.first_nonzero_residual())
        out["first_nonzero_residual"] = {{"index", to_json(lead->first)}, {"coeff", to_string(lead->second)}};
    else
        out["first_nonzero_residual"] = nullptr;
    if (trace) {
        json t = json::array();
        for (const auto& [beta, e] : r.per_beta_trace)
            t.push_back({{"beta", to_json(beta)},
                         {"h_coeff", to_string(e.h_coefficient)},
                         {"divisor", to_string(e.divisor)}});
        out["trace"] = t;
    }
    return out;
}

inline json to_json(const TOperatorTable& table) {
    json entries = json::array();
    for (const auto& [beta, row] : table.rows())
        for (const auto& [alpha, t] : row)
            entries.push_back({{"beta", to_json(beta)}, {"alpha", to_json(alpha)}, {"series", to_json(t)}});
    return {{"center", to_json(table.germ().center())},
            {"max_beta_degree", table.max_beta_degree()},
            {"working_degree", table.working_degree()},
            {"entries", entries}};
}

inline json to_json(const RadiusEstimate& r) {
    json shells = json::array();
    for (const auto& s : r.per_shell) shells.push_back({{"degree", s.degree}, {"value", s.value}});
    return {{"estimate", r.estimate}, {"window", r.window}, {"precision", r.precision_note},
            {"shells", shells}};
}

inline json to_json(const BoundReport& b) {
    return {{"lambda", b.lambda},
            {"ratio", b.ratio},
            {"d_alpha_delta", to_string(b.d_alpha_delta)},
            {"d_alpha_delta_squared", b.d_alpha_delta_squared}};
}

inline json to_json(const FitResult& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"rms_residual", f.rms_residual},
            {"residuals", f.residuals}};
}

inline json to_json(const Stratification& s) {
    json strata = json::array();
    for (const auto& st : s.strata) {
        json points = json::array();
        for (const auto& smp : st.samples) points.push_back(to_json(smp.point));
        json alphas = json::array();
        for (const auto& a : st.alphas) alphas.push_back(to_json(a));
        strata.push_back({{"mu", st.mu},
                          {"nu", st.nu},
                          {"alpha", st.alpha ? to_json(*st.alpha) : json(nullptr)},
                          {"alphas", alphas},
                          {"points", points}});
    }
    json singular = json::array();
    for (const auto& p : s.singular_points) singular.push_back(to_json(p));
    return {{"degree", s.degree}, {"strata", strata}, {"singular_points", singular}};
}

inline std::string shells_csv(const RadiusEstimate& r) {
    std::ostringstream os;
    os.precision(17);
    os << "degree,shell_value\n";
    for (const auto& s : r.per_shell) os << s.degree << "," << s.value << "\n";
    return os.str();
}

inline std::string stratification_csv(const Stratification& s) {
    std::ostringstream os;
    os << "point,mu,nu,alpha\n";
    for (const auto& st : s.strata)
        for (const auto& smp : st.samples)
            os << '"' << to_string(smp.point) << "\"," << smp.mu << "," << smp.nu << ",\""
               << to_string(smp.alpha) << "\"\n";
    for (const auto& p : s.singular_points) os << '"' << to_string(p) << "\",singular,singular,\n";
    return os.str();
}

} // namespace germ_radius::io
