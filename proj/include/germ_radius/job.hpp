#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cramerops.hpp"
#include "error.hpp"
#include "io.hpp"
#include "jacobian.hpp"
#include "parse.hpp"
#include "polynomial.hpp"
#include "pseries.hpp"
#include "radius.hpp"
#include "recovery.hpp"

namespace germ_radius {

enum class Command { kCompose, kRecover, kProfile, kStratify, kRadius, kVerify };

inline Command command_from_string(const std::string& s) {
    static const std::map<std::string, Command> table{
        {"compose", Command::kCompose}, {"recover", Command::kRecover}, {"profile", Command::kProfile},
        {"stratify", Command::kStratify}, {"radius", Command::kRadius}, {"verify", Command::kVerify}};
    auto it = table.find(s);
    if (it == table.end()) throw InputError("cli", "unknown command '" + s + "'");
    return it->second;
}

inline std::string to_string(Command c) {
    switch (c) {
    case Command::kCompose: return "compose";
    case Command::kRecover: return "recover";
    case Command::kProfile: return "profile";
    case Command::kStratify: return "stratify";
    case Command::kRadius: return "radius";
    case Command::kVerify: return "verify";
    }
    return "?";
}

/// A parsed job file. The map is either an exact polynomial map (re-expanded
/// at any centre and degree) or a list of series literals (fixed truncation).
struct JobSpec {
    std::vector<std::string> variables;
    std::vector<std::string> image_variables;
    std::optional<PolynomialMap> polynomial_map;
    std::optional<MapGerm> series_map;
    Point center;
    unsigned degree = 1;
    std::optional<Command> command;
    nlohmann::json payload; // the whole job object; commands read their own fields

    [[nodiscard]] std::size_t dimension() const { return variables.size(); }

    [[nodiscard]] MapGerm germ(const Point& at, unsigned trunc) const {
        if (polynomial_map) return polynomial_map->germ_at(at, trunc);
        if (at != series_map->center())
            throw InputError("cli", "a series-literal map cannot be recentred");
        if (trunc > series_map->trunc_degree())
            throw InsufficientTruncation("cli", trunc, series_map->trunc_degree(), "series-literal map");
        return series_map->truncated(trunc);
    }

    [[nodiscard]] MapGerm germ() const { return germ(center, degree); }

    /// Largest degree available for the map at the job centre.
    [[nodiscard]] unsigned map_capacity(unsigned wanted) const {
        return polynomial_map ? wanted : std::min(wanted, series_map->trunc_degree());
    }
};

struct RunOptions {
    std::optional<unsigned> degree;
    std::optional<unsigned> window;
    bool trace = false;
};

inline JobSpec parse_job(const nlohmann::json& j) {
    using io::json;
    if (!j.is_object()) throw InputError("cli", "job file must hold a JSON object");
    JobSpec job;
    job.payload = j;
    if (j.contains("command")) job.command = command_from_string(j["command"].get<std::string>());
    if (!j.contains("variables") || !j["variables"].is_array())
        throw InputError("cli", "job needs a 'variables' array");
    job.variables = j["variables"].get<std::vector<std::string>>();
    validate_variables(job.variables);
    const std::size_t n = job.variables.size();
    if (j.contains("image_variables")) {
        job.image_variables = j["image_variables"].get<std::vector<std::string>>();
        if (job.image_variables.size() != n)
            throw InputError("cli", "image_variables must have one name per variable");
    } else {
        for (std::size_t i = 0; i < n; ++i)
            job.image_variables.push_back(n == 1 ? "y" : "y" + std::to_string(i + 1));
    }
    validate_variables(job.image_variables);
    if (j.contains("center")) {
        job.center = io::point_from_json(j["center"]);
        if (job.center.size() != n) throw InputError("cli", "centre must have one entry per variable");
    } else {
        job.center.assign(n, Rational(0));
    }
    if (!j.contains("degree") || !j["degree"].is_number_unsigned())
        throw InputError("cli", "job needs a natural 'degree'");
    job.degree = j["degree"].get<unsigned>();
    if (job.degree < 1) throw InputError("cli", "degree must be >= 1");
    if (j.contains("map")) {
        if (!j["map"].is_array()) throw InputError("cli", "'map' must be an array of expressions");
        job.polynomial_map = parse_map(j["map"].get<std::vector<std::string>>(), job.variables);
    } else if (j.contains("map_series")) {
        std::vector<TruncatedSeries> comps;
        for (const auto& s : j["map_series"]) comps.push_back(io::series_from_json(s));
        job.series_map = MapGerm(std::move(comps));
        if (job.series_map->dimension() != n)
            throw InputError("cli", "map_series has the wrong number of components");
        job.center = job.series_map->center();
    } else {
        throw InputError("cli", "job needs 'map' (expressions) or 'map_series' (series literals)");
    }
    return job;
}

inline JobSpec load_job(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cli", "cannot open job file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("cli", std::string("job file is not valid JSON: ") + e.what());
    }
    return parse_job(j);
}

/// Output of one job: file name → contents, plus the process exit code.
struct JobOutput {
    std::map<std::string, std::string> files;
    int exit_code = 0;
};

namespace detail {

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// A series field is either a literal object or an expression string in the
// given variables, re-expanded exactly at `center` to `trunc`.
inline TruncatedSeries series_field(const nlohmann::json& v, const std::vector<std::string>& vars,
                                    const Point& center, unsigned trunc) {
    if (v.is_string()) return parse_polynomial(v.get<std::string>(), vars).to_series(center, trunc);
    TruncatedSeries s = io::series_from_json(v);
    if (s.center() != center)
        throw InputError("cli", "series literal centred at " + to_string(s.center()) + ", expected " +
                                    to_string(center));
    return s;
}

// F for recover/radius: given directly as "f", or as "g" to be composed first.
inline TruncatedSeries source_series(const JobSpec& job, const nlohmann::json& where,
                                     const MapGerm& germ) {
    if (where.contains("f")) return series_field(where["f"], job.variables, germ.center(), germ.trunc_degree());
    if (where.contains("g")) {
        auto g = series_field(where["g"], job.image_variables, germ.image_point(), germ.trunc_degree());
        return compose(g, germ);
    }
    throw InputError("cli", "job needs 'f' (a series at the centre) or 'g' (a series at the image)");
}

inline std::optional<unsigned> natural_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_number_unsigned()) throw InputError("cli", std::string("'") + key + "' must be a natural");
    return j[key].get<unsigned>();
}

inline nlohmann::json run_compose(const JobSpec& job) {
    MapGerm germ = job.germ();
    if (!job.payload.contains("g")) throw InputError("cli", "compose job needs 'g'");
    auto g = series_field(job.payload["g"], job.image_variables, germ.image_point(), germ.trunc_degree());
    return {{"f", io::to_json(compose(g, germ))}, {"image_point", io::to_json(germ.image_point())}};
}

inline RecoveryReport recover_member(const JobSpec& job, const nlohmann::json& where, const MapGerm& germ,
                                     bool trace) {
    TruncatedSeries f = source_series(job, where, germ);
    unsigned available = std::min(f.trunc_degree(), germ.trunc_degree());
    unsigned mu = profile(germ).mu;
    unsigned b = natural_field(where, "B_G").value_or(max_recoverable_degree(mu, available));
    return recover(germ, f, b, RecoveryOptions{trace});
}

inline nlohmann::json run_profile(const JobSpec& job) {
    MapGerm germ = job.germ();
    nlohmann::json out = {{"profile", io::to_json(profile(germ))}};
    try {
        auto [c1, c2] = coefficient_bound_constants(germ);
        out["coefficient_bounds"] = {{"c1", to_string(c1)}, {"c2", to_string(c2)}};
    } catch (const DomainError& e) {
        out["coefficient_bounds"] = nullptr;
        out["coefficient_bounds_note"] = e.what();
    }
    return out;
}

inline std::vector<Point> grid_from_job(const nlohmann::json& j, std::size_t n) {
    std::vector<Point> grid;
    if (j.contains("grid")) {
        for (const auto& p : j["grid"]) grid.push_back(io::point_from_json(p));
    } else if (j.contains("grid_axes")) {
        const auto& axes = j["grid_axes"];
        if (!axes.is_array() || axes.size() != n)
            throw InputError("cli", "grid_axes needs one value list per variable");
        std::vector<Point> values;
        for (const auto& ax : axes) values.push_back(io::point_from_json(ax));
        Point current(n);
        auto product = [&](auto&& self, std::size_t i) -> void {
            if (i == n) {
                grid.push_back(current);
                return;
            }
            for (const auto& v : values[i]) {
                current[i] = v;
                self(self, i + 1);
            }
        };
        product(product, 0);
    } else {
        throw InputError("cli", "stratify job needs 'grid' or 'grid_axes'");
    }
    return grid;
}

struct RadiusMember {
    nlohmann::json report;
    std::optional<double> r_f; // empty when F has too few nonzero shells (e.g. a polynomial)
    double r_g;
    std::optional<RadiusEstimate> f_estimate;
    RadiusEstimate g_estimate;
};

inline RadiusMember radius_member(const JobSpec& job, const nlohmann::json& where, const Point& center,
                                  unsigned degree, unsigned window, bool trace) {
    MapGerm germ = job.germ(center, degree);
    RecoveryReport rec = recover_member(job, where, germ, trace);
    TruncatedSeries f = source_series(job, where, germ);
    RadiusMember out{{}, std::nullopt, 0.0, std::nullopt, estimate_radius(rec.g_series, window)};
    out.r_g = out.g_estimate.estimate;
    out.report = {{"center", io::to_json(center)},
                  {"r_g", io::to_json(out.g_estimate)},
                  {"profile", io::to_json(rec.profile)},
                  {"recovered_degree", rec.g_series.trunc_degree()},
                  {"composite", rec.is_composite()}};
    try {
        out.f_estimate = estimate_radius(f, window);
        out.r_f = out.f_estimate->estimate;
        out.report["r_f"] = io::to_json(*out.f_estimate);
        out.report["bound"] = io::to_json(bound_report(rec.profile, *out.r_f, out.r_g));
    } catch (const DomainError& e) {
        out.report["r_f"] = nullptr;
        out.report["r_f_note"] = e.what();
        out.report["bound"] = nullptr;
    }
    return out;
}

} // namespace detail

/// One identity-suite check.
struct VerifyCheck {
    std::string name;
    bool pass;
    nlohmann::json detail;
};

/// The full identity suite on one germ: chain rule, Cramer base case,
/// adjugate identity, T-table defining identity on a monomial basis, order
/// bounds, extraction lemma and a randomized round trip.
inline std::vector<VerifyCheck> verify_suite(const JobSpec& job, unsigned max_beta, unsigned g_degree,
                                             unsigned round_trips, std::uint64_t seed,
                                             nlohmann::json* table_dump = nullptr) {
    std::vector<VerifyCheck> checks;
    MapGerm germ = job.germ();
    const std::size_t n = germ.dimension();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> small(-3, 3);
    auto random_g = [&](unsigned deg, unsigned trunc) {
        TruncatedSeries g(germ.image_point(), trunc);
        for (const auto& idx : enumerate_upto(n, deg)) g.set(idx, make_rational(small(rng), 1 + (small(rng) + 3) % 3));
        return g;
    };

    {
        bool pass = true;
        for (int trial = 0; trial < 3; ++trial) {
            auto g = random_g(3, germ.trunc_degree());
            for (std::size_t i = 0; i < n; ++i) pass = pass && chain_rule_residual(g, germ, i).is_zero();
        }
        checks.push_back({"chain_rule", pass, {{"trials", 3}}});
    }
    {
        bool pass = true;
        for (int trial = 0; trial < 3; ++trial) {
            auto g = random_g(3, germ.trunc_degree());
            for (std::size_t j = 0; j < n; ++j) pass = pass && cramer_base_residual(germ, g, j).is_zero();
        }
        checks.push_back({"cramer_base_case", pass, {{"trials", 3}}});
    }
    {
        SeriesMatrix jac = jacobian_matrix(germ);
        SeriesMatrix adj = adjugate(jac);
        SeriesMatrix scalar = SeriesMatrix::scalar(n, determinant(jac));
        bool pass = (jac * adj) == scalar && (adj * jac) == scalar;
        checks.push_back({"adjugate_identity", pass, nlohmann::json::object()});
    }

    TOperatorTable table = build_t_operators(germ, max_beta, germ.trunc_degree());
    if (table_dump) *table_dump = io::to_json(table);
    {
        bool pass = true;
        std::size_t count = 0;
        nlohmann::json failures = nlohmann::json::array();
        for (const auto& beta : enumerate_upto(n, max_beta)) {
            if (beta.is_zero()) continue;
            for (const auto& mono : enumerate_upto(n, g_degree)) {
                TruncatedSeries g(germ.image_point(), germ.trunc_degree());
                g.set(mono, Rational(1));
                auto residual = verify_defining_identity(table, g, beta);
                ++count;
                if (!residual.is_zero()) {
                    pass = false;
                    failures.push_back({{"beta", io::to_json(beta)}, {"g", io::to_json(mono)}});
                }
            }
        }
        checks.push_back({"t_table_identity", pass, {{"cases", count}, {"failures", failures}}});
    }
    {
        bool pass = true;
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : verify_order_bound(table)) {
            pass = pass && r.pass;
            rows.push_back({{"beta", io::to_json(r.beta)},
                            {"alpha", io::to_json(r.alpha)},
                            {"observed_order", r.observed_order ? nlohmann::json(*r.observed_order) : nlohmann::json(nullptr)},
                            {"required_bound", r.required_bound},
                            {"pass", r.pass}});
        }
        checks.push_back({"order_bound", pass, {{"rows", rows}}});
    }
    {
        const JacobianProfile& prof = table.profile();
        unsigned top = 0;
        while (top < max_beta + 1 && (2 * (top + 1) - 1) * prof.mu <= prof.delta.trunc_degree()) ++top;
        bool pass = top >= 1;
        nlohmann::json levels = nlohmann::json::array();
        for (unsigned m = 1; m <= top; ++m) {
            auto c = check_extraction_lemma(prof, m);
            pass = pass && c.pass;
            levels.push_back({{"m", m}, {"pass", c.pass}, {"coefficient", to_string(c.coefficient)},
                              {"expected", to_string(c.expected)}});
        }
        checks.push_back({"extraction_lemma", pass, {{"levels", levels}}});
    }
    {
        const unsigned b = 3;
        unsigned mu = table.profile().mu;
        unsigned needed = recovery_working_degree(mu, b);
        bool pass = true;
        nlohmann::json detail = {{"B_G", b}, {"working_degree", needed}};
        if (job.map_capacity(needed) < needed) {
            detail["skipped"] = "map truncation below the working degree";
        } else {
            MapGerm work = job.germ(job.center, needed);
            for (unsigned t = 0; t < round_trips; ++t) {
                TruncatedSeries g0(work.image_point(), needed); // polynomial: G₀∘φ exact to `needed`
                for (const auto& idx : enumerate_upto(n, b)) g0.set(idx, make_rational(small(rng), 1 + (small(rng) + 3) % 4));
                auto f = compose(g0, work);
                auto rep = recover(work, f, b);
                pass = pass && rep.g_series == g0.truncated(b) && rep.is_composite();
            }
            detail["trials"] = round_trips;
        }
        checks.push_back({"round_trip", pass, detail});
    }
    return checks;
}

/// Runs one job and returns the report files. Domain and input errors
/// propagate as exceptions; the CLI maps them to exit codes.
inline JobOutput run(const JobSpec& job_in, Command command, const RunOptions& opts = {}) {
    JobSpec job = job_in;
    if (job.command && *job.command != command)
        throw InputError("cli", "job file is a '" + to_string(*job.command) + "' job, not '" +
                                    to_string(command) + "'");
    if (opts.degree) {
        if (*opts.degree < 1) throw InputError("cli", "degree must be >= 1");
        job.degree = *opts.degree;
    }
    const unsigned window =
        opts.window.value_or(detail::natural_field(job.payload, "window").value_or(10));
    JobOutput out;
    const std::string name = to_string(command);
    switch (command) {
    case Command::kCompose:
        out.files[name + ".json"] = detail::dump(detail::run_compose(job));
        break;
    case Command::kProfile:
        out.files[name + ".json"] = detail::dump(detail::run_profile(job));
        break;
    case Command::kRecover: {
        MapGerm germ = job.germ();
        RecoveryReport rep = detail::recover_member(job, job.payload, germ, opts.trace);
        out.files[name + ".json"] = detail::dump(io::to_json(rep, opts.trace));
        break;
    }
    case Command::kStratify: {
        if (!job.polynomial_map) throw InputError("cli", "stratify needs a polynomial 'map'");
        auto grid = detail::grid_from_job(job.payload, job.dimension());
        Stratification s = stratify(*job.polynomial_map, grid, job.degree);
        out.files[name + ".json"] = detail::dump(io::to_json(s));
        out.files[name + ".csv"] = io::stratification_csv(s);
        break;
    }
    case Command::kRadius: {
        if (job.payload.contains("family")) {
            std::vector<FamilyMember> family;
            nlohmann::json members = nlohmann::json::array();
            for (const auto& member : job.payload["family"]) {
                if (!member.is_object() || !member.contains("t"))
                    throw InputError("cli", "family members need a parameter 't'");
                // Members inherit job-level fields (f, g, B_G) unless they override them.
                nlohmann::json m = job.payload;
                m.erase("family");
                m.update(member);
                Point c = m.contains("center") ? io::point_from_json(m["center"]) : job.center;
                auto r = detail::radius_member(job, m, c, job.degree, window, opts.trace);
                double t = io::rational_from_json(m["t"]).get_d();
                family.push_back({t, r.r_f.value_or(std::nan("")), r.r_g});
                r.report["t"] = member["t"];
                members.push_back(r.report);
            }
            nlohmann::json fits;
            for (auto [key, axis] : {std::pair{"r_g_vs_r_f", FitAxis::kRadiusF}, std::pair{"r_g_vs_t", FitAxis::kParameter}}) {
                try {
                    fits[key] = io::to_json(scaling_fit(family, axis));
                } catch (const DomainError& e) {
                    fits[key] = e.what();
                }
            }
            out.files[name + ".json"] = detail::dump({{"members", members}, {"fits", fits}});
        } else {
            auto r = detail::radius_member(job, job.payload, job.center, job.degree, window, opts.trace);
            out.files[name + ".json"] = detail::dump(r.report);
            if (r.f_estimate) out.files["shells_f.csv"] = io::shells_csv(*r.f_estimate);
            out.files["shells_g.csv"] = io::shells_csv(r.g_estimate);
        }
        break;
    }
    case Command::kVerify: {
        unsigned max_beta = detail::natural_field(job.payload, "max_beta_degree").value_or(3);
        unsigned g_degree = detail::natural_field(job.payload, "g_degree").value_or(4);
        unsigned trips = detail::natural_field(job.payload, "round_trips").value_or(5);
        std::uint64_t seed = detail::natural_field(job.payload, "seed").value_or(1);
        nlohmann::json table;
        auto checks = verify_suite(job, max_beta, g_degree, trips, seed, &table);
        nlohmann::json report = nlohmann::json::array();
        bool all = true;
        for (const auto& c : checks) {
            all = all && c.pass;
            report.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        }
        out.files[name + ".json"] = detail::dump({{"checks", report}, {"pass", all}});
        out.files["t_table.json"] = detail::dump(table);
        out.exit_code = all ? 0 : 1;
        break;
    }
    }
    return out;
}

inline void write_output(const JobOutput& out, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [file, contents] : out.files) {
        std::ofstream os(dir / file, std::ios::binary);
        if (!os) throw InputError("cli", "cannot write " + (dir / file).string());
        os << contents;
    }
}

} // namespace germ_radius
