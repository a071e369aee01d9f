#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "jacobian.hpp"
#include "polynomial.hpp"
#include "pseries.hpp"
#include "rational.hpp"

namespace germ_radius {

struct ShellValue {
    unsigned degree;
    double value; // (max_{|γ|=d} |F_γ|)^{−1/d}
};

struct RadiusEstimate {
    std::vector<ShellValue> per_shell; // nonzero shells only, ascending degree
    double estimate = 0.0;
    unsigned window = 0;
    std::string precision_note;
};

/// Root-test estimate: median of the per-shell values over the last k
/// nonzero shells (degree ≥ 1). Empty shells are skipped.
inline RadiusEstimate estimate_radius(const TruncatedSeries& f, unsigned window = 10) {
    if (window == 0) throw InputError("radius", "window must be positive");
    std::map<unsigned, Rational> shell_max;
    for (const auto& [g, c] : f.terms()) {
        if (g.degree() == 0) continue;
        Rational m = abs(c);
        auto [it, inserted] = shell_max.try_emplace(g.degree(), m);
        if (!inserted && it->second < m) it->second = m;
    }
    if (shell_max.size() < 2 * static_cast<std::size_t>(window))
        throw DomainError("radius", "too few nonzero shells: have " + std::to_string(shell_max.size()) +
                                        ", need " + std::to_string(2 * window));
    RadiusEstimate out;
    out.window = window;
    // Magnitudes are handled as logarithms through a mantissa/exponent split,
    // so coefficients far outside double range stay finite.
    for (const auto& [d, m] : shell_max)
        out.per_shell.push_back({d, std::exp(-log_abs(m) / static_cast<double>(d))});
    std::vector<double> tail;
    for (std::size_t i = out.per_shell.size() - window; i < out.per_shell.size(); ++i)
        tail.push_back(out.per_shell[i].value);
    std::sort(tail.begin(), tail.end());
    const std::size_t mid = tail.size() / 2;
    out.estimate = tail.size() % 2 ? tail[mid] : 0.5 * (tail[mid - 1] + tail[mid]);
    out.precision_note = "double; shell maxima exact, logarithms via 2-adic exponent split";
    return out;
}

struct BoundReport {
    unsigned lambda;
    double ratio;          // r_G / r_F^λ
    Rational d_alpha_delta;
    double d_alpha_delta_squared;
};

inline BoundReport bound_report(const JacobianProfile& prof, double r_f, double r_g) {
    double dad = prof.d_alpha_delta.get_d();
    return {prof.lambda, r_g / std::pow(r_f, static_cast<double>(prof.lambda)), prof.d_alpha_delta,
            dad * dad};
}

struct FitResult {
    double slope;
    double intercept;
    double rms_residual;
    std::vector<double> residuals;
};

/// Least-squares slope of log y against log x.
inline FitResult log_log_fit(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw DomainError("radius", "scaling fit needs at least two points");
    std::vector<double> xs, ys;
    for (const auto& [x, y] : points) {
        if (!(x > 0) || !(y > 0)) throw DomainError("radius", "scaling fit needs positive data");
        xs.push_back(std::log(x));
        ys.push_back(std::log(y));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 1e-300) throw DomainError("radius", "degenerate family: constant abscissa");
    FitResult fit{sxy / sxx, 0.0, 0.0, {}};
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        fit.residuals.push_back(r);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

struct FamilyMember {
    double t;
    double r_f;
    double r_g;
};

enum class FitAxis { kRadiusF, kParameter };

/// Exponent of r_G against r_F (or against the family parameter t).
inline FitResult scaling_fit(std::span<const FamilyMember> family, FitAxis axis = FitAxis::kRadiusF) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& m : family) pts.emplace_back(axis == FitAxis::kRadiusF ? m.r_f : m.t, m.r_g);
    return log_log_fit(pts);
}

struct StratumSample {
    Point point;
    unsigned mu;
    unsigned nu;
    MultiIndex alpha;
};

struct Stratum {
    unsigned mu;
    unsigned nu;
    std::optional<MultiIndex> alpha; // set when α is constant on the group
    std::vector<MultiIndex> alphas;  // distinct α seen, ascending
    std::vector<StratumSample> samples;
};

struct Stratification {
    std::vector<Stratum> strata;          // by decreasing μ, then decreasing ν
    std::vector<Point> singular_points;   // Δ ≡ 0 to the working degree
    unsigned degree;
};

/// Exact profile at every grid point, grouped by (μ, ν).
inline Stratification stratify(const PolynomialMap& map, std::span<const Point> grid, unsigned degree) {
    Stratification out{{}, {}, degree};
    std::map<std::pair<unsigned, unsigned>, Stratum> groups;
    for (const Point& a : grid) {
        if (a.size() != map.dimension())
            throw InputError("radius", "grid point " + to_string(a) + " has wrong dimension");
        std::optional<JacobianProfile> prof;
        try {
            prof = profile(map.germ_at(a, degree));
        } catch (const SingularJacobian&) {
            out.singular_points.push_back(a);
            continue;
        }
        auto& g = groups.try_emplace({prof->mu, prof->nu}, Stratum{prof->mu, prof->nu, {}, {}, {}}).first->second;
        g.samples.push_back({a, prof->mu, prof->nu, prof->alpha});
    }
    for (auto& [key, s] : groups) {
        for (const auto& smp : s.samples)
            if (std::find(s.alphas.begin(), s.alphas.end(), smp.alpha) == s.alphas.end())
                s.alphas.push_back(smp.alpha);
        std::sort(s.alphas.begin(), s.alphas.end(), GradedLexLess{});
        if (s.alphas.size() == 1) s.alpha = s.alphas.front();
    }
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) out.strata.push_back(std::move(it->second));
    return out;
}

} // namespace germ_radius
