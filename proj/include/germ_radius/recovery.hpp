#pragma once

#include <map>
#include <optional>
#include <vector>

#include "cramerops.hpp"
#include "error.hpp"
#include "jacobian.hpp"
#include "mindex.hpp"
#include "pseries.hpp"

namespace germ_radius {

/// Working degree needed to recover G up to degree B: the level-B extraction
/// coefficient sits at degree (2B−1)μ and the table loses one degree per level.
inline unsigned recovery_working_degree(unsigned mu, unsigned max_degree) {
    if (max_degree == 0) return 0;
    return (2 * max_degree - 1) * mu + max_degree;
}

/// Largest B with recovery_working_degree(μ, B) ≤ available.
inline unsigned max_recoverable_degree(unsigned mu, unsigned available) {
    unsigned b = 0;
    while (recovery_working_degree(mu, b + 1) <= available) ++b;
    return b;
}

/// H^β = Σ_{|α|≤|β|} T_α^β·D^αF. Pruned table entries are only accepted where
/// D^αF vanishes within truncation.
inline TruncatedSeries assemble_H(const TOperatorTable& table, const TruncatedSeries& f,
                                  const MultiIndex& beta) {
    if (f.center() != table.germ().center())
        throw InputError("recovery", "F is centred at " + to_string(f.center()) +
                                         " but the T-table at " + to_string(table.germ().center()));
    const unsigned m = beta.degree();
    const unsigned needed = (2 * m - 1) * table.profile().mu;
    const auto& row = table.row(beta);
    TruncatedSeries h(f.center(), f.trunc_degree());
    for (const MultiIndex& alpha : enumerate_upto(f.dimension(), m)) {
        if (alpha.degree() > f.trunc_degree())
            throw InsufficientTruncation("recovery", needed + m, f.trunc_degree(),
                                         "H^" + to_string(beta));
        TruncatedSeries df = derive(f, alpha);
        auto it = row.find(alpha);
        if (it == row.end()) {
            if (!df.is_zero())
                throw DomainError("recovery", "T-table was pruned at alpha=" + to_string(alpha) +
                                                  " but D^alpha F is nonzero");
            continue;
        }
        h = add(h, mul(it->second, df));
    }
    if (h.trunc_degree() < needed)
        throw InsufficientTruncation("recovery", needed, h.trunc_degree(), "H^" + to_string(beta));
    return h;
}

/// G_β = H^β_{(2m−1)α} / (β!·[Δ]_α^{2m−1}), m = |β|, with [Δ]_α the Taylor
/// coefficient (not the derivative) of Δ at α.
inline Rational extract_G_coefficient(const TruncatedSeries& h, const JacobianProfile& prof,
                                      const MultiIndex& beta) {
    const unsigned k = 2 * beta.degree() - 1;
    MultiIndex where = scale(prof.alpha, k);
    if (where.degree() > h.trunc_degree())
        throw InsufficientTruncation("recovery", where.degree(), h.trunc_degree(),
                                     "extraction for beta=" + to_string(beta));
    Rational divisor = Rational(mi_factorial(beta)) * pow(prof.alpha_coefficient(), k);
    return h.coefficient(where) / divisor;
}

struct ExtractionLemmaCheck {
    unsigned m;
    std::optional<unsigned> lowest_degree;     // order of Δ^{2m−1}
    std::optional<MultiIndex> lowest_index;    // graded-lex smallest nonzero index
    Rational coefficient;                      // [Δ^{2m−1}] at (2m−1)α
    Rational expected;                         // [Δ]_α^{2m−1}
    bool pass;
};

/// Checks that Δ^{2m−1} starts at (2m−1)α with coefficient [Δ]_α^{2m−1}.
inline ExtractionLemmaCheck check_extraction_lemma(const JacobianProfile& prof, unsigned m) {
    const unsigned k = 2 * m - 1;
    MultiIndex where = scale(prof.alpha, k);
    if (where.degree() > prof.delta.trunc_degree())
        throw InsufficientTruncation("recovery", where.degree(), prof.delta.trunc_degree(),
                                     "extraction lemma at m=" + std::to_string(m));
    TruncatedSeries p = power(prof.delta, k);
    auto lead = p.leading_term();
    ExtractionLemmaCheck out{m, p.order_at_center(), std::nullopt, p.coefficient(where),
                             pow(prof.alpha_coefficient(), k), false};
    if (lead) out.lowest_index = lead->first;
    out.pass = out.lowest_degree == k * prof.mu && out.lowest_index == where &&
               out.coefficient == out.expected;
    return out;
}

struct RecoveryTraceEntry {
    Rational h_coefficient;
    Rational divisor;
};

struct RecoveryReport {
    TruncatedSeries g_series;
    TruncatedSeries residual;
    unsigned max_recoverable_degree = 0;
    unsigned working_degree = 0;
    JacobianProfile profile;
    std::map<MultiIndex, RecoveryTraceEntry, GradedLexLess> per_beta_trace;

    [[nodiscard]] bool is_composite() const { return residual.is_zero(); }
    /// Lowest graded-lex nonzero residual coefficient, if any.
    [[nodiscard]] std::optional<std::pair<MultiIndex, Rational>> first_nonzero_residual() const {
        return residual.leading_term();
    }
};

struct RecoveryOptions {
    bool trace = false;
};

/// Recovers G from F = G∘φ̂_a up to degree B_G, then recomposes and reports
/// the residual F − G∘φ̂_a.
inline RecoveryReport recover(const MapGerm& phi, const TruncatedSeries& f, unsigned max_degree,
                              RecoveryOptions options = {}) {
    if (f.center() != phi.center())
        throw InputError("recovery", "F is centred at " + to_string(f.center()) +
                                         " but the map at " + to_string(phi.center()));
    if (f.dimension() != phi.dimension())
        throw InputError("recovery", "dimension mismatch between F and the map");
    const std::size_t n = phi.dimension();
    const unsigned available = std::min(f.trunc_degree(), phi.trunc_degree());

    JacobianProfile prof = profile(phi.truncated(available));
    const unsigned working = recovery_working_degree(prof.mu, max_degree);
    const unsigned feasible = max_recoverable_degree(prof.mu, available);
    if (working > available)
        throw InsufficientTruncation("recovery", working, available,
                                     "recovering G to degree " + std::to_string(max_degree) +
                                         " (largest feasible: " + std::to_string(feasible) + ")");

    TruncatedSeries f_work = f.truncated(working);
    MapGerm phi_work = phi.truncated(std::max(working, 1u));
    std::map<MultiIndex, bool, GradedLexLess> nonzero_derivative;
    auto keep = [&](const MultiIndex& alpha) {
        auto it = nonzero_derivative.find(alpha);
        if (it != nonzero_derivative.end()) return it->second;
        bool keep_it = alpha.degree() <= f_work.trunc_degree() && !derive(f_work, alpha).is_zero();
        nonzero_derivative.emplace(alpha, keep_it);
        return keep_it;
    };

    TruncatedSeries g(phi.image_point(), max_degree);
    g.set(MultiIndex(n), f.eval_at_center());
    RecoveryReport report{g, TruncatedSeries(phi.center(), 0), feasible, working, prof, {}};
    if (max_degree >= 1) {
        TOperatorTable table = build_t_operators(phi_work, max_degree, working, keep);
        report.profile = table.profile();
        for (const MultiIndex& beta : enumerate_upto(n, max_degree)) {
            if (beta.is_zero()) continue;
            TruncatedSeries h = assemble_H(table, f_work, beta);
            Rational coeff = extract_G_coefficient(h, table.profile(), beta);
            report.g_series.set(beta, coeff);
            if (options.trace) {
                const unsigned k = 2 * beta.degree() - 1;
                report.per_beta_trace.emplace(
                    beta, RecoveryTraceEntry{h.coefficient(scale(table.profile().alpha, k)),
                                             Rational(mi_factorial(beta)) *
                                                 pow(table.profile().alpha_coefficient(), k)});
            }
        }
    }
    // G∘φ̂ is known to degree B_G only; compare there.
    const unsigned checked = std::min(max_degree, available);
    report.residual = sub(f.truncated(checked), compose(report.g_series, phi.truncated(checked)));
    return report;
}

} // namespace germ_radius
