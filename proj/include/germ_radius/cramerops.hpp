#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "jacobian.hpp"
#include "mindex.hpp"
#include "pseries.hpp"

namespace germ_radius {

/// The operators T_α^β with
///   Δ^{2|β|−1}·((D^β g)∘φ) = Σ_{|α|≤|β|} T_α^β·D^α(g∘φ)
/// for every g, stored for 1 ≤ |β| ≤ B. Entries at level |β| = m are valid to
/// degree D_work − m.
class TOperatorTable {
public:
    using Row = std::map<MultiIndex, TruncatedSeries, GradedLexLess>;

    TOperatorTable(MapGerm germ, JacobianProfile profile, unsigned max_beta_degree,
                   unsigned working_degree)
        : germ_(std::move(germ)),
          profile_(std::move(profile)),
          max_beta_(max_beta_degree),
          working_degree_(working_degree) {}

    [[nodiscard]] const MapGerm& germ() const noexcept { return germ_; }
    [[nodiscard]] const JacobianProfile& profile() const noexcept { return profile_; }
    [[nodiscard]] unsigned max_beta_degree() const noexcept { return max_beta_; }
    [[nodiscard]] unsigned working_degree() const noexcept { return working_degree_; }
    [[nodiscard]] bool pruned() const noexcept { return pruned_; }
    [[nodiscard]] const std::map<MultiIndex, Row, GradedLexLess>& rows() const noexcept { return rows_; }

    /// nullptr when (β, α) was not built.
    [[nodiscard]] const TruncatedSeries* find(const MultiIndex& beta, const MultiIndex& alpha) const {
        auto r = rows_.find(beta);
        if (r == rows_.end()) return nullptr;
        auto e = r->second.find(alpha);
        return e == r->second.end() ? nullptr : &e->second;
    }

    [[nodiscard]] const TruncatedSeries& entry(const MultiIndex& beta, const MultiIndex& alpha) const {
        if (const auto* t = find(beta, alpha)) return *t;
        throw DomainError("cramerops", "T-table has no entry for beta=" + to_string(beta) +
                                           ", alpha=" + to_string(alpha));
    }

    [[nodiscard]] const Row& row(const MultiIndex& beta) const {
        auto r = rows_.find(beta);
        if (r == rows_.end())
            throw DomainError("cramerops", "T-table has no row for beta=" + to_string(beta));
        return r->second;
    }

    [[nodiscard]] std::size_t entry_count() const {
        std::size_t count = 0;
        for (const auto& [beta, row] : rows_) count += row.size();
        return count;
    }

private:
    template <typename Filter>
    friend TOperatorTable build_t_operators(const MapGerm&, unsigned, unsigned, Filter&&);

    MapGerm germ_;
    JacobianProfile profile_;
    unsigned max_beta_;
    unsigned working_degree_;
    bool pruned_ = false;
    std::map<MultiIndex, Row, GradedLexLess> rows_;
};

/// Builds T_α^β for |β| ≤ B at working degree D_work.
///
/// Level 1 is Cramer's rule: T_{eᵢ}^{eⱼ} = adj(i, j), T_0^{eⱼ} = 0. Level m+1
/// comes from differentiating level m along xᵢ, contracting with adjugate
/// column j (adj·J = Δ·I) and multiplying by Δ:
///   T_α^{β+eⱼ} = Σᵢ Δ·adj(i,j)·(D^{eᵢ}T_α^β + T_{α−eᵢ}^β) − (2m−1)·Pⱼ·T_α^β,
///   Pⱼ = Σᵢ adj(i,j)·D^{eᵢ}Δ,
/// with j the first coordinate where β+eⱼ is positive.
///
/// `keep_alpha` restricts which α are built. It must be closed under
/// decreasing α (the recurrence only reads α and α − eᵢ).
template <typename Filter>
TOperatorTable build_t_operators(const MapGerm& phi_in, unsigned max_beta_degree,
                                 unsigned working_degree, Filter&& keep_alpha) {
    if (phi_in.trunc_degree() < working_degree)
        throw InsufficientTruncation("cramerops", working_degree, phi_in.trunc_degree(),
                                     "T-operator table");
    if (max_beta_degree >= 1 && working_degree < max_beta_degree)
        throw InsufficientTruncation("cramerops", max_beta_degree, working_degree,
                                     "T-operator table levels");
    MapGerm phi = phi_in.truncated(working_degree);
    JacobianProfile prof = profile(phi);
    TOperatorTable table(phi, prof, max_beta_degree, working_degree);
    if (max_beta_degree == 0) return table;

    const std::size_t n = phi.dimension();
    const auto& adj = prof.adjugate;
    const TruncatedSeries& delta = prof.delta;
    const Point& a = phi.center();

    // Level 1.
    for (std::size_t j = 0; j < n; ++j) {
        MultiIndex beta = MultiIndex::unit(n, j);
        auto& row = table.rows_[beta];
        MultiIndex zero(n);
        if (keep_alpha(zero)) row.emplace(zero, TruncatedSeries(a, working_degree - 1));
        else table.pruned_ = true;
        for (std::size_t i = 0; i < n; ++i) {
            MultiIndex alpha = MultiIndex::unit(n, i);
            if (keep_alpha(alpha)) row.emplace(alpha, adj(i, j));
            else table.pruned_ = true;
        }
    }
    if (max_beta_degree == 1) return table;

    std::vector<TruncatedSeries> delta_adj;  // Δ·adj(i, j), row-major (i, j)
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) delta_adj.push_back(mul(delta, adj(i, j)));
    std::vector<TruncatedSeries> contracted; // Pⱼ
    std::vector<TruncatedSeries> d_delta;
    for (std::size_t i = 0; i < n; ++i) d_delta.push_back(derive(delta, MultiIndex::unit(n, i)));
    for (std::size_t j = 0; j < n; ++j) {
        TruncatedSeries p(a, d_delta.front().trunc_degree());
        for (std::size_t i = 0; i < n; ++i) p = add(p, mul(adj(i, j), d_delta[i]));
        contracted.push_back(std::move(p));
    }

    for (unsigned m = 1; m < max_beta_degree; ++m) {
        const unsigned level_trunc = working_degree - (m + 1);
        const Rational weight(static_cast<long>(2 * m - 1));
        const auto alphas = enumerate_upto(n, m + 1);
        for (const MultiIndex& next : enumerate_shell(n, m + 1)) {
            std::size_t j = 0;
            while (next[j] == 0) ++j;
            MultiIndex beta = *checked_sub(next, MultiIndex::unit(n, j));
            const auto& prev = table.rows_.at(beta);
            // Derivatives of the previous row are shared across α.
            std::map<MultiIndex, std::vector<TruncatedSeries>, GradedLexLess> prev_derivs;
            for (const auto& [alpha, t] : prev) {
                std::vector<TruncatedSeries> ds;
                for (std::size_t i = 0; i < n; ++i) ds.push_back(derive(t, MultiIndex::unit(n, i)));
                prev_derivs.emplace(alpha, std::move(ds));
            }
            auto& row = table.rows_[next];
            for (const MultiIndex& alpha : alphas) {
                if (!keep_alpha(alpha)) {
                    table.pruned_ = true;
                    continue;
                }
                TruncatedSeries acc(a, level_trunc);
                const TruncatedSeries* same = nullptr;
                if (auto it = prev.find(alpha); it != prev.end()) same = &it->second;
                for (std::size_t i = 0; i < n; ++i) {
                    std::optional<TruncatedSeries> inner;
                    if (same) inner = prev_derivs.at(alpha)[i];
                    if (auto lowered = checked_sub(alpha, MultiIndex::unit(n, i))) {
                        if (auto it = prev.find(*lowered); it != prev.end())
                            inner = inner ? add(*inner, it->second) : it->second.truncated(level_trunc);
                    }
                    if (!inner || inner->is_zero()) continue;
                    acc = add(acc, mul(delta_adj[i * n + j], *inner));
                }
                if (same && !same->is_zero())
                    acc = sub(acc, scale(mul(contracted[j], *same), weight));
                row.emplace(alpha, acc.truncated(level_trunc));
            }
        }
    }
    return table;
}

inline TOperatorTable build_t_operators(const MapGerm& phi, unsigned max_beta_degree,
                                        unsigned working_degree) {
    return build_t_operators(phi, max_beta_degree, working_degree,
                             [](const MultiIndex&) { return true; });
}

/// Δ·((∂g/∂yⱼ)∘φ) − Σᵢ (∂f/∂xᵢ)·adj(i, j), f = g∘φ. Zero within truncation.
inline TruncatedSeries cramer_base_residual(const MapGerm& phi, const TruncatedSeries& g,
                                            std::size_t j) {
    const std::size_t n = phi.dimension();
    SeriesMatrix jac = jacobian_matrix(phi);
    TruncatedSeries delta = determinant(jac);
    SeriesMatrix adj = adjugate(jac);
    TruncatedSeries f = compose(g, phi);
    TruncatedSeries residual = mul(delta, compose(derive(g, MultiIndex::unit(n, j)), phi));
    for (std::size_t i = 0; i < n; ++i)
        residual = sub(residual, mul(derive(f, MultiIndex::unit(n, i)), adj(i, j)));
    return residual;
}

/// Δ^{2|β|−1}·((D^β g)∘φ) − Σ_α T_α^β·D^α(g∘φ).
inline TruncatedSeries verify_defining_identity(const TOperatorTable& table, const TruncatedSeries& g,
                                                const MultiIndex& beta) {
    if (beta.degree() == 0 || beta.degree() > table.max_beta_degree())
        throw InputError("cramerops", "beta " + to_string(beta) + " outside the table range");
    if (table.pruned())
        throw DomainError("cramerops", "defining identity needs an unpruned table");
    const MapGerm& phi = table.germ();
    const unsigned m = beta.degree();
    TruncatedSeries f = compose(g, phi);
    TruncatedSeries lhs =
        mul(power(table.profile().delta, 2 * m - 1), compose(derive(g, beta), phi));
    TruncatedSeries rhs(phi.center(), lhs.trunc_degree());
    for (const auto& [alpha, t] : table.row(beta)) {
        if (alpha.degree() > f.trunc_degree())
            throw InsufficientTruncation("cramerops", alpha.degree(), f.trunc_degree(),
                                         "D^alpha f in the defining identity");
        rhs = add(rhs, mul(t, derive(f, alpha)));
    }
    return sub(lhs, rhs);
}

struct OrderBoundRow {
    MultiIndex beta;
    MultiIndex alpha;
    std::optional<unsigned> observed_order; // nullopt: zero to the entry's truncation
    long required_bound;
    unsigned trunc_degree;
    bool pass;
};

/// order(T_α^β) ≥ |α| − μ + |β|(μ + ν − 1). An entry passes when it has no
/// nonzero coefficient below the bound within its truncation.
inline std::vector<OrderBoundRow> verify_order_bound(const TOperatorTable& table) {
    const long mu = table.profile().mu;
    const long nu = table.profile().nu;
    std::vector<OrderBoundRow> out;
    for (const auto& [beta, row] : table.rows())
        for (const auto& [alpha, t] : row) {
            long bound = static_cast<long>(alpha.degree()) - mu +
                         static_cast<long>(beta.degree()) * (mu + nu - 1);
            auto order = t.order_at_center();
            bool pass = !order || static_cast<long>(*order) >= bound;
            out.push_back({beta, alpha, order, bound, t.trunc_degree(), pass});
        }
    return out;
}

/// Memoizes tables per (germ, B, D_work). Safe to share between threads.
class TOperatorCache {
public:
    std::shared_ptr<const TOperatorTable> get(const MapGerm& phi, unsigned max_beta_degree,
                                              unsigned working_degree) {
        std::lock_guard lock(mutex_);
        for (const auto& [key, table] : entries_)
            if (std::get<1>(key) == max_beta_degree && std::get<2>(key) == working_degree &&
                std::get<0>(key) == phi)
                return table;
        auto table = std::make_shared<const TOperatorTable>(
            build_t_operators(phi, max_beta_degree, working_degree));
        entries_.emplace_back(std::make_tuple(phi, max_beta_degree, working_degree), table);
        return table;
    }

    [[nodiscard]] std::size_t size() const {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

private:
    mutable std::mutex mutex_;
    std::vector<std::pair<std::tuple<MapGerm, unsigned, unsigned>, std::shared_ptr<const TOperatorTable>>>
        entries_;
};

} // namespace germ_radius
