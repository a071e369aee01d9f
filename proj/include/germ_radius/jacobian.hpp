#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "mindex.hpp"
#include "pseries.hpp"

namespace germ_radius {

/// Square matrix of series sharing a centre and truncation degree.
class SeriesMatrix {
public:
    SeriesMatrix(std::size_t n, std::vector<TruncatedSeries> row_major)
        : n_(n), entries_(std::move(row_major)) {
        if (entries_.size() != n_ * n_) throw InputError("jacobian", "matrix is not square");
        for (const auto& e : entries_) {
            if (e.center() != entries_.front().center() ||
                e.trunc_degree() != entries_.front().trunc_degree())
                throw InputError("jacobian", "matrix entries must share centre and truncation degree");
        }
    }

    static SeriesMatrix scalar(std::size_t n, const TruncatedSeries& diagonal) {
        std::vector<TruncatedSeries> entries;
        TruncatedSeries zero(diagonal.center(), diagonal.trunc_degree());
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) entries.push_back(r == c ? diagonal : zero);
        return SeriesMatrix(n, std::move(entries));
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] const TruncatedSeries& operator()(std::size_t r, std::size_t c) const {
        return entries_[r * n_ + c];
    }
    [[nodiscard]] const std::vector<TruncatedSeries>& entries() const noexcept { return entries_; }
    [[nodiscard]] unsigned trunc_degree() const { return entries_.front().trunc_degree(); }
    [[nodiscard]] const Point& center() const { return entries_.front().center(); }

    friend bool operator==(const SeriesMatrix& a, const SeriesMatrix& b) {
        return a.n_ == b.n_ && a.entries_ == b.entries_;
    }

private:
    std::size_t n_;
    std::vector<TruncatedSeries> entries_;
};

inline SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b) {
    const std::size_t n = a.size();
    std::vector<TruncatedSeries> out;
    unsigned d = std::min(a.trunc_degree(), b.trunc_degree());
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            TruncatedSeries sum(a.center(), d);
            for (std::size_t k = 0; k < n; ++k) sum = add(sum, mul(a(r, k), b(k, c)));
            out.push_back(std::move(sum));
        }
    return SeriesMatrix(n, std::move(out));
}

/// Entry (j, i) is ∂φⱼ/∂xᵢ, valid to degree D − 1.
inline SeriesMatrix jacobian_matrix(const MapGerm& phi) {
    if (phi.trunc_degree() == 0)
        throw InsufficientTruncation("jacobian", 1, 0, "Jacobian matrix");
    const std::size_t n = phi.dimension();
    std::vector<TruncatedSeries> entries;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            entries.push_back(derive(phi.component(j), MultiIndex::unit(n, i)));
    return SeriesMatrix(n, std::move(entries));
}

namespace detail {

// Determinant of the submatrix with the given rows (in order) and the columns
// set in `mask`, by Laplace expansion along its last row with memoized minors.
inline TruncatedSeries minor_determinant(const SeriesMatrix& m, const std::vector<std::size_t>& rows,
                                         const std::vector<std::size_t>& cols) {
    const std::size_t k = rows.size();
    std::map<std::uint32_t, TruncatedSeries> memo;
    TruncatedSeries one = TruncatedSeries::constant(m.center(), m.trunc_degree(), Rational(1));
    memo.emplace(0u, one);
    auto det = [&](auto&& self, std::uint32_t mask) -> const TruncatedSeries& {
        if (auto it = memo.find(mask); it != memo.end()) return it->second;
        const std::size_t r = rows[static_cast<std::size_t>(std::popcount(mask)) - 1];
        TruncatedSeries sum(m.center(), m.trunc_degree());
        unsigned position = 0;
        const unsigned last = static_cast<unsigned>(std::popcount(mask)) - 1;
        for (std::size_t c = 0; c < k; ++c) {
            if (!(mask & (1u << c))) continue;
            const TruncatedSeries& entry = m(r, cols[c]);
            if (!entry.is_zero()) {
                auto term = mul(entry, self(self, mask & ~(1u << c)));
                sum = ((last + position) % 2 == 0) ? add(sum, term) : sub(sum, term);
            }
            ++position;
        }
        return memo.emplace(mask, std::move(sum)).first->second;
    };
    return det(det, (k == 32 ? ~0u : (1u << k) - 1u));
}

inline std::vector<std::size_t> all_but(std::size_t n, std::size_t skip) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (i != skip) out.push_back(i);
    return out;
}

} // namespace detail

inline TruncatedSeries determinant(const SeriesMatrix& m) {
    std::vector<std::size_t> idx(m.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return detail::minor_determinant(m, idx, idx);
}

/// Transposed matrix of cofactors: adj(i, j) = (−1)^{i+j} det M with row j
/// and column i removed. The 1×1 adjugate is [1].
inline SeriesMatrix adjugate(const SeriesMatrix& m) {
    const std::size_t n = m.size();
    std::vector<TruncatedSeries> entries;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            auto minor = detail::minor_determinant(m, detail::all_but(n, j), detail::all_but(n, i));
            entries.push_back((i + j) % 2 == 0 ? minor : scale(minor, Rational(-1)));
        }
    return SeriesMatrix(n, std::move(entries));
}

/// Pointwise singularity invariants of a map germ at its centre.
struct JacobianProfile {
    TruncatedSeries delta;
    SeriesMatrix adjugate;
    unsigned mu = 0;
    unsigned nu = 0;
    MultiIndex alpha;
    Rational d_alpha_delta; // D^αΔ(a) = α!·[Δ]_α
    unsigned lambda = 1;    // μ − ν + 1
    unsigned computed_at_degree = 0;

    /// [Δ]_α, the Taylor coefficient of Δ at α.
    [[nodiscard]] Rational alpha_coefficient() const {
        return d_alpha_delta / Rational(mi_factorial(alpha));
    }
};

inline JacobianProfile profile(const MapGerm& phi) {
    SeriesMatrix jac = jacobian_matrix(phi);
    TruncatedSeries delta = determinant(jac);
    auto lead = delta.leading_term();
    if (!lead) throw SingularJacobian(delta.trunc_degree());
    SeriesMatrix adj = adjugate(jac);
    std::optional<unsigned> nu;
    for (const auto& e : adj.entries()) {
        if (auto o = e.order_at_center()) nu = nu ? std::min(*nu, *o) : *o;
    }
    if (!nu)
        throw DomainError("jacobian", "adjugate identically zero to degree " +
                                          std::to_string(adj.trunc_degree()));
    const auto& [alpha, coeff] = *lead;
    unsigned mu = alpha.degree();
    Rational d_alpha = coeff * Rational(mi_factorial(alpha));
    return JacobianProfile{delta, adj, mu, *nu, alpha, d_alpha, mu - *nu + 1, delta.trunc_degree()};
}

/// Smallest c₁ ≥ 1, c₂ ≥ 1 (c₂ minimized first) with
/// |D^αΔ(a)| ≤ α!·c₁·c₂^{|α|} and the same for every adjugate entry.
/// For a polynomial germ the bound reduces to the coefficient magnitudes.
inline std::pair<Rational, Rational> coefficient_bound_constants(const MapGerm& phi) {
    SeriesMatrix jac = jacobian_matrix(phi);
    TruncatedSeries delta = determinant(jac);
    SeriesMatrix adj = adjugate(jac);
    std::vector<const TruncatedSeries*> series{&delta};
    for (const auto& e : adj.entries()) series.push_back(&e);
    for (const auto* s : series) {
        if (!s->terms().empty() && s->terms().rbegin()->first.degree() == s->trunc_degree() &&
            s->trunc_degree() > 0)
            throw DomainError("jacobian", "coefficient bounds need a polynomial germ: nonzero "
                                          "coefficient at truncation degree " +
                                              std::to_string(s->trunc_degree()));
    }
    // With c₂ = 1 every finite coefficient table is bounded by its largest
    // magnitude; no smaller c₂ ≥ 1 exists, so c₂ = 1 is the lexicographic minimum.
    Rational c1(1);
    for (const auto* s : series)
        for (const auto& [g, c] : s->terms()) c1 = std::max(c1, abs(c));
    return {c1, Rational(1)};
}

} // namespace germ_radius
