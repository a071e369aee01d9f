#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "mindex.hpp"
#include "rational.hpp"

namespace germ_radius {

using Point = std::vector<Rational>;

inline std::string to_string(const Point& p) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        s += to_string(p[i]);
    }
    return s + "]";
}

/// Σ F_γ (x−a)^γ over |γ| ≤ D with exact rational coefficients.
///
/// Storage is sparse and ordered graded-lex, so the first stored term is the
/// lowest-order one. Zero coefficients are never stored. The truncation degree
/// D is part of the value: asking for a coefficient above D is an error, not
/// zero, and every operation propagates the smallest valid degree.
class TruncatedSeries {
public:
    using Terms = std::map<MultiIndex, Rational, GradedLexLess>;

    TruncatedSeries(Point center, unsigned trunc_degree)
        : center_(std::move(center)), trunc_(trunc_degree) {
        if (center_.empty() || center_.size() > MultiIndex::kMaxDimension)
            throw InputError("pseries", "series dimension must be in [1, " +
                                            std::to_string(MultiIndex::kMaxDimension) + "]");
    }

    static TruncatedSeries constant(Point center, unsigned trunc_degree, const Rational& value) {
        TruncatedSeries out(std::move(center), trunc_degree);
        out.set(MultiIndex(out.dimension()), value);
        return out;
    }

    /// The local coordinate (x_i − a_i).
    static TruncatedSeries coordinate(Point center, unsigned trunc_degree, std::size_t i) {
        TruncatedSeries out(std::move(center), trunc_degree);
        if (trunc_degree >= 1) out.set(MultiIndex::unit(out.dimension(), i), Rational(1));
        return out;
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return center_.size(); }
    [[nodiscard]] const Point& center() const noexcept { return center_; }
    [[nodiscard]] unsigned trunc_degree() const noexcept { return trunc_; }
    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }

    [[nodiscard]] Rational coefficient(const MultiIndex& gamma) const {
        check_index(gamma);
        auto it = terms_.find(gamma);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    [[nodiscard]] Rational eval_at_center() const { return coefficient(MultiIndex(dimension())); }

    /// Smallest |γ| with F_γ ≠ 0; nullopt means "order exceeds the truncation degree".
    [[nodiscard]] std::optional<unsigned> order_at_center() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.begin()->first.degree();
    }

    /// Lowest nonzero term in graded-lex order.
    [[nodiscard]] std::optional<std::pair<MultiIndex, Rational>> leading_term() const {
        if (terms_.empty()) return std::nullopt;
        return *terms_.begin();
    }

    void set(const MultiIndex& gamma, const Rational& value) {
        check_index(gamma);
        if (value == 0)
            terms_.erase(gamma);
        else
            terms_[gamma] = value;
    }

    void add_to(const MultiIndex& gamma, const Rational& value) {
        check_index(gamma);
        if (value == 0) return;
        auto [it, inserted] = terms_.try_emplace(gamma, value);
        if (!inserted) {
            it->second += value;
            if (it->second == 0) terms_.erase(it);
        }
    }

    /// Same series with a lower truncation degree.
    [[nodiscard]] TruncatedSeries truncated(unsigned degree) const {
        if (degree > trunc_)
            throw InsufficientTruncation("pseries", degree, trunc_, "raising a truncation degree");
        TruncatedSeries out(center_, degree);
        for (const auto& [g, c] : terms_) {
            if (g.degree() > degree) break;
            out.terms_.emplace_hint(out.terms_.end(), g, c);
        }
        return out;
    }

    friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
        return a.center_ == b.center_ && a.trunc_ == b.trunc_ && a.terms_ == b.terms_;
    }

    /// Internal fast path for operations that already validated the index.
    void accumulate_unchecked(const MultiIndex& gamma, const Rational& value) {
        auto [it, inserted] = terms_.try_emplace(gamma, value);
        if (!inserted) it->second += value;
    }

    void drop_zeros() {
        std::erase_if(terms_, [](const auto& kv) { return kv.second == 0; });
    }

private:
    void check_index(const MultiIndex& gamma) const {
        if (gamma.size() != dimension())
            throw InputError("pseries", "index " + to_string(gamma) + " has wrong dimension for n=" +
                                            std::to_string(dimension()));
        if (gamma.degree() > trunc_)
            throw InsufficientTruncation("pseries", gamma.degree(), trunc_,
                                         "coefficient " + to_string(gamma));
    }

    Point center_;
    unsigned trunc_;
    Terms terms_;
};

namespace detail {

inline void require_same_center(const TruncatedSeries& a, const TruncatedSeries& b, const char* op) {
    if (a.dimension() != b.dimension())
        throw InputError("pseries", std::string(op) + ": dimension mismatch");
    if (a.center() != b.center())
        throw InputError("pseries", std::string(op) + ": centre mismatch " + to_string(a.center()) +
                                        " vs " + to_string(b.center()));
}

} // namespace detail

inline TruncatedSeries scale(const TruncatedSeries& f, const Rational& c) {
    TruncatedSeries out(f.center(), f.trunc_degree());
    if (c == 0) return out;
    for (const auto& [g, v] : f.terms()) out.set(g, v * c);
    return out;
}

inline TruncatedSeries add(const TruncatedSeries& f, const TruncatedSeries& g) {
    detail::require_same_center(f, g, "add");
    unsigned d = std::min(f.trunc_degree(), g.trunc_degree());
    TruncatedSeries out = f.truncated(d);
    for (const auto& [idx, v] : g.terms()) {
        if (idx.degree() > d) break;
        out.add_to(idx, v);
    }
    return out;
}

inline TruncatedSeries sub(const TruncatedSeries& f, const TruncatedSeries& g) {
    return add(f, scale(g, Rational(-1)));
}

/// Truncated Cauchy product.
inline TruncatedSeries mul(const TruncatedSeries& f, const TruncatedSeries& g) {
    detail::require_same_center(f, g, "mul");
    unsigned d = std::min(f.trunc_degree(), g.trunc_degree());
    TruncatedSeries out(f.center(), d);
    Rational product;
    for (const auto& [a, ca] : f.terms()) {
        if (a.degree() > d) break;
        unsigned room = d - a.degree();
        for (const auto& [b, cb] : g.terms()) {
            if (b.degree() > room) break;
            product = ca * cb;
            out.accumulate_unchecked(a + b, product);
        }
    }
    out.drop_zeros();
    return out;
}

inline TruncatedSeries operator+(const TruncatedSeries& f, const TruncatedSeries& g) { return add(f, g); }
inline TruncatedSeries operator-(const TruncatedSeries& f, const TruncatedSeries& g) { return sub(f, g); }
inline TruncatedSeries operator*(const TruncatedSeries& f, const TruncatedSeries& g) { return mul(f, g); }

inline TruncatedSeries power(const TruncatedSeries& f, unsigned e) {
    TruncatedSeries out = TruncatedSeries::constant(f.center(), f.trunc_degree(), Rational(1));
    for (unsigned k = 0; k < e; ++k) out = mul(out, f);
    return out;
}

/// Formal derivative D^α F; the result is valid to degree D − |α|.
inline TruncatedSeries derive(const TruncatedSeries& f, const MultiIndex& alpha) {
    if (alpha.size() != f.dimension()) throw InputError("pseries", "derive: dimension mismatch");
    if (alpha.degree() > f.trunc_degree())
        throw InsufficientTruncation("pseries", alpha.degree(), f.trunc_degree(),
                                     "derivative of order " + to_string(alpha));
    TruncatedSeries out(f.center(), f.trunc_degree() - alpha.degree());
    for (const auto& [g, c] : f.terms()) {
        auto lowered = checked_sub(g, alpha);
        if (!lowered) continue;
        out.accumulate_unchecked(*lowered, c * Rational(falling_factorial(g, alpha)));
    }
    out.drop_zeros();
    return out;
}

/// n-tuple of series sharing centre a and truncation degree; b = φ(a) is the
/// tuple of constant terms.
class MapGerm {
public:
    explicit MapGerm(std::vector<TruncatedSeries> components) : components_(std::move(components)) {
        if (components_.empty()) throw InputError("pseries", "map germ needs at least one component");
        const auto& first = components_.front();
        if (first.dimension() != components_.size())
            throw InputError("pseries", "map germ must be square: " +
                                            std::to_string(components_.size()) + " components in " +
                                            std::to_string(first.dimension()) + " variables");
        for (const auto& c : components_) {
            if (c.center() != first.center())
                throw InputError("pseries", "map germ components must share a centre");
            if (c.trunc_degree() != first.trunc_degree())
                throw InputError("pseries", "map germ components must share a truncation degree");
        }
        for (const auto& c : components_) image_.push_back(c.eval_at_center());
    }

    static MapGerm identity(const Point& center, unsigned trunc_degree) {
        std::vector<TruncatedSeries> comps;
        for (std::size_t i = 0; i < center.size(); ++i) {
            auto c = TruncatedSeries::coordinate(center, trunc_degree, i);
            c.set(MultiIndex(center.size()), center[i]);
            comps.push_back(std::move(c));
        }
        return MapGerm(std::move(comps));
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return components_.size(); }
    [[nodiscard]] const Point& center() const { return components_.front().center(); }
    [[nodiscard]] const Point& image_point() const noexcept { return image_; }
    [[nodiscard]] unsigned trunc_degree() const { return components_.front().trunc_degree(); }
    [[nodiscard]] const TruncatedSeries& component(std::size_t j) const { return components_.at(j); }
    [[nodiscard]] const std::vector<TruncatedSeries>& components() const noexcept { return components_; }

    [[nodiscard]] MapGerm truncated(unsigned degree) const {
        std::vector<TruncatedSeries> comps;
        for (const auto& c : components_) comps.push_back(c.truncated(degree));
        return MapGerm(std::move(comps));
    }

    friend bool operator==(const MapGerm& a, const MapGerm& b) { return a.components_ == b.components_; }

private:
    std::vector<TruncatedSeries> components_;
    Point image_;
};

/// Substitutes the components into G, which is centred at their constant terms.
/// Each component minus its constant term must have order ≥ 1.
inline TruncatedSeries compose(const TruncatedSeries& g, std::span<const TruncatedSeries> phi) {
    if (g.dimension() != phi.size())
        throw InputError("pseries", "compose: G has " + std::to_string(g.dimension()) +
                                        " variables but the map has " + std::to_string(phi.size()) +
                                        " components");
    const std::size_t n_src = phi.front().dimension();
    unsigned d = g.trunc_degree();
    std::vector<TruncatedSeries> shifted;
    for (std::size_t j = 0; j < phi.size(); ++j) {
        if (phi[j].center() != phi.front().center() || phi[j].dimension() != n_src)
            throw InputError("pseries", "compose: map components must share a centre");
        if (phi[j].eval_at_center() != g.center()[j])
            throw DomainError("pseries", "compose: component " + std::to_string(j) +
                                             " minus G's centre has a nonzero constant term (" +
                                             to_string(phi[j].eval_at_center() - g.center()[j]) + ")");
        d = std::min(d, phi[j].trunc_degree());
    }
    for (std::size_t j = 0; j < phi.size(); ++j) {
        auto u = phi[j].truncated(d);
        u.set(MultiIndex(n_src), Rational(0));
        shifted.push_back(std::move(u));
    }

    const Point& a = phi.front().center();
    TruncatedSeries out(a, d);
    // Memoized monomials U^β of the shifted components. U^β has order ≥ |β|,
    // so only |β| ≤ d contributes.
    std::map<MultiIndex, TruncatedSeries, GradedLexLess> powers;
    powers.emplace(MultiIndex(g.dimension()), TruncatedSeries::constant(a, d, Rational(1)));
    auto monomial = [&](auto&& self, const MultiIndex& beta) -> const TruncatedSeries& {
        if (auto it = powers.find(beta); it != powers.end()) return it->second;
        std::size_t j = 0;
        while (beta[j] == 0) ++j;
        MultiIndex prev = *checked_sub(beta, MultiIndex::unit(beta.size(), j));
        TruncatedSeries value = mul(self(self, prev), shifted[j]);
        return powers.emplace(beta, std::move(value)).first->second;
    };
    for (const auto& [beta, coeff] : g.terms()) {
        if (beta.degree() > d) break;
        const auto& m = monomial(monomial, beta);
        for (const auto& [gamma, c] : m.terms()) out.accumulate_unchecked(gamma, coeff * c);
    }
    out.drop_zeros();
    return out;
}

/// F = G ∘ φ̂_a; requires φ(a) to equal G's centre exactly.
inline TruncatedSeries compose(const TruncatedSeries& g, const MapGerm& phi) {
    if (g.dimension() != phi.dimension())
        throw InputError("pseries", "compose: dimension mismatch between G and the map");
    if (g.center() != phi.image_point())
        throw DomainError("pseries", "compose: map image " + to_string(phi.image_point()) +
                                         " differs from G's centre " + to_string(g.center()));
    return compose(g, std::span<const TruncatedSeries>(phi.components()));
}

/// ∂f/∂xᵢ − Σⱼ ((∂g/∂yⱼ)∘φ)·∂φⱼ/∂xᵢ for f = g∘φ. Zero within truncation.
inline TruncatedSeries chain_rule_residual(const TruncatedSeries& g, const MapGerm& phi, std::size_t i) {
    const std::size_t n = phi.dimension();
    TruncatedSeries f = compose(g, phi);
    TruncatedSeries residual = derive(f, MultiIndex::unit(n, i));
    for (std::size_t j = 0; j < n; ++j) {
        auto dg = derive(g, MultiIndex::unit(n, j));
        auto term = mul(compose(dg, phi), derive(phi.component(j), MultiIndex::unit(n, i)));
        residual = sub(residual, term);
    }
    return residual;
}

} // namespace germ_radius
