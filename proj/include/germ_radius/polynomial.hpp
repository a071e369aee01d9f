#pragma once

#include <map>
#include <string>
#include <vector>

#include "mindex.hpp"
#include "pseries.hpp"
#include "rational.hpp"

namespace germ_radius {

/// An exact polynomial in absolute coordinates (centred at the origin), no
/// truncation. Maps and test functions enter the library in this form and are
/// re-expanded exactly around whatever centre a job asks for.
class Polynomial {
public:
    using Terms = std::map<MultiIndex, Rational, GradedLexLess>;

    explicit Polynomial(std::size_t n) : n_(n) {
        if (n == 0 || n > MultiIndex::kMaxDimension)
            throw InputError("polynomial", "dimension must be in [1, " +
                                               std::to_string(MultiIndex::kMaxDimension) + "]");
    }

    static Polynomial constant(std::size_t n, const Rational& c) {
        Polynomial p(n);
        p.add_term(MultiIndex(n), c);
        return p;
    }

    static Polynomial variable(std::size_t n, std::size_t i) {
        Polynomial p(n);
        p.add_term(MultiIndex::unit(n, i), Rational(1));
        return p;
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return n_; }
    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }

    [[nodiscard]] unsigned degree() const {
        return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
    }

    void add_term(const MultiIndex& g, const Rational& c) {
        if (g.size() != n_) throw InputError("polynomial", "term dimension mismatch");
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(g, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        Polynomial out(a);
        for (const auto& [g, c] : b.terms_) out.add_term(g, c);
        return out;
    }

    friend Polynomial operator-(const Polynomial& a) {
        Polynomial out(a.n_);
        for (const auto& [g, c] : a.terms_) out.terms_.emplace(g, -c);
        return out;
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial out(a.n_);
        for (const auto& [ga, ca] : a.terms_)
            for (const auto& [gb, cb] : b.terms_) out.add_term(ga + gb, ca * cb);
        return out;
    }

    [[nodiscard]] Polynomial pow(unsigned e) const {
        Polynomial out = constant(n_, Rational(1));
        for (unsigned k = 0; k < e; ++k) out = out * *this;
        return out;
    }

    [[nodiscard]] Rational evaluate(const Point& x) const {
        if (x.size() != n_) throw InputError("polynomial", "evaluation point has wrong dimension");
        Rational sum(0);
        for (const auto& [g, c] : terms_) {
            Rational term(c);
            for (std::size_t i = 0; i < n_; ++i) term *= germ_radius::pow(x[i], g[i]);
            sum += term;
        }
        return sum;
    }

    /// Exact Taylor re-expansion around `center`, truncated at `trunc_degree`:
    /// substitute x_i = a_i + t_i and expand binomially.
    [[nodiscard]] TruncatedSeries to_series(const Point& center, unsigned trunc_degree) const {
        if (center.size() != n_) throw InputError("polynomial", "centre has wrong dimension");
        TruncatedSeries out(center, trunc_degree);
        std::vector<unsigned> e(n_);
        for (const auto& [g, c] : terms_) {
            // Σ over k ≤ g of Π_i C(g_i, k_i) a_i^{g_i − k_i} t_i^{k_i}
            auto visit = [&](auto&& self, std::size_t i, unsigned deg, Rational acc) -> void {
                if (i == n_) {
                    out.add_to(MultiIndex(std::span<const unsigned>(e)), acc);
                    return;
                }
                for (unsigned k = 0; k <= g[i] && deg + k <= trunc_degree; ++k) {
                    Integer binom;
                    mpz_bin_uiui(binom.get_mpz_t(), g[i], k);
                    Rational factor = Rational(binom) * germ_radius::pow(center[i], g[i] - k);
                    if (factor == 0) continue;
                    e[i] = k;
                    self(self, i + 1, deg + k, acc * factor);
                }
            };
            visit(visit, 0, 0, c);
        }
        return out;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }

private:
    std::size_t n_;
    Terms terms_;
};

/// A polynomial map V → Kⁿ given in absolute coordinates.
struct PolynomialMap {
    std::vector<Polynomial> components;

    [[nodiscard]] std::size_t dimension() const { return components.size(); }

    [[nodiscard]] MapGerm germ_at(const Point& center, unsigned trunc_degree) const {
        std::vector<TruncatedSeries> comps;
        for (const auto& p : components) comps.push_back(p.to_series(center, trunc_degree));
        return MapGerm(std::move(comps));
    }

    [[nodiscard]] Point evaluate(const Point& x) const {
        Point out;
        for (const auto& p : components) out.push_back(p.evaluate(x));
        return out;
    }
};

} // namespace germ_radius
