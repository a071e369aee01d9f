#pragma once

#include <random>
#include <string>
#include <vector>

#include <germ_radius/germ_radius.hpp>

namespace germ_radius::testing {

inline Point origin(std::size_t n) { return Point(n, Rational(0)); }

inline PolynomialMap map_of(const std::vector<std::string>& exprs, const std::vector<std::string>& vars) {
    return parse_map(exprs, vars);
}

inline PolynomialMap identity_map(std::size_t n) {
    PolynomialMap m;
    for (std::size_t i = 0; i < n; ++i) m.components.push_back(Polynomial::variable(n, i));
    return m;
}

inline PolynomialMap power_map(unsigned k) { return map_of({"x^" + std::to_string(k)}, {"x"}); }

/// σ(x, y) = (x, xy).
inline PolynomialMap blow_up() { return map_of({"x", "x*y"}, {"x", "y"}); }

struct NamedFixture {
    std::string name;
    PolynomialMap map;
};

inline std::vector<NamedFixture> named_fixtures() {
    return {{"identity1", identity_map(1)}, {"identity2", identity_map(2)}, {"x^2", power_map(2)},
            {"x^3", power_map(3)},          {"blow_up", blow_up()}};
}

inline Rational random_rational(std::mt19937_64& rng, int span = 3, int max_den = 3) {
    std::uniform_int_distribution<int> num(-span, span);
    std::uniform_int_distribution<int> den(1, max_den);
    return make_rational(num(rng), den(rng));
}

/// Random polynomial map with no constant term. `singular` drops the linear
/// part of the first component so that Δ(0) = 0 typically.
inline PolynomialMap random_map(std::mt19937_64& rng, std::size_t n, unsigned degree, bool singular = false) {
    PolynomialMap m;
    std::bernoulli_distribution sparse(0.6);
    for (std::size_t j = 0; j < n; ++j) {
        Polynomial p(n);
        for (const auto& g : enumerate_upto(n, degree)) {
            if (g.degree() == 0) continue;
            if (singular && j == 0 && (g.degree() == 1 || g == MultiIndex::unit(n, 0) + MultiIndex::unit(n, 0)))
                continue;
            if (!(singular && j == 0) && g == MultiIndex::unit(n, j)) continue;
            if (g.degree() >= 2 && !sparse(rng)) continue;
            p.add_term(g, random_rational(rng));
        }
        // A fixed unit coefficient on x_j (x_1² when singular) keeps Δ from cancelling to zero.
        if (singular && j == 0) p.add_term(MultiIndex::unit(n, 0) + MultiIndex::unit(n, 0), Rational(1));
        else p.add_term(MultiIndex::unit(n, j), Rational(1));
        m.components.push_back(std::move(p));
    }
    return m;
}

/// Random series with centre `center`, all coefficients up to `degree` drawn
/// from small rationals, truncated at `trunc`.
inline TruncatedSeries random_series(std::mt19937_64& rng, const Point& center, unsigned degree, unsigned trunc) {
    TruncatedSeries s(center, trunc);
    for (const auto& g : enumerate_upto(center.size(), std::min(degree, trunc))) s.set(g, random_rational(rng));
    return s;
}

/// Σ_{k ≤ d} ρ^{−k} y^k, radius ρ.
inline TruncatedSeries geometric(const Rational& rho, unsigned degree) {
    TruncatedSeries g(Point{Rational(0)}, degree);
    for (unsigned k = 0; k <= degree; ++k) g.set(MultiIndex{k}, pow(1 / rho, k));
    return g;
}

} // namespace germ_radius::testing
