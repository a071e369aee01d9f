#include <random>

#include <gtest/gtest.h>

#include <germ_radius/germ_radius.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace germ_radius;
using namespace germ_radius::testing;

namespace {

TruncatedSeries x_poly(const std::string& text, unsigned trunc) {
    return parse_polynomial(text, {"x"}).to_series(origin(1), trunc);
}

oracle::Dense to_dense(const TruncatedSeries& s) {
    oracle::Dense out(s.trunc_degree() + 1, 0);
    for (const auto& [g, c] : s.terms()) out[g[0]] = c;
    return out;
}

} // namespace

TEST(TOperators, SquareMapEntries) {
    auto table = build_t_operators(power_map(2).germ_at(origin(1), 6), 2, 6);
    EXPECT_TRUE(table.entry(MultiIndex{1}, MultiIndex{0}).is_zero());
    EXPECT_EQ(table.entry(MultiIndex{1}, MultiIndex{1}), x_poly("1", 5));
    EXPECT_TRUE(table.entry(MultiIndex{2}, MultiIndex{0}).is_zero());
    EXPECT_EQ(table.entry(MultiIndex{2}, MultiIndex{1}), x_poly("-2", 4));
    EXPECT_EQ(table.entry(MultiIndex{2}, MultiIndex{2}), x_poly("2*x", 4));
    EXPECT_EQ(table.entry_count(), 5u);
    EXPECT_FALSE(table.pruned());
}

TEST(TOperators, IdentityMapIsKronecker) {
    for (std::size_t n = 1; n <= 3; ++n) {
        auto table = build_t_operators(MapGerm::identity(origin(n), 5), 3, 5);
        for (const auto& [beta, row] : table.rows())
            for (const auto& [alpha, t] : row) {
                if (alpha == beta) {
                    EXPECT_EQ(t, TruncatedSeries::constant(origin(n), t.trunc_degree(), Rational(1)));
                } else {
                    EXPECT_TRUE(t.is_zero()) << to_string(beta) << " " << to_string(alpha);
                }
            }
    }
}

TEST(TOperators, DefiningIdentityExamples) {
    auto sq = build_t_operators(power_map(2).germ_at(origin(1), 8), 3, 8);
    auto y2 = parse_polynomial("y^2", {"y"}).to_series(origin(1), 8);
    EXPECT_TRUE(verify_defining_identity(sq, y2, MultiIndex{2}).is_zero());

    auto id = build_t_operators(MapGerm::identity(origin(2), 6), 3, 6);
    auto g = parse_polynomial("u^2*v + 3*v^3", {"u", "v"}).to_series(origin(2), 6);
    for (const auto& beta : enumerate_upto(2, 3)) {
        if (beta.is_zero()) continue;
        EXPECT_TRUE(verify_defining_identity(id, g, beta).is_zero());
    }

    auto sg = build_t_operators(blow_up().germ_at(origin(2), 8), 3, 8);
    auto uv = parse_polynomial("u*v", {"u", "v"}).to_series(origin(2), 8);
    EXPECT_TRUE(verify_defining_identity(sg, uv, MultiIndex{1, 1}).is_zero());
}

// Univariate cross-check with dense arithmetic: for φ = x^k and g = y^p,
//   Δ^{2m−1}·(D^m g)(x^k) = Σ_a T_a^m·D^a(x^{kp}).
TEST(TOperators, UnivariateDenseOracle) {
    for (unsigned k = 2; k <= 3; ++k) {
        const unsigned d = 10;
        auto table = build_t_operators(power_map(k).germ_at(origin(1), d), 3, d);
        oracle::Dense delta = to_dense(table.profile().delta);
        for (unsigned m = 1; m <= 3; ++m)
            for (unsigned p = 0; p <= 4; ++p) {
                const unsigned keep = d - m;
                oracle::Dense f(k * p + 1, 0);
                f[k * p] = 1;
                oracle::Dense g(p + 1, 0);
                g[p] = 1;
                oracle::Dense dg = oracle::dense_derivative(g, m);
                oracle::Dense phi(k + 1, 0);
                phi[k] = 1;
                oracle::Dense lhs = oracle::dense_substitute(dg, phi, keep);
                for (unsigned r = 0; r < 2 * m - 1; ++r) lhs = oracle::dense_mul(lhs, delta, keep);
                oracle::Dense rhs(keep + 1, 0);
                for (unsigned a = 0; a <= m; ++a) {
                    auto t = to_dense(table.entry(MultiIndex{m}, MultiIndex{a}));
                    auto term = oracle::dense_mul(t, oracle::dense_derivative(f, a), keep);
                    for (unsigned i = 0; i <= keep; ++i) rhs[i] += term[i];
                }
                for (unsigned i = 0; i <= std::min(keep, table.entry(MultiIndex{m}, MultiIndex{0}).trunc_degree()); ++i)
                    EXPECT_EQ(lhs[i], rhs[i]) << "k=" << k << " m=" << m << " p=" << p << " i=" << i;
            }
    }
}

TEST(TOperators, OrderBoundExamples) {
    auto sq = build_t_operators(power_map(2).germ_at(origin(1), 8), 3, 8);
    for (const auto& r : verify_order_bound(sq)) EXPECT_TRUE(r.pass) << to_string(r.beta) << to_string(r.alpha);
    // μ = 1, ν = 0: T_(1)^(2) = −2 has order 0 = 1 − 1 + 2·0.
    bool seen = false;
    for (const auto& r : verify_order_bound(sq))
        if (r.beta == MultiIndex{2} && r.alpha == MultiIndex{1}) {
            EXPECT_EQ(r.required_bound, 0);
            EXPECT_EQ(r.observed_order, 0u);
            seen = true;
        }
    EXPECT_TRUE(seen);

    for (const auto& fx : named_fixtures()) {
        const std::size_t n = fx.map.dimension();
        auto table = build_t_operators(fx.map.germ_at(origin(n), 8), 3, 8);
        for (const auto& r : verify_order_bound(table)) EXPECT_TRUE(r.pass) << fx.name;
    }
}

TEST(TOperators, CramerBaseCase) {
    std::mt19937_64 rng(23);
    for (const auto& fx : named_fixtures()) {
        const std::size_t n = fx.map.dimension();
        auto germ = fx.map.germ_at(origin(n), 7);
        auto g = random_series(rng, germ.image_point(), 4, 7);
        for (std::size_t j = 0; j < n; ++j) EXPECT_TRUE(cramer_base_residual(germ, g, j).is_zero()) << fx.name;
    }
}

TEST(TOperators, RandomMapsSatisfyIdentity) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 6; ++trial) {
        std::size_t n = 1 + trial % 2;
        auto germ = random_map(rng, n, 3, trial % 2 == 0).germ_at(origin(n), 7);
        auto table = build_t_operators(germ, 3, 7);
        for (const auto& beta : enumerate_upto(n, 3)) {
            if (beta.is_zero()) continue;
            auto g = random_series(rng, germ.image_point(), 3, 7);
            EXPECT_TRUE(verify_defining_identity(table, g, beta).is_zero());
        }
        for (const auto& r : verify_order_bound(table)) EXPECT_TRUE(r.pass);
    }
}

TEST(TOperators, Errors) {
    auto germ = power_map(2).germ_at(origin(1), 4);
    EXPECT_THROW((void)build_t_operators(germ, 2, 6), InsufficientTruncation);
    EXPECT_THROW((void)build_t_operators(germ, 4, 3), InsufficientTruncation);
    auto table = build_t_operators(germ, 2, 4);
    auto g = x_poly("x", 4);
    EXPECT_THROW((void)verify_defining_identity(table, g, MultiIndex{3}), InputError);
    auto pruned = build_t_operators(germ, 2, 4, [](const MultiIndex& a) { return a.degree() == 0; });
    EXPECT_TRUE(pruned.pruned());
    EXPECT_THROW((void)verify_defining_identity(pruned, g, MultiIndex{1}), DomainError);
    EXPECT_THROW((void)table.entry(MultiIndex{3}, MultiIndex{0}), DomainError);
}

TEST(TOperators, DeterministicAndCached) {
    auto germ = blow_up().germ_at(origin(2), 6);
    auto a = build_t_operators(germ, 3, 6);
    auto b = build_t_operators(germ, 3, 6);
    EXPECT_EQ(io::to_json(a).dump(), io::to_json(b).dump());

    TOperatorCache cache;
    auto t1 = cache.get(germ, 3, 6);
    auto t2 = cache.get(germ, 3, 6);
    EXPECT_EQ(t1.get(), t2.get());
    EXPECT_EQ(cache.size(), 1u);
    (void)cache.get(germ, 2, 6);
    EXPECT_EQ(cache.size(), 2u);
}
