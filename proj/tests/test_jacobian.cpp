#include <random>

#include <gtest/gtest.h>

#include <germ_radius/germ_radius.hpp>

#include "support/fixtures.hpp"

using namespace germ_radius;
using namespace germ_radius::testing;

namespace {

TruncatedSeries at0(const std::string& text, const std::vector<std::string>& vars, unsigned trunc) {
    return parse_polynomial(text, vars).to_series(origin(vars.size()), trunc);
}

} // namespace

TEST(Jacobian, MatrixExamples) {
    auto j1 = jacobian_matrix(power_map(2).germ_at(origin(1), 5));
    EXPECT_EQ(j1(0, 0), at0("2*x", {"x"}, 4));

    const std::vector<std::string> xy{"x", "y"};
    auto js = jacobian_matrix(blow_up().germ_at(origin(2), 5));
    EXPECT_EQ(js(0, 0), at0("1", xy, 4));
    EXPECT_EQ(js(0, 1), at0("0", xy, 4));
    EXPECT_EQ(js(1, 0), at0("y", xy, 4));
    EXPECT_EQ(js(1, 1), at0("x", xy, 4));

    auto ji = jacobian_matrix(MapGerm::identity(origin(3), 3));
    EXPECT_EQ(ji, SeriesMatrix::scalar(3, TruncatedSeries::constant(origin(3), 2, Rational(1))));
}

TEST(Jacobian, ZeroTruncationIsAnError) {
    EXPECT_THROW((void)jacobian_matrix(power_map(2).germ_at(origin(1), 0)), InsufficientTruncation);
}

TEST(Jacobian, DeterminantAndAdjugateExamples) {
    const std::vector<std::string> xy{"x", "y"};
    auto js = jacobian_matrix(blow_up().germ_at(origin(2), 5));
    EXPECT_EQ(determinant(js), at0("x", xy, 4));
    auto adj = adjugate(js);
    EXPECT_EQ(adj(0, 0), at0("x", xy, 4));
    EXPECT_EQ(adj(0, 1), at0("0", xy, 4));
    EXPECT_EQ(adj(1, 0), at0("-y", xy, 4));
    EXPECT_EQ(adj(1, 1), at0("1", xy, 4));
    EXPECT_EQ(js * adj, SeriesMatrix::scalar(2, at0("x", xy, 4)));

    auto j1 = jacobian_matrix(power_map(2).germ_at(origin(1), 5));
    EXPECT_EQ(determinant(j1), at0("2*x", {"x"}, 4));
    EXPECT_EQ(adjugate(j1)(0, 0), at0("1", {"x"}, 4));

    auto ji = jacobian_matrix(MapGerm::identity(origin(2), 3));
    EXPECT_EQ(determinant(ji), at0("1", xy, 2));
    EXPECT_EQ(adjugate(ji), ji);
}

TEST(Jacobian, DeterminantOfKnownThreeByThree) {
    // φ = (x + y*z, y + x^2, z*x): J has determinant computable by hand.
    auto map = map_of({"x + y*z", "y + x^2", "z*x"}, {"x", "y", "z"});
    auto j = jacobian_matrix(map.germ_at(origin(3), 6));
    // J = [[1, z, y], [2x, 1, 0], [z, 0, x]]
    // det = 1·(x) − z·(2x·x − 0) + y·(0 − z) = x − 2x²z − yz
    EXPECT_EQ(determinant(j), at0("x - 2*x^2*z - y*z", {"x", "y", "z"}, 5));
}

TEST(Jacobian, ProfileExamples) {
    auto p2 = profile(power_map(2).germ_at(origin(1), 6));
    EXPECT_EQ(p2.mu, 1u);
    EXPECT_EQ(p2.nu, 0u);
    EXPECT_EQ(p2.alpha, (MultiIndex{1}));
    EXPECT_EQ(p2.d_alpha_delta, 2);
    EXPECT_EQ(p2.lambda, 2u);
    EXPECT_EQ(p2.computed_at_degree, 5u);

    auto ps = profile(blow_up().germ_at(origin(2), 6));
    EXPECT_EQ(ps.mu, 1u);
    EXPECT_EQ(ps.nu, 0u);
    EXPECT_EQ(ps.alpha, (MultiIndex{1, 0}));
    EXPECT_EQ(ps.d_alpha_delta, 1);
    EXPECT_EQ(ps.lambda, 2u);

    for (unsigned k = 2; k <= 6; ++k) {
        auto pk = profile(power_map(k).germ_at(origin(1), 8));
        EXPECT_EQ(pk.mu, k - 1);
        EXPECT_EQ(pk.nu, 0u);
        EXPECT_EQ(pk.lambda, k);
        EXPECT_EQ(pk.d_alpha_delta, Rational(factorial(k)));
        EXPECT_EQ(pk.alpha_coefficient(), k);
    }
}

TEST(Jacobian, SingularJacobianIsReported) {
    auto degenerate = map_of({"x + y", "x + y"}, {"x", "y"});
    EXPECT_THROW((void)profile(degenerate.germ_at(origin(2), 5)), SingularJacobian);
    // x^5 truncated at degree 4: Δ = 5x^4 is beyond Δ's degree 3.
    EXPECT_THROW((void)profile(power_map(5).germ_at(origin(1), 4)), SingularJacobian);
}

TEST(Jacobian, CoefficientBoundConstants) {
    // Enumeration oracle: with c₂ = 1 the smallest admissible c₁ is the
    // largest |D^αT(a)|/α! over the finitely many α, floored at 1.
    auto oracle_c1 = [](const MapGerm& g) {
        auto j = jacobian_matrix(g);
        std::vector<TruncatedSeries> all{determinant(j)};
        SeriesMatrix adj = adjugate(j);
        for (const auto& e : adj.entries()) all.push_back(e);
        Rational best(1);
        for (const auto& s : all)
            for (const auto& alpha : enumerate_upto(s.dimension(), s.trunc_degree())) {
                Rational v = derive(s, alpha).eval_at_center() / Rational(mi_factorial(alpha));
                best = std::max(best, abs(v));
            }
        return best;
    };
    auto sq = power_map(2).germ_at(origin(1), 4);
    auto [c1, c2] = coefficient_bound_constants(sq);
    EXPECT_EQ(c1, 2);
    EXPECT_EQ(c2, 1);
    EXPECT_EQ(c1, oracle_c1(sq));

    auto id = MapGerm::identity(origin(2), 3);
    EXPECT_EQ(coefficient_bound_constants(id), std::make_pair(Rational(1), Rational(1)));

    auto sg = blow_up().germ_at(origin(2), 4);
    EXPECT_EQ(coefficient_bound_constants(sg), std::make_pair(Rational(1), Rational(1)));
    EXPECT_EQ(oracle_c1(sg), 1);

    // Δ = 4x^3 reaches the truncation degree of Δ: not known to be polynomial.
    EXPECT_THROW((void)coefficient_bound_constants(power_map(4).germ_at(origin(1), 4)), DomainError);
}

TEST(JacobianProperties, AdjugateIdentityAndInvariants) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 1 + trial % 3;
        auto map = random_map(rng, n, 3, trial % 3 == 0);
        Point a(n);
        if (trial % 4 == 1)
            for (auto& v : a) v = random_rational(rng);
        auto germ = map.germ_at(a, 6);
        auto j = jacobian_matrix(germ);
        auto adj = adjugate(j);
        auto scalar = SeriesMatrix::scalar(n, determinant(j));
        EXPECT_EQ(j * adj, scalar);
        EXPECT_EQ(adj * j, scalar);

        auto p = profile(germ);
        EXPECT_GE(p.mu, p.nu);
        EXPECT_GE(p.lambda, 1u);
        EXPECT_EQ(p.alpha.degree(), p.mu);
        EXPECT_NE(p.d_alpha_delta, 0);
        for (const auto& g : enumerate_upto(n, p.mu)) {
            if (compare(g, p.alpha) >= 0) break;
            EXPECT_EQ(p.delta.coefficient(g), 0);
        }
        if (n == 1) {
            EXPECT_EQ(p.nu, 0u);
        }
    }
}
