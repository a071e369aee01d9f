#include <random>

#include <gtest/gtest.h>

#include <germ_radius/germ_radius.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace germ_radius;
using namespace germ_radius::testing;

namespace {

Polynomial terms_of(std::size_t n, std::initializer_list<std::pair<MultiIndex, Rational>> ts) {
    Polynomial p(n);
    for (const auto& [g, c] : ts) p.add_term(g, c);
    return p;
}

} // namespace

TEST(Rational, ParseAndPrint) {
    EXPECT_EQ(parse_rational("3/6"), make_rational(1, 2));
    EXPECT_EQ(parse_rational("-4"), -4);
    EXPECT_EQ(to_string(make_rational(6, -4)), "-3/2");
    EXPECT_EQ(to_string(Rational(5)), "5");
    for (const char* bad : {"", "1/0", "1.5", "x", "1/", "/2", "1//2"})
        EXPECT_THROW((void)parse_rational(bad), InputError) << bad;
}

TEST(Parse, Examples) {
    EXPECT_EQ(parse_polynomial("x^2", {"x"}), terms_of(1, {{MultiIndex{2}, Rational(1)}}));
    EXPECT_EQ(parse_polynomial("x*y - 3/2*x", {"x", "y"}),
              terms_of(2, {{MultiIndex{1, 1}, Rational(1)}, {MultiIndex{1, 0}, make_rational(-3, 2)}}));
    EXPECT_EQ(parse_polynomial("(x+y)^2", {"x", "y"}),
              terms_of(2, {{MultiIndex{2, 0}, Rational(1)},
                           {MultiIndex{1, 1}, Rational(2)},
                           {MultiIndex{0, 2}, Rational(1)}}));
    EXPECT_EQ(parse_polynomial("-(x - 1)", {"x"}),
              terms_of(1, {{MultiIndex{1}, Rational(-1)}, {MultiIndex{0}, Rational(1)}}));
    EXPECT_EQ(parse_polynomial("x - x", {"x"}), Polynomial(1));
}

TEST(Parse, Rejections) {
    const std::vector<std::string> xy{"x", "y"};
    for (const char* bad : {"x^-1", "x^(2)", "x^1/2", "2x", "x y", "x^2^2", "z", "", "x +", "(x", "x^99999",
                            "1/0"})
        EXPECT_THROW((void)parse_polynomial(bad, xy), InputError) << bad;
    try {
        (void)parse_polynomial("x^-1", xy);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 2u);
    }
}

TEST(Parse, FormatExamples) {
    const std::vector<std::string> xy{"x", "y"};
    EXPECT_EQ(format_polynomial(parse_polynomial("x*y - 3/2*x", xy), xy), "x*y - 3/2*x");
    EXPECT_EQ(format_polynomial(parse_polynomial("-(x+y)^2 + 1", xy), xy), "-x^2 - 2*x*y - y^2 + 1");
    EXPECT_EQ(format_polynomial(Polynomial(2), xy), "0");
}

TEST(Parse, FormatThenParseIsIdentity) {
    std::mt19937_64 rng(43);
    const std::vector<std::string> vars{"x", "y", "z"};
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 1 + trial % 3;
        std::vector<std::string> v(vars.begin(), vars.begin() + static_cast<long>(n));
        Polynomial p(n);
        for (const auto& g : enumerate_upto(n, 4))
            if (rng() % 3 == 0) p.add_term(g, random_rational(rng, 9, 7));
        auto text = format_polynomial(p, v);
        EXPECT_EQ(parse_polynomial(text, v), p) << text;
    }
}

TEST(Parse, VariableValidation) {
    EXPECT_THROW(validate_variables({}), InputError);
    EXPECT_THROW(validate_variables({"x", "x"}), InputError);
    EXPECT_THROW(validate_variables({"1x"}), InputError);
    EXPECT_NO_THROW(validate_variables({"x1", "x_2"}));
    EXPECT_THROW((void)parse_map({"x"}, {"x", "y"}), InputError);
}

TEST(Polynomial, RecentringIsExact) {
    auto p = parse_polynomial("x^3 - 2*x*y + 5", {"x", "y"});
    Point c{make_rational(1, 2), Rational(-3)};
    auto s = p.to_series(c, 3);
    // (x − c) basis: check at several points against direct evaluation.
    std::mt19937_64 rng(2);
    for (int k = 0; k < 10; ++k) {
        Point x{random_rational(rng), random_rational(rng)};
        EXPECT_EQ(oracle::evaluate(s, x), p.evaluate(x));
    }
    EXPECT_EQ(s.eval_at_center(), p.evaluate(c));
    EXPECT_EQ(s.coefficient(MultiIndex{1, 0}), make_rational(3, 4) + 6);
    // Truncation below the degree keeps only the low part.
    EXPECT_EQ(p.to_series(c, 1).coefficient(MultiIndex{0, 1}), -1);
}

TEST(Polynomial, MapEvaluateMatchesGerm) {
    auto m = blow_up();
    Point a{Rational(2), make_rational(1, 3)};
    EXPECT_EQ(m.evaluate(a), (Point{Rational(2), make_rational(2, 3)}));
    EXPECT_EQ(m.germ_at(a, 3).image_point(), m.evaluate(a));
}
