#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "polynomial.hpp"

namespace germ_radius {

/// Error in an expression string; position is the 0-based character offset.
class ParseError : public InputError {
public:
    ParseError(std::size_t position, const std::string& message, std::string_view text)
        : InputError("parse", message + " at position " + std::to_string(position) + " in '" +
                                  std::string(text) + "'"),
          position_(position) {}

    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

namespace detail {

// expr    := term (('+' | '-') term)*
// term    := unary ('*' unary)*
// unary   := ('+' | '-') unary | power
// power   := primary ('^' natural)?
// primary := natural ('/' natural)? | identifier | '(' expr ')'
class ExpressionParser {
public:
    ExpressionParser(std::string_view text, const std::vector<std::string>& variables)
        : text_(text), vars_(variables) {}

    Polynomial parse() {
        Polynomial p = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg, text_); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string natural() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected an integer");
        return std::string(text_.substr(start, pos_ - start));
    }

    Polynomial expr() {
        Polynomial p = term();
        while (true) {
            if (accept('+'))
                p = p + term();
            else if (accept('-'))
                p = p - term();
            else
                return p;
        }
    }

    Polynomial term() {
        Polynomial p = unary();
        while (accept('*')) p = p * unary();
        return p;
    }

    Polynomial unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Polynomial power() {
        Polynomial base = primary();
        if (!accept('^')) return base;
        skip_space();
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '('))
            fail("exponent must be a nonnegative integer literal");
        std::string digits = natural();
        skip_space();
        if (pos_ < text_.size() && (text_[pos_] == '/' || text_[pos_] == '.'))
            fail("fractional exponents are not supported");
        if (pos_ < text_.size() && text_[pos_] == '^') fail("chained exponents are ambiguous");
        if (digits.size() > 4) fail("exponent too large");
        return base.pow(static_cast<unsigned>(std::stoul(digits)));
    }

    Polynomial primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial p = expr();
            if (!accept(')')) fail("expected ')'");
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num = natural();
            std::string literal = num;
            if (accept('/')) literal += "/" + natural();
            skip_space();
            if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
                                        text_[pos_] == '('))
                fail("implicit multiplication is not supported; use '*'");
            Rational value;
            try {
                value = parse_rational(literal);
            } catch (const InputError&) {
                fail("invalid rational literal '" + literal + "'");
            }
            return Polynomial::constant(vars_.size(), value);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            for (std::size_t i = 0; i < vars_.size(); ++i)
                if (vars_[i] == name) return Polynomial::variable(vars_.size(), i);
            pos_ = start;
            fail("unknown variable '" + name + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline void validate_variables(const std::vector<std::string>& variables) {
    if (variables.empty()) throw InputError("parse", "at least one variable is required");
    for (std::size_t i = 0; i < variables.size(); ++i) {
        const auto& v = variables[i];
        bool ok = !v.empty() && (std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_');
        for (char c : v) ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
        if (!ok) throw InputError("parse", "invalid variable name '" + v + "'");
        for (std::size_t j = 0; j < i; ++j)
            if (variables[j] == v) throw InputError("parse", "duplicate variable name '" + v + "'");
    }
}

/// Parses a polynomial expression over exact rationals.
inline Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& variables) {
    validate_variables(variables);
    return detail::ExpressionParser(text, variables).parse();
}

/// Expression text that parse_polynomial reads back to the same terms,
/// highest graded-lex term first.
inline std::string format_polynomial(const Polynomial& p, const std::vector<std::string>& variables) {
    validate_variables(variables);
    if (variables.size() != p.dimension())
        throw InputError("parse", "variable count does not match the polynomial dimension");
    if (p.terms().empty()) return "0";
    std::string out;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [g, c] = *it;
        bool negative = c < 0;
        if (out.empty()) out += negative ? "-" : "";
        else out += negative ? " - " : " + ";
        Rational mag = abs(c);
        std::string factors;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i] == 0) continue;
            if (!factors.empty()) factors += "*";
            factors += variables[i];
            if (g[i] > 1) factors += "^" + std::to_string(g[i]);
        }
        if (factors.empty()) out += to_string(mag);
        else if (mag == 1) out += factors;
        else out += to_string(mag) + "*" + factors;
    }
    return out;
}

inline PolynomialMap parse_map(const std::vector<std::string>& components,
                               const std::vector<std::string>& variables) {
    if (components.size() != variables.size())
        throw InputError("parse", "map has " + std::to_string(components.size()) +
                                      " components but " + std::to_string(variables.size()) +
                                      " variables");
    PolynomialMap map;
    for (const auto& text : components) map.components.push_back(parse_polynomial(text, variables));
    return map;
}

} // namespace germ_radius
