#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "rational.hpp"

namespace germ_radius {

/// Exponent vector (γ₁,…,γₙ) ∈ ℕⁿ. The dimension travels with the value and
/// every binary operation checks it.
class MultiIndex {
public:
    static constexpr std::size_t kMaxDimension = 8;

    MultiIndex() = default;

    explicit MultiIndex(std::size_t n) : n_(checked_dimension(n)) {}

    MultiIndex(std::initializer_list<unsigned> exponents)
        : MultiIndex(std::span<const unsigned>(exponents.begin(), exponents.size())) {}

    explicit MultiIndex(std::span<const unsigned> exponents)
        : n_(checked_dimension(exponents.size())) {
        for (std::size_t i = 0; i < n_; ++i) {
            e_[i] = exponents[i];
            degree_ += exponents[i];
        }
    }

    static MultiIndex unit(std::size_t n, std::size_t i) {
        MultiIndex out(n);
        if (i >= n) throw InputError("mindex", "unit index out of range");
        out.e_[i] = 1;
        out.degree_ = 1;
        return out;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] unsigned degree() const noexcept { return degree_; }
    [[nodiscard]] unsigned operator[](std::size_t i) const noexcept { return e_[i]; }
    [[nodiscard]] std::span<const unsigned> exponents() const noexcept { return {e_.data(), n_}; }
    [[nodiscard]] bool is_zero() const noexcept { return degree_ == 0; }

    /// True when every component is ≥ the corresponding component of other.
    [[nodiscard]] bool dominates(const MultiIndex& other) const {
        require_same_dimension(*this, other);
        for (std::size_t i = 0; i < n_; ++i)
            if (e_[i] < other.e_[i]) return false;
        return true;
    }

    void increment(std::size_t i, unsigned by = 1) {
        e_[i] += by;
        degree_ += by;
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) noexcept {
        return a.n_ == b.n_ && a.e_ == b.e_;
    }

    static void require_same_dimension(const MultiIndex& a, const MultiIndex& b) {
        if (a.n_ != b.n_)
            throw InputError("mindex", "dimension mismatch: " + std::to_string(a.n_) + " vs " +
                                           std::to_string(b.n_));
    }

private:
    static std::size_t checked_dimension(std::size_t n) {
        if (n > kMaxDimension)
            throw InputError("mindex", "dimension " + std::to_string(n) + " exceeds " +
                                           std::to_string(kMaxDimension));
        return n;
    }

    std::array<unsigned, kMaxDimension> e_{};
    std::size_t n_ = 0;
    unsigned degree_ = 0;
};

/// Graded-lexicographic order: compare (|γ|, γ₁, …, γₙ) lexicographically.
inline std::strong_ordering compare(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex::require_same_dimension(a, b);
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (auto c = a[i] <=> b[i]; c != 0) return c;
    return std::strong_ordering::equal;
}

struct GradedLexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const { return compare(a, b) < 0; }
};

inline MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex::require_same_dimension(a, b);
    MultiIndex out(a);
    for (std::size_t i = 0; i < a.size(); ++i) out.increment(i, b[i]);
    return out;
}

/// a − b, or nullopt when some component would drop below zero.
inline std::optional<MultiIndex> checked_sub(const MultiIndex& a, const MultiIndex& b) {
    if (!a.dominates(b)) return std::nullopt;
    std::vector<unsigned> e(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) e[i] = a[i] - b[i];
    return MultiIndex(std::span<const unsigned>(e));
}

inline MultiIndex scale(const MultiIndex& a, unsigned m) {
    std::vector<unsigned> e(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) e[i] = a[i] * m;
    return MultiIndex(std::span<const unsigned>(e));
}

/// β! = Πᵢ βᵢ!
inline Integer mi_factorial(const MultiIndex& beta) {
    Integer out(1);
    for (unsigned e : beta.exponents()) out *= factorial(e);
    return out;
}

/// (γ+α)!/γ!, the factor produced by D^α acting on (x−a)^{γ+α}.
inline Integer falling_factorial(const MultiIndex& gamma_plus_alpha, const MultiIndex& alpha) {
    Integer out(1);
    for (std::size_t i = 0; i < alpha.size(); ++i)
        for (unsigned k = 0; k < alpha[i]; ++k) out *= gamma_plus_alpha[i] - k;
    return out;
}

/// Indices of a single degree shell |γ| = d, ascending in graded-lex order.
inline std::vector<MultiIndex> enumerate_shell(std::size_t n, unsigned d) {
    if (n == 0) throw InputError("mindex", "enumeration needs n >= 1");
    std::vector<MultiIndex> out;
    std::vector<unsigned> e(n, 0);
    // Lexicographic ascending within a shell: the first coordinate grows slowest.
    auto emit = [&](auto&& self, std::size_t i, unsigned remaining) -> void {
        if (i + 1 == n) {
            e[i] = remaining;
            out.emplace_back(std::span<const unsigned>(e));
            return;
        }
        for (unsigned k = 0; k <= remaining; ++k) {
            e[i] = k;
            self(self, i + 1, remaining - k);
        }
    };
    emit(emit, 0, d);
    return out;
}

/// All γ ∈ ℕⁿ with |γ| ≤ d, ascending in graded-lex order.
inline std::vector<MultiIndex> enumerate_upto(std::size_t n, unsigned d) {
    std::vector<MultiIndex> out;
    for (unsigned shell = 0; shell <= d; ++shell) {
        auto s = enumerate_shell(n, shell);
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

inline std::string to_string(const MultiIndex& g) {
    std::string s = "[";
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(g[i]);
    }
    return s + "]";
}

inline std::ostream& operator<<(std::ostream& os, const MultiIndex& g) { return os << to_string(g); }

} // namespace germ_radius
