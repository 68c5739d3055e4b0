#pragma once

#include "semiclassical/rational.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace semiclassical {

class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::size_t n) : e_(n, 0) {}
    explicit MultiIndex(std::vector<unsigned> exponents);
    MultiIndex(std::initializer_list<unsigned> exponents) : MultiIndex(std::vector<unsigned>(exponents)) {}

    static MultiIndex unit(std::size_t n, std::size_t axis);

    std::size_t size() const { return e_.size(); }
    unsigned operator[](std::size_t i) const { return e_[i]; }
    unsigned degree() const { return degree_; }
    const std::vector<unsigned>& exponents() const { return e_; }

    void set(std::size_t i, unsigned value);
    // Requires e[i] > 0.
    MultiIndex lowered(std::size_t i) const;
    MultiIndex raised(std::size_t i) const;

    friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.e_ == b.e_; }

private:
    std::vector<unsigned> e_;
    unsigned degree_ = 0;
};

// Graded lexicographic: lower total degree first; within a degree, x1^d comes
// before x1^(d-1) x2 and so on.
struct GradedLexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        return a.exponents() > b.exponents();
    }
};

// Truncated multivariate power series with exact rational coefficients.
// truncation() is the highest degree that is known; -1 means nothing is known
// (what is left after differentiating a degree-0 series).
class PolySeries {
public:
    using Terms = std::map<MultiIndex, Rational, GradedLexLess>;
    using const_iterator = Terms::const_iterator;

    PolySeries() = default;
    PolySeries(std::size_t dim, int truncation);

    static PolySeries constant(std::size_t dim, int truncation, const Rational& c);
    static PolySeries variable(std::size_t dim, int truncation, std::size_t axis);
    static PolySeries monomial(const MultiIndex& k, int truncation, const Rational& c = Rational(1));

    std::size_t dim() const { return dim_; }
    int truncation() const { return trunc_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    Rational coefficient(const MultiIndex& k) const;
    // Overwrites; zero removes the term. Degrees above the truncation are rejected.
    void set(const MultiIndex& k, const Rational& c);
    // Accumulates; terms above the truncation are silently dropped.
    void add_term(const MultiIndex& k, const Rational& c);

    // Terms of exact total degree d, in graded-lex order.
    std::pair<const_iterator, const_iterator> degree_range(unsigned d) const;

    int max_degree() const;
    int valuation() const;

    PolySeries retruncated(int truncation) const;
    PolySeries scaled(const Rational& s) const;
    PolySeries operator-() const { return scaled(Rational(-1)); }

    double evaluate(std::span<const double> x) const;
    Rational evaluate(std::span<const Rational> x) const;

    friend bool operator==(const PolySeries& a, const PolySeries& b) {
        return a.dim_ == b.dim_ && a.trunc_ == b.trunc_ && a.terms_ == b.terms_;
    }

private:
    std::size_t dim_ = 0;
    int trunc_ = -1;
    Terms terms_;
};

PolySeries add(const PolySeries& a, const PolySeries& b);
PolySeries subtract(const PolySeries& a, const PolySeries& b);
PolySeries mul_truncated(const PolySeries& a, const PolySeries& b);
// Product kept through `truncation`. The caller vouches that the factors carry
// enough data, e.g. when one factor has a high valuation.
PolySeries mul_truncated(const PolySeries& a, const PolySeries& b, int truncation);
PolySeries partial_derivative(const PolySeries& a, std::size_t axis);
PolySeries homogeneous_component(const PolySeries& a, int degree);
PolySeries laplacian(const PolySeries& a);
std::vector<PolySeries> gradient(const PolySeries& a);
// Sum_i u_i v_i kept through `truncation`.
PolySeries dot(const std::vector<PolySeries>& u, const std::vector<PolySeries>& v, int truncation);

inline PolySeries operator+(const PolySeries& a, const PolySeries& b) { return add(a, b); }
inline PolySeries operator-(const PolySeries& a, const PolySeries& b) { return subtract(a, b); }
inline PolySeries operator*(const PolySeries& a, const PolySeries& b) { return mul_truncated(a, b); }

// Human-readable form such as "1/2*x^2 - 3*x^4 + O(x^7)".
std::string to_string(const PolySeries& a);

nlohmann::json series_to_json(const PolySeries& a);
// `dim` and `trunc` may be omitted when defaults are supplied (model files do
// this for the anharmonic part).
PolySeries series_from_json(const nlohmann::json& j, int default_dim = -1, int default_trunc = -1);

}  // namespace semiclassical
