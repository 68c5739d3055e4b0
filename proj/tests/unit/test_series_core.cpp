#include "printers.hpp"
#include "random_models.hpp"

#include "semiclassical/errors.hpp"
#include "semiclassical/rational.hpp"
#include "semiclassical/series.hpp"

#include <doctest.h>

#include <gmpxx.h>

using namespace semiclassical;
using testing_support::random_series;

namespace {

PolySeries x1(int trunc) { return PolySeries::variable(1, trunc, 0); }
PolySeries c1(int trunc, const Rational& c) { return PolySeries::constant(1, trunc, c); }

bool canonical(const PolySeries& s) {
    for (const auto& [k, c] : s.terms()) {
        if (c.is_zero()) return false;
        if (static_cast<int>(k.degree()) > s.truncation()) return false;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), c.numerator().get_mpz_t(), c.denominator().get_mpz_t());
        if (abs(g) != 1 || c.denominator() <= 0) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("rational arithmetic is exact and canonical") {
    const Rational a(6, -4);
    CHECK(a.str() == "-3/2");
    CHECK(a.denominator() == 2);
    CHECK((Rational(1, 3) + Rational(1, 6)).str() == "1/2");
    CHECK(Rational::parse("10/4").str() == "5/2");
    CHECK(Rational::parse("-7") == Rational(-7));
    CHECK(Rational::parse("+3/9") == Rational(1, 3));
    CHECK_THROWS_AS(Rational::parse("1/0"), ParseError);
    CHECK_THROWS_AS(Rational::parse("abc"), ParseError);
    CHECK_THROWS_AS(Rational::parse(""), ParseError);
    CHECK(pow(Rational(-2, 3), 3) == Rational(-8, 27));
    CHECK(pow(Rational(2, 3), -2) == Rational(9, 4));
    CHECK(factorial(20).str() == "2432902008176640000");
    CHECK(factorial(25).str() == "15511210043330985984000000");
    CHECK(binomial(10, 3) == Rational(120));
    CHECK(Rational(1, 3) < Rational(1, 2));
}

TEST_CASE("add: spec examples") {
    const PolySeries a = c1(3, 1) + x1(3);
    PolySeries b = c1(3, -1);
    b.add_term(MultiIndex{2}, 1);
    PolySeries expect(1, 3);
    expect.set(MultiIndex{1}, 1);
    expect.set(MultiIndex{2}, 1);
    CHECK(a + b == expect);
    CHECK(a + PolySeries(1, 3) == a);
    const PolySeries half = PolySeries::monomial(MultiIndex{2}, 4, Rational(1, 2));
    CHECK(half + half == PolySeries::monomial(MultiIndex{2}, 4));
    CHECK((a + half).truncation() == 3);
    CHECK_THROWS_AS(PolySeries(1, 2) + PolySeries(2, 2), DimensionMismatch);
}

TEST_CASE("mul_truncated: spec examples") {
    CHECK(x1(2) * x1(2) == PolySeries::monomial(MultiIndex{2}, 2));
    CHECK((x1(1) * x1(1)).is_zero());
    const PolySeries p = c1(3, 1) + x1(3);
    const PolySeries m = c1(3, 1) - x1(3);
    PolySeries expect = c1(3, 1);
    expect.set(MultiIndex{2}, -1);
    CHECK(p * m == expect);
    CHECK_THROWS_AS(mul_truncated(PolySeries(1, 2), PolySeries(3, 2)), DimensionMismatch);
}

TEST_CASE("partial_derivative: spec examples") {
    const PolySeries h = PolySeries::monomial(MultiIndex{2}, 4, Rational(1, 2));
    const PolySeries dh = partial_derivative(h, 0);
    CHECK(dh == PolySeries::monomial(MultiIndex{1}, 3));
    CHECK(dh.truncation() == 3);
    CHECK(partial_derivative(PolySeries::monomial(MultiIndex{2, 0}, 5), 1).is_zero());
    CHECK(partial_derivative(PolySeries::monomial(MultiIndex{2, 3}, 5), 0) == PolySeries::monomial(MultiIndex{1, 3}, 4, 2));
    CHECK_THROWS_AS(partial_derivative(h, 1), AxisOutOfRange);
}

TEST_CASE("homogeneous_component: spec examples") {
    const PolySeries s = c1(2, 1) + x1(2) + PolySeries::monomial(MultiIndex{2}, 2);
    CHECK(homogeneous_component(s, 1) == x1(2));
    const PolySeries xy = PolySeries::monomial(MultiIndex{2, 1}, 3);
    CHECK(homogeneous_component(xy, 3) == xy);
    CHECK(homogeneous_component(PolySeries::monomial(MultiIndex{2}, 2), 1).is_zero());
    CHECK_THROWS_AS(homogeneous_component(s, 3), DegreeOutOfRange);
    CHECK_THROWS_AS(homogeneous_component(s, -1), DegreeOutOfRange);
}

TEST_CASE("laplacian: spec examples") {
    const PolySeries lap1 = laplacian(PolySeries::monomial(MultiIndex{2}, 4, Rational(1, 2)));
    CHECK(lap1 == c1(2, 1));
    const PolySeries r2 = PolySeries::monomial(MultiIndex{2, 0}, 2) + PolySeries::monomial(MultiIndex{0, 2}, 2);
    CHECK(laplacian(r2) == PolySeries::constant(2, 0, 4));
    CHECK(laplacian(PolySeries::monomial(MultiIndex{4}, 4)) == PolySeries::monomial(MultiIndex{2}, 2, 12));
}

TEST_CASE("set rejects degrees above truncation, add_term drops them") {
    PolySeries s(2, 2);
    CHECK_THROWS_AS(s.set(MultiIndex{2, 1}, 1), DegreeOutOfRange);
    s.add_term(MultiIndex{2, 1}, 1);
    CHECK(s.is_zero());
    s.add_term(MultiIndex{1, 1}, Rational(1, 2));
    s.add_term(MultiIndex{1, 1}, Rational(-1, 2));
    CHECK(s.is_zero());
    CHECK_THROWS_AS(s.set(MultiIndex{1}, 1), DimensionMismatch);
}

TEST_CASE("graded lexicographic iteration order") {
    PolySeries s(2, 3);
    s.set(MultiIndex{0, 3}, 1);
    s.set(MultiIndex{1, 0}, 1);
    s.set(MultiIndex{2, 1}, 1);
    s.set(MultiIndex{3, 0}, 1);
    std::vector<std::vector<unsigned>> order;
    for (const auto& [k, c] : s.terms()) order.push_back(k.exponents());
    CHECK(order == std::vector<std::vector<unsigned>>{{1, 0}, {3, 0}, {2, 1}, {0, 3}});
    CHECK(to_string(PolySeries::monomial(MultiIndex{2}, 4, Rational(1, 2))) == "1/2*x^2 + O(|x|^5)");
}

TEST_CASE("ring axioms on random series") {
    std::mt19937_64 rng(20240611);
    for (std::size_t dim = 1; dim <= 3; ++dim) {
        for (int D = 0; D <= 8; D += (dim == 3 ? 2 : 1)) {
            for (int rep = 0; rep < 3; ++rep) {
                const auto a = random_series(rng, dim, D);
                const auto b = random_series(rng, dim, D);
                const auto c = random_series(rng, dim, D);
                CHECK(a + b == b + a);
                CHECK((a + b) + c == a + (b + c));
                CHECK(a * b == b * a);
                CHECK((a * b) * c == a * (b * c));
                CHECK(a * (b + c) == a * b + a * c);
                CHECK(a - a == PolySeries(dim, D));
                CHECK(a * PolySeries::constant(dim, D, 1) == a);
                CHECK(canonical(a * b + c));
            }
        }
    }
}

TEST_CASE("mixed partial derivatives commute") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        const auto a = random_series(rng, 3, 7);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(partial_derivative(partial_derivative(a, i), j) == partial_derivative(partial_derivative(a, j), i));
    }
}

TEST_CASE("product restricted to a degree is the sum of component products") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 8; ++rep) {
        const std::size_t dim = 1 + rep % 3;
        const int D = 6;
        const auto a = random_series(rng, dim, D);
        const auto b = random_series(rng, dim, D);
        const auto prod = a * b;
        for (int d = 0; d <= D; ++d) {
            PolySeries expect(dim, D);
            for (int j = 0; j <= d; ++j)
                expect = expect + mul_truncated(homogeneous_component(a, j), homogeneous_component(b, d - j), D);
            CHECK(homogeneous_component(prod, d) == homogeneous_component(expect, d));
        }
    }
}

TEST_CASE("mixed truncations take the minimum") {
    std::mt19937_64 rng(3);
    const auto a = random_series(rng, 2, 5);
    const auto b = random_series(rng, 2, 3);
    CHECK((a + b).truncation() == 3);
    CHECK((a * b).truncation() == 3);
    CHECK(laplacian(a).truncation() == 3);
}

TEST_CASE("evaluation agrees with exact rational evaluation") {
    std::mt19937_64 rng(11);
    const auto a = random_series(rng, 2, 5);
    const std::vector<Rational> xr{Rational(1, 3), Rational(-2, 5)};
    const std::vector<double> xd{1.0 / 3.0, -0.4};
    CHECK(a.evaluate(std::span<const double>(xd)) == doctest::Approx(a.evaluate(std::span<const Rational>(xr)).to_double()).epsilon(1e-13));
}

TEST_CASE("JSON round trip is bit exact") {
    std::mt19937_64 rng(5);
    for (std::size_t dim = 1; dim <= 3; ++dim) {
        PolySeries a = random_series(rng, dim, 6);
        a.add_term(MultiIndex::unit(dim, 0).raised(0), Rational(mpq_class("123456789012345678901234567890/7")));
        const auto j = series_to_json(a);
        CHECK(series_from_json(j) == a);
        CHECK(series_from_json(nlohmann::json::parse(j.dump())) == a);
        CHECK(series_to_json(series_from_json(j)).dump() == j.dump());
    }
    CHECK_THROWS_AS(series_from_json(nlohmann::json::parse(R"({"dim":1,"trunc":2,"terms":[{"k":[3],"c":"1"}]})")), DegreeOutOfRange);
    CHECK_THROWS_AS(series_from_json(nlohmann::json::parse(R"({"dim":2,"trunc":2,"terms":[{"k":[1],"c":"1"}]})")), DimensionMismatch);
    CHECK_THROWS_AS(series_from_json(nlohmann::json::parse(R"({"dim":1,"terms":[{"k":[1],"c":"x"}]})")), ParseError);
}
