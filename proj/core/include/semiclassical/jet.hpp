#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace semiclassical {

// Truncated univariate Taylor series sum_i c_i t^i (automatic differentiation
// to arbitrary order). A size-1 jet is a constant and mixes with any order;
// jets of different nontrivial orders must not be combined.
class Jet {
public:
    Jet(double value = 0.0) : c_{value} {}  // NOLINT(google-explicit-constructor)
    explicit Jet(std::vector<double> coefficients) : c_(std::move(coefficients)) {
        if (c_.empty()) c_.push_back(0.0);
    }

    // x0 + t, carrying `order` derivatives.
    static Jet variable(double x0, std::size_t order) {
        std::vector<double> c(order + 1, 0.0);
        c[0] = x0;
        if (order >= 1) c[1] = 1.0;
        return Jet(std::move(c));
    }

    std::size_t size() const { return c_.size(); }
    double value() const { return c_[0]; }
    double operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }
    const std::vector<double>& coefficients() const { return c_; }
    // k-th derivative at the expansion point.
    double derivative(std::size_t k) const {
        double f = 1.0;
        for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
        return (*this)[k] * f;
    }

    Jet operator-() const {
        Jet r = *this;
        for (auto& v : r.c_) v = -v;
        return r;
    }
    Jet& operator+=(const Jet& o) {
        grow(o.size());
        for (std::size_t i = 0; i < o.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        grow(o.size());
        for (std::size_t i = 0; i < o.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        const std::size_t n = std::max(a.size(), b.size());
        std::vector<double> r(n, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; i + j < n && j < b.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return Jet(std::move(r));
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        if (b.c_[0] == 0.0) throw std::domain_error("Jet division by a series with zero constant term");
        const std::size_t n = std::max(a.size(), b.size());
        std::vector<double> r(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            double s = a[k];
            for (std::size_t j = 1; j <= k; ++j) s -= b[j] * r[k - j];
            r[k] = s / b.c_[0];
        }
        return Jet(std::move(r));
    }

    Jet& operator*=(const Jet& o) { return *this = *this * o; }
    Jet& operator/=(const Jet& o) { return *this = *this / o; }

    friend Jet exp(const Jet& a) {
        const std::size_t n = a.size();
        std::vector<double> r(n, 0.0);
        r[0] = std::exp(a.c_[0]);
        for (std::size_t k = 1; k < n; ++k) {
            double s = 0.0;
            for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a.c_[j] * r[k - j];
            r[k] = s / static_cast<double>(k);
        }
        return Jet(std::move(r));
    }

    // log(1 + a), accurate in the constant term for small a.
    friend Jet log1p(const Jet& a) {
        Jet one_plus = a;
        one_plus.c_[0] += 1.0;
        Jet r = log(one_plus);
        r.c_[0] = std::log1p(a.c_[0]);
        return r;
    }

    friend Jet log(const Jet& a) {
        if (a.c_[0] <= 0.0) throw std::domain_error("Jet log of a non-positive value");
        const std::size_t n = a.size();
        std::vector<double> r(n, 0.0);
        r[0] = std::log(a.c_[0]);
        for (std::size_t k = 1; k < n; ++k) {
            double s = a.c_[k];
            for (std::size_t j = 1; j < k; ++j) s -= static_cast<double>(j) * r[j] * a.c_[k - j] / static_cast<double>(k);
            r[k] = s / a.c_[0];
        }
        return Jet(std::move(r));
    }

    // a^p for a positive constant term.
    friend Jet pow(const Jet& a, double p) {
        if (a.c_[0] <= 0.0) throw std::domain_error("Jet pow of a non-positive value");
        const std::size_t n = a.size();
        std::vector<double> r(n, 0.0);
        r[0] = std::pow(a.c_[0], p);
        for (std::size_t k = 1; k < n; ++k) {
            double s = 0.0;
            for (std::size_t j = 1; j <= k; ++j)
                s += (p * static_cast<double>(j) - static_cast<double>(k - j)) * a.c_[j] * r[k - j];
            r[k] = s / (static_cast<double>(k) * a.c_[0]);
        }
        return Jet(std::move(r));
    }

    friend Jet sqrt(const Jet& a) { return pow(a, 0.5); }

private:
    void grow(std::size_t n) {
        if (c_.size() < n) c_.resize(n, 0.0);
    }

    std::vector<double> c_;
};

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

}  // namespace semiclassical
