#include "semiclassical/series.hpp"

#include "semiclassical/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace semiclassical {

MultiIndex::MultiIndex(std::vector<unsigned> exponents)
    : e_(std::move(exponents)), degree_(std::accumulate(e_.begin(), e_.end(), 0u)) {}

MultiIndex MultiIndex::unit(std::size_t n, std::size_t axis) {
    if (axis >= n) throw AxisOutOfRange("axis " + std::to_string(axis) + " out of range for dimension " + std::to_string(n));
    MultiIndex k(n);
    k.set(axis, 1);
    return k;
}

void MultiIndex::set(std::size_t i, unsigned value) {
    degree_ = degree_ - e_.at(i) + value;
    e_[i] = value;
}

MultiIndex MultiIndex::lowered(std::size_t i) const {
    MultiIndex k = *this;
    k.set(i, e_.at(i) - 1);
    return k;
}

MultiIndex MultiIndex::raised(std::size_t i) const {
    MultiIndex k = *this;
    k.set(i, e_.at(i) + 1);
    return k;
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size()) throw DimensionMismatch("multi-index length mismatch");
    MultiIndex k = a;
    for (std::size_t i = 0; i < a.size(); ++i) k.e_[i] += b.e_[i];
    k.degree_ = a.degree_ + b.degree_;
    return k;
}

namespace {

void require_same_dim(const PolySeries& a, const PolySeries& b) {
    if (a.dim() != b.dim())
        throw DimensionMismatch("series dimensions differ: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()),
                                {{"left", a.dim()}, {"right", b.dim()}});
}

void prune(PolySeries::Terms& terms) {
    std::erase_if(terms, [](const auto& kv) { return kv.second.is_zero(); });
}

}  // namespace

PolySeries::PolySeries(std::size_t dim, int truncation) : dim_(dim), trunc_(std::max(truncation, -1)) {}

PolySeries PolySeries::constant(std::size_t dim, int truncation, const Rational& c) {
    PolySeries s(dim, truncation);
    s.add_term(MultiIndex(dim), c);
    return s;
}

PolySeries PolySeries::variable(std::size_t dim, int truncation, std::size_t axis) {
    PolySeries s(dim, truncation);
    s.add_term(MultiIndex::unit(dim, axis), Rational(1));
    return s;
}

PolySeries PolySeries::monomial(const MultiIndex& k, int truncation, const Rational& c) {
    PolySeries s(k.size(), truncation);
    s.add_term(k, c);
    return s;
}

Rational PolySeries::coefficient(const MultiIndex& k) const {
    if (k.size() != dim_) throw DimensionMismatch("multi-index length does not match series dimension");
    const auto it = terms_.find(k);
    return it == terms_.end() ? Rational(0) : it->second;
}

void PolySeries::set(const MultiIndex& k, const Rational& c) {
    if (k.size() != dim_) throw DimensionMismatch("multi-index length does not match series dimension");
    if (static_cast<int>(k.degree()) > trunc_)
        throw DegreeOutOfRange("term of degree " + std::to_string(k.degree()) + " exceeds truncation " + std::to_string(trunc_));
    if (c.is_zero()) terms_.erase(k);
    else terms_[k] = c;
}

void PolySeries::add_term(const MultiIndex& k, const Rational& c) {
    if (k.size() != dim_) throw DimensionMismatch("multi-index length does not match series dimension");
    if (static_cast<int>(k.degree()) > trunc_ || c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

std::pair<PolySeries::const_iterator, PolySeries::const_iterator> PolySeries::degree_range(unsigned d) const {
    if (dim_ == 0) return {terms_.end(), terms_.end()};
    MultiIndex first(dim_);
    first.set(0, d);
    MultiIndex next(dim_);
    next.set(0, d + 1);
    return {terms_.lower_bound(first), terms_.lower_bound(next)};
}

int PolySeries::max_degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.rbegin()->first.degree()); }

int PolySeries::valuation() const { return terms_.empty() ? -1 : static_cast<int>(terms_.begin()->first.degree()); }

PolySeries PolySeries::retruncated(int truncation) const {
    PolySeries r(dim_, truncation);
    for (const auto& [k, c] : terms_) {
        if (static_cast<int>(k.degree()) > r.trunc_) break;
        r.terms_.emplace_hint(r.terms_.end(), k, c);
    }
    return r;
}

PolySeries PolySeries::scaled(const Rational& s) const {
    PolySeries r(dim_, trunc_);
    if (s.is_zero()) return r;
    for (const auto& [k, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), k, c * s);
    return r;
}

double PolySeries::evaluate(std::span<const double> x) const {
    if (x.size() != dim_) throw DimensionMismatch("evaluation point has wrong dimension");
    double sum = 0.0;
    for (const auto& [k, c] : terms_) {
        double m = c.to_double();
        for (std::size_t i = 0; i < dim_; ++i)
            for (unsigned p = 0; p < k[i]; ++p) m *= x[i];
        sum += m;
    }
    return sum;
}

Rational PolySeries::evaluate(std::span<const Rational> x) const {
    if (x.size() != dim_) throw DimensionMismatch("evaluation point has wrong dimension");
    Rational sum;
    for (const auto& [k, c] : terms_) {
        Rational m = c;
        for (std::size_t i = 0; i < dim_; ++i)
            if (k[i] > 0) m *= pow(x[i], static_cast<int>(k[i]));
        sum += m;
    }
    return sum;
}

PolySeries add(const PolySeries& a, const PolySeries& b) {
    require_same_dim(a, b);
    PolySeries r = a.retruncated(std::min(a.truncation(), b.truncation()));
    for (const auto& [k, c] : b.terms()) {
        if (static_cast<int>(k.degree()) > r.truncation()) break;
        r.add_term(k, c);
    }
    return r;
}

PolySeries subtract(const PolySeries& a, const PolySeries& b) {
    require_same_dim(a, b);
    PolySeries r = a.retruncated(std::min(a.truncation(), b.truncation()));
    for (const auto& [k, c] : b.terms()) {
        if (static_cast<int>(k.degree()) > r.truncation()) break;
        r.add_term(k, -c);
    }
    return r;
}

PolySeries mul_truncated(const PolySeries& a, const PolySeries& b) {
    require_same_dim(a, b);
    return mul_truncated(a, b, std::min(a.truncation(), b.truncation()));
}

PolySeries mul_truncated(const PolySeries& a, const PolySeries& b, int truncation) {
    require_same_dim(a, b);
    PolySeries::Terms acc;
    const unsigned limit = truncation < 0 ? 0 : static_cast<unsigned>(truncation);
    if (truncation >= 0) {
        mpq_class prod;
        for (const auto& [ka, ca] : a.terms()) {
            if (ka.degree() > limit) break;
            for (const auto& [kb, cb] : b.terms()) {
                if (ka.degree() + kb.degree() > limit) break;
                mpq_mul(prod.get_mpq_t(), ca.raw().get_mpq_t(), cb.raw().get_mpq_t());
                auto [it, inserted] = acc.try_emplace(ka + kb, Rational(prod));
                if (!inserted) it->second += Rational(prod);
            }
        }
        prune(acc);
    }
    PolySeries r(a.dim(), truncation);
    for (auto& [k, c] : acc) r.add_term(k, c);
    return r;
}

PolySeries partial_derivative(const PolySeries& a, std::size_t axis) {
    if (axis >= a.dim())
        throw AxisOutOfRange("axis " + std::to_string(axis) + " out of range for dimension " + std::to_string(a.dim()),
                             {{"axis", axis}, {"dim", a.dim()}});
    PolySeries r(a.dim(), a.truncation() - 1);
    for (const auto& [k, c] : a.terms()) {
        if (k[axis] == 0) continue;
        r.add_term(k.lowered(axis), c * Rational(static_cast<long>(k[axis])));
    }
    return r;
}

PolySeries homogeneous_component(const PolySeries& a, int degree) {
    if (degree < 0 || degree > a.truncation())
        throw DegreeOutOfRange("degree " + std::to_string(degree) + " outside [0, " + std::to_string(a.truncation()) + "]");
    PolySeries r(a.dim(), a.truncation());
    const auto [lo, hi] = a.degree_range(static_cast<unsigned>(degree));
    for (auto it = lo; it != hi; ++it) r.add_term(it->first, it->second);
    return r;
}

PolySeries laplacian(const PolySeries& a) {
    PolySeries r(a.dim(), a.truncation() - 2);
    for (const auto& [k, c] : a.terms())
        for (std::size_t i = 0; i < a.dim(); ++i)
            if (k[i] >= 2)
                r.add_term(k.lowered(i).lowered(i), c * Rational(static_cast<long>(k[i]) * (static_cast<long>(k[i]) - 1)));
    return r;
}

std::vector<PolySeries> gradient(const PolySeries& a) {
    std::vector<PolySeries> g;
    g.reserve(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) g.push_back(partial_derivative(a, i));
    return g;
}

PolySeries dot(const std::vector<PolySeries>& u, const std::vector<PolySeries>& v, int truncation) {
    if (u.size() != v.size() || u.empty()) throw DimensionMismatch("vector length mismatch in dot product");
    PolySeries r(u.front().dim(), truncation);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const PolySeries p = mul_truncated(u[i], v[i], truncation);
        for (const auto& [k, c] : p.terms()) r.add_term(k, c);
    }
    return r;
}

std::string to_string(const PolySeries& a) {
    std::ostringstream os;
    auto var = [&](std::size_t i) { return a.dim() == 1 ? std::string("x") : "x" + std::to_string(i + 1); };
    bool first = true;
    for (const auto& [k, c] : a.terms()) {
        const bool neg = c.sign() < 0;
        const Rational mag = abs(c);
        if (first) os << (neg ? "-" : "");
        else os << (neg ? " - " : " + ");
        first = false;
        std::string mono;
        for (std::size_t i = 0; i < a.dim(); ++i) {
            if (k[i] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += var(i);
            if (k[i] > 1) mono += "^" + std::to_string(k[i]);
        }
        if (mono.empty()) os << mag;
        else if (mag == Rational(1)) os << mono;
        else os << mag << "*" << mono;
    }
    if (first) os << "0";
    os << " + O(|x|^" << a.truncation() + 1 << ")";
    return os.str();
}

nlohmann::json series_to_json(const PolySeries& a) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [k, c] : a.terms()) terms.push_back({{"k", k.exponents()}, {"c", c.str()}});
    return {{"dim", a.dim()}, {"trunc", a.truncation()}, {"terms", std::move(terms)}};
}

PolySeries series_from_json(const nlohmann::json& j, int default_dim, int default_trunc) {
    try {
        const int dim = j.contains("dim") ? j.at("dim").get<int>() : default_dim;
        if (dim < 1) throw ParseError("series JSON needs a positive \"dim\"");
        const auto& terms = j.at("terms");
        int trunc = default_trunc;
        if (j.contains("trunc")) {
            trunc = j.at("trunc").get<int>();
        } else if (trunc < 0) {
            for (const auto& t : terms) {
                const auto k = t.at("k").get<std::vector<unsigned>>();
                trunc = std::max(trunc, static_cast<int>(std::accumulate(k.begin(), k.end(), 0u)));
            }
        }
        PolySeries s(static_cast<std::size_t>(dim), trunc);
        for (const auto& t : terms) {
            MultiIndex k(t.at("k").get<std::vector<unsigned>>());
            if (k.size() != static_cast<std::size_t>(dim))
                throw DimensionMismatch("term exponent list has length " + std::to_string(k.size()) + ", expected " + std::to_string(dim));
            if (static_cast<int>(k.degree()) > trunc)
                throw DegreeOutOfRange("term degree " + std::to_string(k.degree()) + " exceeds truncation " + std::to_string(trunc));
            const auto& c = t.at("c");
            const Rational value = c.is_string() ? Rational::parse(c.get<std::string>()) : Rational(c.get<long>());
            s.add_term(k, value);
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed series JSON: ") + e.what());
    }
}

}  // namespace semiclassical
