#include "semiclassical/model.hpp"

#include "semiclassical/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>

namespace semiclassical {

void OscillatorModel::validate() const {
    if (omega.empty()) throw InvalidModel("model needs at least one frequency");
    if (mass.sign() <= 0) throw InvalidModel("mass must be positive", {{"mass", mass.str()}});
    for (std::size_t i = 0; i < omega.size(); ++i)
        if (omega[i].sign() <= 0) throw InvalidModel("frequencies must be positive", {{"axis", i}, {"omega", omega[i].str()}});
    if (anharmonic.dim() != omega.size())
        throw DimensionMismatch("anharmonic part has dimension " + std::to_string(anharmonic.dim()) + ", model has " +
                                std::to_string(omega.size()));
    if (anharmonic.valuation() >= 0 && anharmonic.valuation() < 3)
        throw InvalidModel("anharmonic part must start at degree 3", {{"valuation", anharmonic.valuation()}});
}

PolySeries OscillatorModel::potential(int truncation) const {
    PolySeries v = anharmonic.retruncated(truncation);
    for (std::size_t i = 0; i < dim(); ++i) {
        MultiIndex k(dim());
        k.set(i, 2);
        v.add_term(k, mass * omega[i] * omega[i] / Rational(2));
    }
    return v;
}

Rational OscillatorModel::omega_min() const { return *std::min_element(omega.begin(), omega.end()); }

OscillatorModel make_model(const Rational& mass, std::vector<Rational> omega, PolySeries anharmonic) {
    OscillatorModel m{mass, std::move(omega), std::move(anharmonic)};
    m.validate();
    return m;
}

OscillatorModel kappa_model(int kappa, const Rational& mass, const Rational& omega, const Rational& g) {
    if (kappa < 2) throw UnsupportedKappa("kappa must be at least 2", {{"kappa", kappa}});
    PolySeries a(1, 2 * kappa);
    a.add_term(MultiIndex{static_cast<unsigned>(2 * kappa)}, g);
    return make_model(mass, {omega}, std::move(a));
}

OscillatorModel harmonic_model(const Rational& mass, std::vector<Rational> omega) {
    const std::size_t n = omega.size();
    return make_model(mass, std::move(omega), PolySeries(n, 0));
}

std::optional<OscillatorModel> builtin_model(const std::string& name) {
    if (name == "quartic") return kappa_model(2, 1, 1, 1);
    if (name == "sectic") return kappa_model(3, 1, 1, 1);
    if (name == "octic") return kappa_model(4, 1, 1, 1);
    if (name == "dectic") return kappa_model(5, 1, 1, 1);
    return std::nullopt;
}

OscillatorModel load_model(const std::string& path_or_alias) {
    if (auto m = builtin_model(path_or_alias)) return *m;
    std::ifstream in(path_or_alias);
    if (!in) throw ParseError("cannot open model file '" + path_or_alias + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model file '" + path_or_alias + "' is not valid JSON: " + e.what());
    }
    return model_from_json(j);
}

nlohmann::json model_to_json(const OscillatorModel& model) {
    nlohmann::json omega = nlohmann::json::array();
    for (const auto& w : model.omega) omega.push_back(w.str());
    nlohmann::json a = series_to_json(model.anharmonic);
    return {{"dim", model.dim()}, {"mass", model.mass.str()}, {"omega", omega}, {"A", a}};
}

OscillatorModel model_from_json(const nlohmann::json& j) {
    try {
        auto rational = [](const nlohmann::json& v) {
            return v.is_string() ? Rational::parse(v.get<std::string>()) : Rational(v.get<long>());
        };
        std::vector<Rational> omega;
        for (const auto& w : j.at("omega")) omega.push_back(rational(w));
        const int dim = j.contains("dim") ? j.at("dim").get<int>() : static_cast<int>(omega.size());
        if (dim != static_cast<int>(omega.size()))
            throw DimensionMismatch("\"dim\" does not match the number of frequencies");
        const Rational mass = j.contains("mass") ? rational(j.at("mass")) : Rational(1);
        PolySeries a = j.contains("A") ? series_from_json(j.at("A"), dim, -1) : PolySeries(static_cast<std::size_t>(dim), 0);
        return make_model(mass, std::move(omega), std::move(a));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model JSON: ") + e.what());
    }
}

std::optional<std::vector<int>> find_frequency_resonance(const std::vector<Rational>& omega, int max_l1) {
    const std::size_t n = omega.size();
    std::vector<int> l(n, 0);
    std::optional<std::vector<int>> found;
    // Depth-first over integer vectors with |l|_1 <= budget; first nonzero entry positive.
    std::function<bool(std::size_t, int, Rational, bool)> search = [&](std::size_t i, int budget, Rational sum, bool leading) {
        if (i == n) {
            if (!leading && sum.is_zero()) {
                found = l;
                return true;
            }
            return false;
        }
        for (int v = leading ? 0 : -budget; v <= budget; ++v) {
            l[i] = v;
            if (search(i + 1, budget - std::abs(v), sum + omega[i] * Rational(v), leading && v == 0)) return true;
        }
        l[i] = 0;
        return false;
    };
    for (int total = 1; total <= max_l1; ++total)
        if (search(0, total, Rational(0), true)) return found;
    return std::nullopt;
}

NumericPotential::NumericPotential(const OscillatorModel& model)
    : dim_(model.dim()), mass_(model.mass.to_double()) {
    for (const auto& w : model.omega) omega_.push_back(w.to_double());
    for (const auto& [k, c] : model.anharmonic.terms()) {
        terms_.push_back({c.to_double(), k.exponents()});
        for (unsigned e : k.exponents()) max_power_ = std::max(max_power_, e);
    }
}

namespace {

double ipow(double x, unsigned p) {
    double r = 1.0;
    for (unsigned i = 0; i < p; ++i) r *= x;
    return r;
}

}  // namespace

double NumericPotential::anharmonic(const double* x) const {
    double a = 0.0;
    for (const auto& t : terms_) {
        double m = t.c;
        for (std::size_t i = 0; i < dim_; ++i) m *= ipow(x[i], t.k[i]);
        a += m;
    }
    return a;
}

double NumericPotential::value(const double* x) const {
    double v = anharmonic(x);
    for (std::size_t i = 0; i < dim_; ++i) v += 0.5 * mass_ * omega_[i] * omega_[i] * x[i] * x[i];
    return v;
}

void NumericPotential::gradient(const double* x, double* out) const {
    for (std::size_t i = 0; i < dim_; ++i) out[i] = mass_ * omega_[i] * omega_[i] * x[i];
    for (const auto& t : terms_) {
        for (std::size_t a = 0; a < dim_; ++a) {
            if (t.k[a] == 0) continue;
            double m = t.c * t.k[a];
            for (std::size_t i = 0; i < dim_; ++i) m *= ipow(x[i], i == a ? t.k[i] - 1 : t.k[i]);
            out[a] += m;
        }
    }
}

void NumericPotential::hessian(const double* x, double* out) const {
    std::fill(out, out + dim_ * dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) out[i * dim_ + i] = mass_ * omega_[i] * omega_[i];
    for (const auto& t : terms_) {
        for (std::size_t a = 0; a < dim_; ++a) {
            for (std::size_t b = a; b < dim_; ++b) {
                std::vector<unsigned> e = t.k;
                double m = t.c;
                if (e[a] == 0) continue;
                m *= e[a];
                --e[a];
                if (e[b] == 0) continue;
                m *= e[b];
                --e[b];
                for (std::size_t i = 0; i < dim_; ++i) m *= ipow(x[i], e[i]);
                out[a * dim_ + b] += m;
                if (a != b) out[b * dim_ + a] += m;
            }
        }
    }
}

}  // namespace semiclassical
