#pragma once

#include "semiclassical/rational.hpp"
#include "semiclassical/series.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace semiclassical {

// V(x) = 1/2 m sum_i omega_i^2 x_i^2 + A(x), with A starting at degree 3.
struct OscillatorModel {
    Rational mass{1};
    std::vector<Rational> omega;
    PolySeries anharmonic;

    std::size_t dim() const { return omega.size(); }
    // Throws InvalidModel when an invariant is broken.
    void validate() const;
    // Exact V as a series truncated at `truncation`.
    PolySeries potential(int truncation) const;
    Rational omega_min() const;
    bool is_harmonic() const { return anharmonic.is_zero(); }
};

OscillatorModel make_model(const Rational& mass, std::vector<Rational> omega, PolySeries anharmonic);
// 1D V = 1/2 m omega^2 x^2 + g x^(2 kappa).
OscillatorModel kappa_model(int kappa, const Rational& mass, const Rational& omega, const Rational& g);
OscillatorModel harmonic_model(const Rational& mass, std::vector<Rational> omega);

// quartic, sectic, octic, dectic (m = omega = g = 1).
std::optional<OscillatorModel> builtin_model(const std::string& name);
// Path to a JSON model file or a builtin alias.
OscillatorModel load_model(const std::string& path_or_alias);

nlohmann::json model_to_json(const OscillatorModel& model);
OscillatorModel model_from_json(const nlohmann::json& j);

// Smallest nonzero integer vector l with |l|_1 <= max_l1 and sum_i l_i omega_i = 0.
std::optional<std::vector<int>> find_frequency_resonance(const std::vector<Rational>& omega, int max_l1);

// Double-precision evaluation of V, grad V and Hess V.
class NumericPotential {
public:
    explicit NumericPotential(const OscillatorModel& model);

    std::size_t dim() const { return dim_; }
    double mass() const { return mass_; }
    const std::vector<double>& omega() const { return omega_; }

    double anharmonic(const double* x) const;
    double value(const double* x) const;
    void gradient(const double* x, double* out) const;
    // Row-major dim x dim.
    void hessian(const double* x, double* out) const;

private:
    struct Term {
        double c;
        std::vector<unsigned> k;
    };
    std::size_t dim_;
    double mass_;
    std::vector<double> omega_;
    std::vector<Term> terms_;
    unsigned max_power_ = 0;
};

}  // namespace semiclassical
