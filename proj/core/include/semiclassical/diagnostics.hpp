#pragma once

#include "semiclassical/model.hpp"
#include "semiclassical/transport.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <vector>

namespace semiclassical {

// Global profiles of the ground corrections S_(l) for a 1D even potential with
// non-negative anharmonic coefficients, normalized so that S_(l) -> 0 as |x| -> inf
// (l >= 2; S_(1) grows logarithmically). Near the origin S_(l)' comes from the
// exact Taylor series; further out from Taylor jets of the transport recursion
//   S_(k)' = [k/2 S_(k-1)'' - 1/2 sum_j C(k,j) S_(j)' S_(k-j)' - k m E_(k-1)] / S_(0)'
// evaluated with 100 significant digits (the division by S_(0)' ~ x costs digits at every order).
class CorrectionProfiles {
public:
    // Throws InvalidModel for models outside the supported class.
    CorrectionProfiles(const OscillatorModel& model, int max_order);
    ~CorrectionProfiles();
    CorrectionProfiles(CorrectionProfiles&&) noexcept;
    CorrectionProfiles& operator=(CorrectionProfiles&&) noexcept;

    int max_order() const;
    // Below this |x| the Taylor series is used.
    double switch_radius() const;
    // S_(0)'(x) .. S_(max_order)'(x), raw hbar^k/k! convention.
    std::vector<double> derivatives(double x) const;
    // Same through the recursion only (no Taylor branch); for x >= switch_radius() / 4.
    std::vector<double> derivatives_by_recursion(double x) const;
    // Raw energy coefficients E_(0) .. E_(max_order).
    const std::vector<Rational>& energies() const;
    const GroundExpansion& expansion() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct CorrectionDiagnostic {
    int order = 0;
    double value_at_origin = 0.0;  // S_(l)(0)
    double energy = 0.0;           // E_(l)
    std::optional<double> ratio;   // -S_(l)(0) / E_(l); empty when E_(l) = 0
    // S_(l)' had one sign on every sampled x > 0, so S_(l) decays monotonically from x = 0.
    bool monotone = false;
};

struct CorrectionDiagnosticsReport {
    std::vector<CorrectionDiagnostic> orders;  // l = 2 .. max_order
    // Over the orders that have a ratio.
    bool ratios_decreasing = false;
    bool values_alternate = false;
    double switch_radius = 0.0;
    long samples = 0;
};

// Observed, not asserted: the report states whether the ratios decrease and the
// values alternate in sign.
CorrectionDiagnosticsReport correction_diagnostics(const OscillatorModel& model, int max_order);

nlohmann::json correction_diagnostics_to_json(const CorrectionDiagnosticsReport& report);

}  // namespace semiclassical
