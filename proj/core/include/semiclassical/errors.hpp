#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace semiclassical {

// Base of every engine error. kind() is the stable machine-readable tag that
// the CLI reports on stderr; details() carries structured context.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message, nlohmann::json details = nlohmann::json::object());

    const std::string& kind() const noexcept { return kind_; }
    const nlohmann::json& details() const noexcept { return details_; }
    nlohmann::json to_json() const;

private:
    std::string kind_;
    nlohmann::json details_;
};

#define SEMICLASSICAL_DECLARE_ERROR(Name)                                                  \
    class Name : public Error {                                                            \
    public:                                                                                \
        explicit Name(const std::string& message, nlohmann::json details = nlohmann::json::object()) \
            : Error(#Name, message, std::move(details)) {}                                 \
    }

SEMICLASSICAL_DECLARE_ERROR(DimensionMismatch);
SEMICLASSICAL_DECLARE_ERROR(AxisOutOfRange);
SEMICLASSICAL_DECLARE_ERROR(DegreeOutOfRange);
SEMICLASSICAL_DECLARE_ERROR(ParseError);
SEMICLASSICAL_DECLARE_ERROR(InvalidModel);
SEMICLASSICAL_DECLARE_ERROR(BadTruncation);
SEMICLASSICAL_DECLARE_ERROR(ResonantDivisor);
SEMICLASSICAL_DECLARE_ERROR(TruncationTooSmall);
SEMICLASSICAL_DECLARE_ERROR(DegenerateEigenvalue);
SEMICLASSICAL_DECLARE_ERROR(IndexOutOfRange);
SEMICLASSICAL_DECLARE_ERROR(UnsupportedKappa);
SEMICLASSICAL_DECLARE_ERROR(UnsupportedOrder);
SEMICLASSICAL_DECLARE_ERROR(DomainExceeded);
SEMICLASSICAL_DECLARE_ERROR(NoConvergence);
SEMICLASSICAL_DECLARE_ERROR(HypothesisViolation);
SEMICLASSICAL_DECLARE_ERROR(GradientProviderFailure);
SEMICLASSICAL_DECLARE_ERROR(OrderTooHigh);
SEMICLASSICAL_DECLARE_ERROR(PoleOnRay);
SEMICLASSICAL_DECLARE_ERROR(InsufficientCoefficients);
SEMICLASSICAL_DECLARE_ERROR(DegenerateApproximant);
SEMICLASSICAL_DECLARE_ERROR(NotConverged);

#undef SEMICLASSICAL_DECLARE_ERROR

}  // namespace semiclassical
