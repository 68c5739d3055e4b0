#include "semiclassical/errors.hpp"

namespace semiclassical {

Error::Error(std::string kind, const std::string& message, nlohmann::json details)
    : std::runtime_error(message), kind_(std::move(kind)), details_(std::move(details)) {}

nlohmann::json Error::to_json() const {
    nlohmann::json j;
    j["error"] = kind_;
    j["message"] = what();
    if (!details_.empty()) j["details"] = details_;
    return j;
}

}  // namespace semiclassical
