#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace taskui {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Every failure surfaced by the engine carries a stable, kebab-case code
// (e.g. "type-mismatch", "cycle-detected") plus optional structured detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, Json detail = Json::object())
        : std::runtime_error(message), code_(std::move(code)), detail_(std::move(detail)) {}

    const std::string& code() const noexcept { return code_; }
    const Json& detail() const noexcept { return detail_; }

    Json to_json() const {
        Json j = {{"code", code_}, {"message", what()}};
        if (!detail_.empty()) j["detail"] = detail_;
        return j;
    }

private:
    std::string code_;
    Json detail_;
};

}  // namespace taskui
