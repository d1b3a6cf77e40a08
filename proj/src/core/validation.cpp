#include "taskui/core/validation.hpp"

#include <algorithm>

namespace taskui {

bool ValidationReport::has(std::string_view rule) const { return count(rule) > 0; }

std::size_t ValidationReport::count(std::string_view rule) const {
    return static_cast<std::size_t>(
        std::count_if(issues_.begin(), issues_.end(), [&](const ValidationIssue& i) { return i.rule == rule; }));
}

Json ValidationReport::to_json() const {
    Json arr = Json::array();
    for (const auto& i : issues_) {
        Json j = {{"path", i.path}, {"rule", i.rule}, {"message", i.message}};
        if (!i.instance.empty()) j["instance"] = i.instance;
        arr.push_back(j);
    }
    return arr;
}

}  // namespace taskui
