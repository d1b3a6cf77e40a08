#pragma once

#include <string>
#include <vector>

#include "taskui/core/error.hpp"

namespace taskui {

struct ValidationIssue {
    std::string path;
    std::string rule;
    std::string message;
    std::string instance;  // data violations only

    bool operator==(const ValidationIssue&) const = default;
};

// Violations are data, not failures: validators never throw for an invalid input.
class ValidationReport {
public:
    void add(std::string path, std::string rule, std::string message, std::string instance = {}) {
        issues_.push_back({std::move(path), std::move(rule), std::move(message), std::move(instance)});
    }
    void merge(const ValidationReport& other) { issues_.insert(issues_.end(), other.issues_.begin(), other.issues_.end()); }

    bool ok() const { return issues_.empty(); }
    std::size_t size() const { return issues_.size(); }
    bool has(std::string_view rule) const;
    std::size_t count(std::string_view rule) const;
    const std::vector<ValidationIssue>& issues() const { return issues_; }

    Json to_json() const;

private:
    std::vector<ValidationIssue> issues_;
};

}  // namespace taskui
