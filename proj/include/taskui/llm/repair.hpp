#pragma once

#include <string>
#include <vector>

#include "taskui/core/error.hpp"

namespace taskui {

struct RepairOutcome {
    Json value;
    std::string text;                // the text that parsed
    std::vector<std::string> steps;  // repairs applied, empty for clean input
};

// Direct parse, then code-fence and surrounding-prose stripping, then
// trailing-comma removal and bracket balancing. `expect` is "object",
// "array" or "any".
// Errors: irreparable-response (detail.attempts lists each diagnostic).
RepairOutcome repair_json(const std::string& raw, const std::string& expect = "any");

}  // namespace taskui
