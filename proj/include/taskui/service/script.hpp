#pragma once

#include <string>
#include <vector>

#include "taskui/service/controller.hpp"

namespace taskui {

// {"session": id?, "clock": start?, "steps": [{"prompt": text} | {"event": {...}} | {"restore": id}]}
struct ScriptResult {
    Workspace workspace;
    UIDocument document;
    std::vector<Json> events;
    std::vector<Json> steps;  // per step: {index, ok, checkpoint, message, error?}
    bool ok = true;
};

// Errors: script-syntax. Step failures are recorded, not thrown.
ScriptResult run_script(const Json& script, Gateway& gateway);

}  // namespace taskui
