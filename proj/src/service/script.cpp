#include "taskui/service/script.hpp"

namespace taskui {

ScriptResult run_script(const Json& script, Gateway& gateway) {
    if (!script.is_object() || !script.contains("steps") || !script["steps"].is_array())
        throw Error("script-syntax", "script needs a 'steps' array");
    ScriptResult r;
    r.workspace.id = script.value("session", std::string("replay"));
    Controller controller(gateway, fixed_clock(script.value("clock", std::string("2026-01-01T00:00:00Z"))));
    std::size_t index = 0;
    for (const auto& step : script["steps"]) {
        Outcome o;
        try {
            if (step.contains("prompt")) o = controller.prompt(r.workspace, step["prompt"].get<std::string>());
            else if (step.contains("event")) o = controller.event(r.workspace, event_from_json(step["event"]));
            else if (step.contains("restore")) o = controller.restore(r.workspace, step["restore"].get<std::string>());
            else throw Error("script-syntax", "step " + std::to_string(index) + " needs 'prompt', 'event' or 'restore'");
        } catch (const Error& e) {
            if (e.code() == "script-syntax") throw;
            o.ok = false;
            o.error = e;
            o.message = e.what();
        }
        Json rec = {{"index", index}, {"ok", o.ok}, {"message", o.message},
                    {"checkpoint", o.checkpoint ? Json(*o.checkpoint) : Json(nullptr)}};
        if (o.error) rec["error"] = o.error->to_json();
        r.steps.push_back(rec);
        r.events.insert(r.events.end(), o.events.begin(), o.events.end());
        r.ok = r.ok && o.ok;
        ++index;
    }
    r.document = r.workspace.started ? compile_session(r.workspace.session) : UIDocument{};
    return r;
}

}  // namespace taskui
