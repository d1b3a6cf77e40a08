#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "taskui/llm/gateway.hpp"
#include "taskui/session/events.hpp"
#include "taskui/session/history.hpp"

namespace taskui {

struct Workspace {
    std::string id;
    Session session;
    History history;
    bool started = false;  // false until the first prompt produced a model

    bool operator==(const Workspace&) const = default;
};

Json to_json(const Workspace& w);
Workspace workspace_from_json(const Json& j);

// Server-to-client stream events, each a JSON object with a `type` of
// ui-delta, violation, checkpoint-added or provider-status.
Json ui_delta_event(const std::string& session, const UIDelta& d, const std::optional<std::string>& checkpoint);
Json violation_event(const std::string& session, const Error& e);
Json checkpoint_event(const std::string& session, const Checkpoint& c);
Json provider_status_event(const std::string& session, const std::string& status, const std::string& message,
                           const Json& detail = Json::object());

struct Outcome {
    std::optional<std::string> checkpoint;
    UIDocument document;
    UIDelta delta;
    std::string message;
    std::vector<Json> events;  // in emission order
    bool ok = true;
    std::optional<Error> error;
};

using Clock = std::function<std::string()>;
// ISO-8601 UTC, second resolution.
std::string utc_now();
// 2026-01-01T00:00:00Z, then one second later per call.
Clock fixed_clock(std::string start = "2026-01-01T00:00:00Z");

// Prompt and event handling over one workspace. Failures leave the workspace
// as it was and come back as an Outcome with ok = false and a failure event.
class Controller {
public:
    Controller(Gateway& gateway, Clock clock) : gateway_(gateway), clock_(std::move(clock)) {}

    Outcome prompt(Workspace& w, const std::string& text);
    Outcome event(Workspace& w, const DirectManipulationEvent& e);
    Outcome restore(Workspace& w, const std::string& checkpoint);

private:
    Outcome commit(Workspace& w, Session next, const std::string& label, Origin origin, Json updaters);

    Gateway& gateway_;
    Clock clock_;
};

}  // namespace taskui
