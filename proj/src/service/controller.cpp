#include "taskui/service/controller.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <memory>

namespace taskui {

namespace {

std::string iso(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::time_t parse_iso(const std::string& s) {
    std::tm tm{};
    if (!strptime(s.c_str(), "%Y-%m-%dT%H:%M:%SZ", &tm)) throw Error("clock-syntax", "bad timestamp '" + s + "'");
    return timegm(&tm);
}

UIDocument document_of(const Workspace& w) { return w.started ? compile_session(w.session) : UIDocument{}; }

Outcome failure(const std::string& session, const Error& e, bool violation) {
    Outcome o;
    o.ok = false;
    o.error = e;
    o.message = e.what();
    o.events.push_back(violation ? violation_event(session, e)
                                 : provider_status_event(session, "failed", e.what(), e.to_json()));
    return o;
}

}  // namespace

Json to_json(const Workspace& w) {
    return {{"id", w.id}, {"started", w.started}, {"session", to_json(w.session)}, {"history", to_json(w.history)}};
}

Workspace workspace_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("id") || !j.contains("session"))
        throw Error("session-syntax", "workspace needs 'id' and 'session'");
    Workspace w;
    w.id = j["id"].get<std::string>();
    w.started = j.value("started", false);
    w.session = session_from_json(j["session"]);
    if (j.contains("history")) w.history = history_from_json(j["history"]);
    return w;
}

Json ui_delta_event(const std::string& session, const UIDelta& d, const std::optional<std::string>& checkpoint) {
    return {{"type", "ui-delta"}, {"session", session}, {"delta", to_json(d)},
            {"checkpoint", checkpoint ? Json(*checkpoint) : Json(nullptr)}};
}

Json violation_event(const std::string& session, const Error& e) {
    Json detail = e.detail();
    return {{"type", "violation"},
            {"session", session},
            {"code", e.code()},
            {"message", e.what()},
            {"violations", detail.value("violations", Json::array())},
            {"issues", detail.value("issues", Json::array())}};
}

Json checkpoint_event(const std::string& session, const Checkpoint& c) {
    return {{"type", "checkpoint-added"},
            {"session", session},
            {"checkpoint", {{"id", c.id}, {"label", c.label}, {"origin", to_string(c.origin)}, {"timestamp", c.timestamp}}}};
}

Json provider_status_event(const std::string& session, const std::string& status, const std::string& message,
                           const Json& detail) {
    Json j = {{"type", "provider-status"}, {"session", session}, {"status", status}, {"message", message}};
    if (!detail.empty()) j["detail"] = detail;
    return j;
}

std::string utc_now() { return iso(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())); }

Clock fixed_clock(std::string start) {
    auto next = std::make_shared<std::atomic<std::time_t>>(parse_iso(start));
    return [next] { return iso(next->fetch_add(1)); };
}

Outcome Controller::commit(Workspace& w, Session next, const std::string& label, Origin origin, Json updaters) {
    Outcome o;
    UIDocument before = document_of(w);
    Workspace after = w;
    after.session = std::move(next);
    after.started = true;
    auto [h, id] = checkpoint(w.history, after.session, label, origin, clock_(), std::move(updaters));
    after.history = std::move(h);
    o.document = compile_session(after.session);
    o.delta = diff_ui(before, o.document);
    o.checkpoint = id;
    o.events.push_back(checkpoint_event(w.id, *after.history.find(id)));
    if (!o.delta.empty()) o.events.push_back(ui_delta_event(w.id, o.delta, id));
    w = std::move(after);
    return o;
}

Outcome Controller::prompt(Workspace& w, const std::string& text) {
    try {
        if (!w.started) {
            auto model = gateway_.generate_model(text);
            auto o = commit(w, to_session(model, text), text, Origin::UserPrompt, Json::array());
            o.message = model.notes.empty() ? "Model generated." : "Model generated with repairs.";
            return o;
        }
        auto follow = gateway_.parse_followup(text, w.session);
        if (follow.no_op) {
            Outcome o;
            o.document = compile_session(w.session);
            o.message = follow.message;
            o.events.push_back(provider_status_event(w.id, "no-op", follow.message));
            return o;
        }
        ApplyOptions opts{{}, gateway_.nl_executor(w.session.schema), &gateway_.nl_cache()};
        auto applied = apply_batch(w.session, follow.updaters, opts);
        applied.session.prompts.push_back(text);
        auto o = commit(w, std::move(applied.session), text, Origin::UserPrompt, to_json(follow.updaters));
        o.message = follow.message;
        return o;
    } catch (const Error& e) {
        return failure(w.id, e, e.code() == "validation-rejection");
    }
}

Outcome Controller::event(Workspace& w, const DirectManipulationEvent& e) {
    if (!w.started) throw Error("no-model", "the workspace has no model yet; send a prompt first");
    Command cmd = translate_event(w.session, e);  // unsupported-event, not-editable, unknown-target propagate
    try {
        if (cmd.representation) {
            auto next = apply_representation(w.session, *cmd.representation);
            return commit(w, std::move(next), cmd.describe(), Origin::Action,
                          Json::array({{{"event", to_json(e)}}}));
        }
        auto resolved = gateway_.resolve_pending(w.session, {*cmd.updater});
        ApplyOptions opts{{}, gateway_.nl_executor(w.session.schema), &gateway_.nl_cache()};
        auto applied = apply_batch(w.session, resolved, opts);
        return commit(w, std::move(applied.session), cmd.describe(), Origin::Action, to_json(resolved));
    } catch (const Error& err) {
        if (err.code() == "validation-rejection") return failure(w.id, err, true);
        if (err.code() == "provider-unavailable" || err.code() == "irreparable-response" || err.code() == "fixture-miss")
            return failure(w.id, err, false);
        throw;
    }
}

Outcome Controller::restore(Workspace& w, const std::string& id) {
    auto [h, s] = taskui::restore(w.history, id);
    Outcome o;
    UIDocument before = document_of(w);
    w.history = std::move(h);
    w.session = std::move(s);
    w.started = true;
    o.document = compile_session(w.session);
    o.delta = diff_ui(before, o.document);
    o.checkpoint = id;
    if (!o.delta.empty()) o.events.push_back(ui_delta_event(w.id, o.delta, id));
    return o;
}

}  // namespace taskui
