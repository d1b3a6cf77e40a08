#include "taskui/session/history.hpp"

namespace taskui {

namespace {

const std::pair<Origin, const char*> kOrigins[] = {
    {Origin::UserPrompt, "user-prompt"}, {Origin::System, "system"}, {Origin::Action, "action"}};

}  // namespace

std::string to_string(Origin o) {
    for (const auto& [k, name] : kOrigins)
        if (k == o) return name;
    return "system";
}

std::optional<Origin> origin_from_string(std::string_view s) {
    for (const auto& [k, name] : kOrigins)
        if (s == name) return k;
    return std::nullopt;
}

const Checkpoint* History::find(std::string_view id) const {
    for (const auto& c : entries)
        if (c.id == id) return &c;
    return nullptr;
}

std::pair<History, std::string> checkpoint(const History& h, const Session& s, std::string label, Origin origin,
                                           std::string timestamp, Json updaters) {
    History out = h;
    std::string id = "ckpt-" + std::to_string(h.entries.size() + 1);
    out.entries.push_back({id, std::move(label), origin, std::move(timestamp), std::move(updaters), s});
    out.head = out.entries.size() - 1;
    return {std::move(out), id};
}

std::pair<History, Session> restore(const History& h, std::string_view id) {
    for (std::size_t i = 0; i < h.entries.size(); ++i) {
        if (h.entries[i].id != id) continue;
        History out = h;
        out.head = i;
        return {std::move(out), h.entries[i].snapshot};
    }
    throw Error("unknown-checkpoint", "no checkpoint '" + std::string(id) + "'", {{"checkpoint", id}});
}

Json manifest(const History& h) {
    Json entries = Json::array();
    for (const auto& c : h.entries)
        entries.push_back({{"id", c.id}, {"label", c.label}, {"origin", to_string(c.origin)}, {"timestamp", c.timestamp}});
    return {{"entries", entries}, {"head", h.empty() ? Json(nullptr) : Json(h.entries[h.head].id)}};
}

Json to_json(const History& h) {
    Json entries = Json::array();
    for (const auto& c : h.entries)
        entries.push_back({{"id", c.id},
                           {"label", c.label},
                           {"origin", to_string(c.origin)},
                           {"timestamp", c.timestamp},
                           {"updaters", c.updaters},
                           {"snapshot", to_json(c.snapshot)}});
    return {{"entries", entries}, {"head", h.head}};
}

History history_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array())
        throw Error("session-syntax", "history needs an 'entries' array");
    History h;
    for (const auto& e : j["entries"]) {
        auto origin = origin_from_string(e.value("origin", std::string("system")));
        if (!origin) throw Error("session-syntax", "unknown origin " + e["origin"].dump());
        h.entries.push_back({e.at("id").get<std::string>(), e.value("label", std::string()), *origin,
                             e.value("timestamp", std::string()), e.value("updaters", Json::array()),
                             session_from_json(e.at("snapshot"))});
    }
    h.head = j.value("head", std::size_t{0});
    if (!h.entries.empty() && h.head >= h.entries.size()) throw Error("session-syntax", "history head out of range");
    return h;
}

}  // namespace taskui
