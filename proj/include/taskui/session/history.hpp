#pragma once

#include <string>
#include <utility>
#include <vector>

#include "taskui/session/session.hpp"

namespace taskui {

enum class Origin { UserPrompt, System, Action };

std::string to_string(Origin o);
std::optional<Origin> origin_from_string(std::string_view s);

struct Checkpoint {
    std::string id;
    std::string label;
    Origin origin = Origin::System;
    std::string timestamp;           // ISO-8601, supplied by the caller
    Json updaters = Json::array();   // what produced this state
    Session snapshot;

    bool operator==(const Checkpoint&) const = default;
};

// Linear: restore moves head, later entries stay.
struct History {
    std::vector<Checkpoint> entries;
    std::size_t head = 0;

    bool empty() const { return entries.empty(); }
    const Checkpoint* find(std::string_view id) const;
    const Checkpoint* current() const { return entries.empty() ? nullptr : &entries[head]; }
    bool operator==(const History&) const = default;
};

std::pair<History, std::string> checkpoint(const History& h, const Session& s, std::string label, Origin origin,
                                           std::string timestamp, Json updaters = Json::array());
// Errors: unknown-checkpoint.
std::pair<History, Session> restore(const History& h, std::string_view id);

// [{id, label, origin, timestamp}] plus head.
Json manifest(const History& h);
Json to_json(const History& h);
History history_from_json(const Json& j);

}  // namespace taskui
