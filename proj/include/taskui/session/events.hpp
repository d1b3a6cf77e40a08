#pragma once

#include <optional>
#include <string>

#include "taskui/session/updater.hpp"

namespace taskui {

// Gesture from the frontend. `type` is one of
//   edit-value, delete-attribute, add-generate-item, add-empty-item,
//   autocomplete-item, delete-item, switch-representation, sort-column
struct DirectManipulationEvent {
    std::string type;
    std::string path;            // attribute, array or instance path
    Json value;                  // edit-value
    std::string entity;          // switch-representation, sort-column
    std::string representation;  // switch-representation
    std::string field;           // sort-column
    std::string direction = "asc";
    Json values = Json::object();  // autocomplete-item partial
    std::string preference;        // add-generate-item, autocomplete-item
};

Json to_json(const DirectManipulationEvent& e);
// Errors: unsupported-event.
DirectManipulationEvent event_from_json(const Json& j);

struct RepresentationChange {
    std::string entity;
    std::string representation;
    bool operator==(const RepresentationChange&) const = default;
};

struct Command {
    std::optional<Updater> updater;
    std::optional<RepresentationChange> representation;

    std::string describe() const;
};

// Errors: unsupported-event, not-editable, unknown-target.
Command translate_event(const Session& s, const DirectManipulationEvent& e);

// Errors: representation-unsupported, unknown-entity.
Session apply_representation(const Session& s, const RepresentationChange& r);

}  // namespace taskui
