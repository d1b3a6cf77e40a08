#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taskui/deps/engine.hpp"
#include "taskui/session/session.hpp"

namespace taskui {

enum class Action { AddSchema, RemoveSchema, UpdateSchema, AddData, RemoveData, UpdateData, Cluster, Filter, Sort };

std::string to_string(Action a);
std::optional<Action> action_from_string(std::string_view s);

// Specifications by action:
//   add-schema     {attributes: [{name, type, ...labels}], dependencies?: [...]}
//                  target is an entity; a missing entity is created
//   remove-schema  {} ; target ENTITY.attr or a non-root ENTITY
//   update-schema  {type?, rename?, labels?: {render, editable, ...}}
//   add-data       {values?: {...}, id?: requested id}
//                  target an array or pointer slot, or an entity
//   remove-data    {} ; target an instance, or an array element
//   update-data    {value} for one slot, or {values: {...}} on an instance
//   cluster        {field} | {groups: {label: [ids]}} | {clear: true}
//   filter         {predicate} | {clear: true}
//   sort           {field, direction: asc|desc}
// A `pending` member ("generate", "autocomplete", "cluster") marks work the
// gateway must resolve first; apply rejects it.
struct Updater {
    Path target;
    Action action = Action::UpdateData;
    Json specifications = Json::object();

    bool operator==(const Updater&) const = default;
};

Json to_json(const Updater& u);
Json to_json(const std::vector<Updater>& us);
// Errors: payload-mismatch.
Updater updater_from_json(const Json& j);
std::vector<Updater> updaters_from_json(const Json& j);

struct ApplyOptions {
    ExecutionBudget budget;
    NlExecutor nl;
    NlCache* cache = nullptr;
};

struct ApplyResult {
    Session session;
    std::vector<Path> changed;        // data paths written, propagation included
    std::vector<std::size_t> stale;   // dependency edges that could not be evaluated
    bool schema_changed = false;
    std::vector<ObjectId> created;    // instances added by the batch
};

// Shape and target check without touching the session.
// Errors: unknown-target, payload-mismatch.
void check_updater(const Session& s, const Updater& u);

// All or nothing. Errors carry detail.index of the failing updater:
// validation-rejection (detail.violations / detail.issues), unknown-target, payload-mismatch.
ApplyResult apply_batch(const Session& s, const std::vector<Updater>& batch, const ApplyOptions& opts = {});
ApplyResult apply_updater(const Session& s, const Updater& u, const ApplyOptions& opts = {});

}  // namespace taskui
