#include "taskui/session/events.hpp"

#include <algorithm>

#include "taskui/core/schema_ops.hpp"

namespace taskui {

namespace {

const char* const kEventTypes[] = {"edit-value",        "delete-attribute", "add-generate-item",
                                   "add-empty-item",    "autocomplete-item", "delete-item",
                                   "switch-representation", "sort-column"};

bool known_type(std::string_view t) {
    return std::any_of(std::begin(kEventTypes), std::end(kEventTypes), [&](const char* k) { return t == k; });
}

std::string text_member(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    if (!it->is_string()) throw Error("unsupported-event", std::string("'") + key + "' must be a string");
    return it->get<std::string>();
}

Path parse_target(const std::string& text) {
    if (text.empty()) throw Error("unknown-target", "event needs a path");
    try {
        return Path::parse(text);
    } catch (const Error& e) {
        throw Error("unknown-target", e.what(), {{"target", text}});
    }
}

PathResolution resolve_target(const Schema& s, const Path& p) {
    try {
        return resolve_path(s, p);
    } catch (const Error& e) {
        throw Error("unknown-target", e.what(), {{"target", p.str()}});
    }
}

}  // namespace

Json to_json(const DirectManipulationEvent& e) {
    Json j = {{"type", e.type}};
    if (!e.path.empty()) j["path"] = e.path;
    if (!e.value.is_null()) j["value"] = e.value;
    if (!e.entity.empty()) j["entity"] = e.entity;
    if (!e.representation.empty()) j["representation"] = e.representation;
    if (!e.field.empty()) j["field"] = e.field;
    if (e.type == "sort-column") j["direction"] = e.direction;
    if (!e.values.empty()) j["values"] = e.values;
    if (!e.preference.empty()) j["preference"] = e.preference;
    return j;
}

DirectManipulationEvent event_from_json(const Json& j) {
    if (!j.is_object()) throw Error("unsupported-event", "event must be an object");
    DirectManipulationEvent e;
    e.type = text_member(j, "type");
    if (!known_type(e.type)) throw Error("unsupported-event", "unknown event type '" + e.type + "'", {{"type", e.type}});
    e.path = text_member(j, "path");
    if (j.contains("value")) e.value = j["value"];
    e.entity = text_member(j, "entity");
    e.representation = text_member(j, "representation");
    e.field = text_member(j, "field");
    if (auto d = text_member(j, "direction"); !d.empty()) e.direction = d;
    if (j.contains("values")) {
        if (!j["values"].is_object()) throw Error("unsupported-event", "'values' must be an object");
        e.values = j["values"];
    }
    e.preference = text_member(j, "preference");
    return e;
}

std::string Command::describe() const {
    if (representation) return "show " + representation->entity + " as " + representation->representation;
    if (updater) return to_string(updater->action) + " " + updater->target.str();
    return "nothing";
}

Command translate_event(const Session& s, const DirectManipulationEvent& e) {
    Command c;
    if (e.type == "switch-representation") {
        if (e.entity.empty() || e.representation.empty())
            throw Error("unsupported-event", "switch-representation needs 'entity' and 'representation'");
        c.representation = RepresentationChange{e.entity, e.representation};
        return c;
    }
    if (e.type == "sort-column") {
        if (e.field.empty()) throw Error("unsupported-event", "sort-column needs 'field'");
        if (e.direction != "asc" && e.direction != "desc")
            throw Error("unsupported-event", "'direction' must be asc or desc");
        Path target = e.path.empty() ? Path(e.entity) : parse_target(e.path);
        if (target.entity().empty()) throw Error("unsupported-event", "sort-column needs 'entity' or 'path'");
        resolve_target(s.schema, target);
        c.updater = Updater{target, Action::Sort, {{"field", e.field}, {"direction", e.direction}}};
        return c;
    }
    if (!known_type(e.type)) throw Error("unsupported-event", "unknown event type '" + e.type + "'", {{"type", e.type}});

    Path target = parse_target(e.path);
    auto res = resolve_target(s.schema, target);
    if (e.type == "edit-value") {
        if (!res.attribute) throw Error("unknown-target", "edit-value needs an attribute path", {{"target", e.path}});
        const auto* a = s.annotations.find(res.entity, res.annotation_key);
        if (!a || !a->is_editable())
            throw Error("not-editable", res.entity + "." + res.annotation_key + " is not editable", {{"target", e.path}});
        c.updater = Updater{target, Action::UpdateData, {{"value", e.value}}};
    } else if (e.type == "delete-attribute") {
        if (!res.attribute || res.element) throw Error("unknown-target", "delete-attribute needs an attribute path", {{"target", e.path}});
        // Instance selectors address data; the schema change applies to the entity.
        std::vector<PathStep> steps;
        for (const auto& st : target.steps())
            if (st.kind == PathStep::Kind::Attr) steps.push_back(st);
        auto fp = res.footprint.back();
        auto dot = fp.find('.');
        Path schema_target(fp.substr(0, dot));
        for (auto i = steps.size() - (res.annotation_key.find('.') != std::string::npos ? 2 : 1); i < steps.size(); ++i)
            schema_target = schema_target.attr(steps[i].name);
        c.updater = Updater{schema_target, Action::RemoveSchema, Json::object()};
    } else if (e.type == "add-empty-item" || e.type == "add-generate-item") {
        bool array = res.attribute && !res.element && res.attribute->kind == AttrKind::Arry;
        bool entity = !res.attribute && target.steps().empty();
        if (!array && !entity) throw Error("unknown-target", e.type + " needs an array or entity path", {{"target", e.path}});
        Json spec = {{"values", Json::object()}};
        if (e.type == "add-generate-item") {
            spec["pending"] = "generate";
            if (!e.preference.empty()) spec["preference"] = e.preference;
        }
        c.updater = Updater{target, Action::AddData, spec};
    } else if (e.type == "autocomplete-item") {
        if (res.attribute || target.steps().empty())
            throw Error("unknown-target", "autocomplete-item needs an instance path", {{"target", e.path}});
        Json spec = {{"values", e.values}, {"pending", "autocomplete"}};
        if (!e.preference.empty()) spec["preference"] = e.preference;
        c.updater = Updater{target, Action::UpdateData, spec};
    } else if (e.type == "delete-item") {
        bool instance = !res.attribute && !target.steps().empty();
        if (!instance && !res.element) throw Error("unknown-target", "delete-item needs an instance or element path", {{"target", e.path}});
        c.updater = Updater{target, Action::RemoveData, Json::object()};
    }
    return c;
}

Session apply_representation(const Session& s, const RepresentationChange& r) {
    if (!s.schema.find(r.entity)) throw Error("unknown-entity", "no entity '" + r.entity + "'", {{"entity", r.entity}});
    auto valid = valid_representations(s.schema, s.annotations, r.entity);
    if (std::find(valid.begin(), valid.end(), r.representation) == valid.end())
        throw Error("representation-unsupported", r.entity + " cannot be shown as " + r.representation,
                    {{"entity", r.entity}, {"representation", r.representation}, {"valid", valid}});
    Session out = s;
    auto it = std::find_if(out.view.panels.begin(), out.view.panels.end(),
                           [&](const PanelView& p) { return p.entity == r.entity; });
    if (it == out.view.panels.end()) out.view.panels.push_back({r.entity, r.representation});
    else it->representation = r.representation;
    out.view.focus = "panel:" + r.entity;
    return out;
}

}  // namespace taskui
