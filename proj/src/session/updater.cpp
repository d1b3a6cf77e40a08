#include "taskui/session/updater.hpp"

#include <algorithm>
#include <regex>

#include "taskui/core/combined.hpp"
#include "taskui/core/schema_ops.hpp"

namespace taskui {

namespace {

const std::pair<Action, const char*> kActions[] = {
    {Action::AddSchema, "add-schema"},   {Action::RemoveSchema, "remove-schema"}, {Action::UpdateSchema, "update-schema"},
    {Action::AddData, "add-data"},       {Action::RemoveData, "remove-data"},     {Action::UpdateData, "update-data"},
    {Action::Cluster, "cluster"},        {Action::Filter, "filter"},              {Action::Sort, "sort"},
};

[[noreturn]] void mismatch(const Updater& u, const std::string& what) {
    throw Error("payload-mismatch", to_string(u.action) + " on " + u.target.str() + ": " + what,
                {{"target", u.target.str()}, {"action", to_string(u.action)}});
}

[[noreturn]] void unknown_target(const Updater& u, const std::string& what) {
    throw Error("unknown-target", to_string(u.action) + " on " + u.target.str() + ": " + what,
                {{"target", u.target.str()}, {"action", to_string(u.action)}});
}

PathResolution resolve_target(const Schema& s, const Updater& u) {
    try {
        return resolve_path(s, u.target);
    } catch (const Error& e) {
        unknown_target(u, e.what());
    }
}

bool only_ids(const Path& p) {
    return std::all_of(p.steps().begin(), p.steps().end(),
                       [](const PathStep& st) { return st.kind == PathStep::Kind::Id; });
}

// Attribute name steps with selectors dropped: "DISH[id=DISH-1].ingredients" -> "DISH.ingredients".
std::string view_key(const Path& p) {
    std::string key = p.entity();
    for (const auto& st : p.steps())
        if (st.kind == PathStep::Kind::Attr) key += "." + st.name;
    return key;
}

AttributeDef element_def(const AttributeDef& array) {
    AttributeDef d;
    d.name = array.name;
    d.kind = array.item->kind;
    d.hint = array.item->hint;
    d.target = array.item->target;
    return d;
}

const Json* member(const Json& spec, const char* key) {
    auto it = spec.find(key);
    return it == spec.end() ? nullptr : &*it;
}

void reject_pending(const Updater& u) {
    if (u.specifications.contains("pending"))
        mismatch(u, "unresolved '" + u.specifications["pending"].dump() + "' request");
}

// Errors from value checks become payload errors; everything else passes through.
template <class F>
auto as_payload(const Updater& u, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        const auto& c = e.code();
        if (c == "type-mismatch" || c == "dangling-pointer" || c == "pointer-entity" || c == "data-syntax" ||
            c == "schema-syntax" || c == "annotation-syntax" || c == "dependency-syntax" || c == "cannot-delete-root")
            throw Error("payload-mismatch", to_string(u.action) + " on " + u.target.str() + ": " + e.what(),
                        {{"target", u.target.str()}, {"action", to_string(u.action)}, {"reason", c}});
        if (c == "unknown-path" || c == "unknown-id" || c == "unknown-entity" || c == "unknown-attribute" ||
            c == "kind-mismatch")
            throw Error("unknown-target", to_string(u.action) + " on " + u.target.str() + ": " + e.what(),
                        {{"target", u.target.str()}, {"action", to_string(u.action)}, {"reason", c}});
        throw;
    }
}

struct Work {
    Session s;
    std::vector<Path> changed;
    std::vector<ObjectId> created;
    bool schema_changed = false;
    bool deps_changed = false;
};

void note_changes(Work& w, const std::vector<Path>& paths) { w.changed.insert(w.changed.end(), paths.begin(), paths.end()); }

// Missing labels come from the rule-based defaults.
Annotation merge_labels(const Annotation& given, const Annotation& fallback) {
    Annotation a = given;
    if (!a.function) a.function = fallback.function;
    if (!a.render) a.render = fallback.render;
    if (!a.editable) a.editable = fallback.editable;
    if (a.thumbnail.empty()) a.thumbnail = fallback.thumbnail;
    if (!a.item_render) a.item_render = fallback.item_render;
    if (a.render == Render::Summary && !a.summary) a.render = fallback.render;
    return a;
}

void migrate(Work& w, const Schema& next) {
    auto delta = diff_schemas(w.s.schema, next);
    w.s.data = migrate_data(next, w.s.data, delta);
    w.s.schema = next;
    w.schema_changed = true;
}

void prune_dependencies(Work& w) {
    std::vector<Dependency> kept;
    for (const auto& d : w.s.dependencies) {
        try {
            (void)build_graph(w.s.schema, {d});
            kept.push_back(d);
        } catch (const Error& e) {
            if (e.code() == "cycle-detected") kept.push_back(d);
        }
    }
    if (kept.size() != w.s.dependencies.size()) w.deps_changed = true;
    w.s.dependencies = std::move(kept);
}

// Drops view state that names things which no longer exist.
void tidy_view(Session& s) {
    auto& v = s.view;
    std::erase_if(v.panels, [&](const PanelView& p) { return !s.schema.find(p.entity); });
    std::erase_if(v.cards, [&](const CardView& c) { return !s.data.find(c.object); });
    for (auto it = v.collections.begin(); it != v.collections.end();) {
        auto dot = it->first.find('.');
        std::string entity = it->first.substr(0, dot);
        const auto* edef = s.schema.find(entity);
        bool alive = edef && (dot == std::string::npos || edef->find(it->first.substr(dot + 1)));
        if (!alive) {
            it = v.collections.erase(it);
            continue;
        }
        for (auto& cl : it->second.clusters) std::erase_if(cl.members, [&](const ObjectId& id) { return !s.data.find(id); });
        std::erase_if(it->second.clusters, [](const Cluster& cl) { return cl.members.empty(); });
        ++it;
    }
    if (v.focus && v.focus->rfind("panel:", 0) == 0 && !v.find_panel(v.focus->substr(6))) v.focus.reset();
    if (v.focus && v.focus->rfind("card:", 0) == 0 && !s.data.find(v.focus->substr(5))) v.focus.reset();
}

// --- schema actions ---

void add_schema(Work& w, const Updater& u) {
    if (!u.target.steps().empty()) mismatch(u, "target must be an entity");
    const auto* list = member(u.specifications, "attributes");
    if (!list || !list->is_array() || list->empty()) mismatch(u, "needs a non-empty 'attributes' array");
    const std::string& entity = u.target.entity();
    if (!is_entity_name(entity)) mismatch(u, "'" + entity + "' is not an entity name");
    Schema next = w.s.schema;
    auto& attrs = next.entities[entity].attributes;
    AnnotationSet labels;
    std::vector<std::pair<AttributeDef, std::optional<std::size_t>>> added;
    for (const auto& entry : *list) {
        if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string())
            mismatch(u, "each attribute needs a 'name'");
        auto name = entry["name"].get<std::string>();
        if (std::any_of(attrs.begin(), attrs.end(), [&](const AttributeDef& a) { return a.name == name; }))
            mismatch(u, "attribute '" + name + "' already exists");
        OrderedJson body = OrderedJson::parse(entry.dump());
        body.erase("name");
        std::optional<std::size_t> pos;
        if (body.contains("position")) {
            if (!body["position"].is_number_unsigned()) mismatch(u, "'position' must be a non-negative integer");
            pos = body["position"].get<std::size_t>();
            body.erase("position");
        }
        OrderedJson doc;
        doc[entity][name] = body;
        auto spec = as_payload(u, [&] { return combined_from_json(doc); });
        auto def = spec.schema.entities.at(entity).attributes.at(0);
        for (const auto& [key, a] : spec.annotations.entities[entity]) labels.set(entity, key, a);
        attrs.push_back(def);
        added.emplace_back(def, pos);
    }
    // Positions index the final attribute list.
    for (const auto& [def, pos] : added) {
        if (!pos) continue;
        auto it = std::find_if(attrs.begin(), attrs.end(), [&](const AttributeDef& a) { return a.name == def.name; });
        AttributeDef moved = *it;
        attrs.erase(it);
        attrs.insert(attrs.begin() + static_cast<long>(std::min(*pos, attrs.size())), std::move(moved));
    }
    for (const auto& [def, _] : added) {
        AnnotationSet defaults;
        add_default_annotations(next, entity, def, defaults);
        for (const auto& [key, fallback] : defaults.entities[entity]) {
            const auto* given = labels.find(entity, key);
            w.s.annotations.set(entity, key, given ? merge_labels(*given, fallback) : fallback);
        }
    }
    if (const auto* deps = member(u.specifications, "dependencies")) {
        auto more = as_payload(u, [&] { return dependencies_from_json(*deps); });
        w.s.dependencies.insert(w.s.dependencies.end(), more.begin(), more.end());
        w.deps_changed = true;
    }
    migrate(w, next);
}

void drop_annotations(AnnotationSet& set, const std::string& entity, const std::string& attribute) {
    auto eit = set.entities.find(entity);
    if (eit == set.entities.end()) return;
    std::erase_if(eit->second, [&](const auto& kv) {
        return kv.first == attribute || kv.first.rfind(attribute + ".", 0) == 0;
    });
}

// Thumbnails pointing at a removed attribute of `entity` lose that entry.
void drop_thumbnail_field(Session& s, const std::string& entity, const std::string& attribute) {
    for (auto& [owner, edef] : s.schema.entities)
        for (const auto& a : edef.attributes) {
            std::optional<std::string> target = a.kind == AttrKind::Pntr ? a.target
                                                 : a.is_entity_array() ? a.item->target
                                                                       : std::nullopt;
            if (target != entity) continue;
            auto eit = s.annotations.entities.find(owner);
            if (eit == s.annotations.entities.end()) continue;
            auto ait = eit->second.find(a.name);
            if (ait == eit->second.end()) continue;
            std::erase(ait->second.thumbnail, attribute);
        }
}

void remove_schema(Work& w, const Updater& u) {
    const auto& entity = u.target.entity();
    if (!w.s.schema.find(entity)) unknown_target(u, "no entity '" + entity + "'");
    Schema next = w.s.schema;
    if (u.target.steps().empty()) {
        if (entity == next.root) mismatch(u, "the root entity cannot be removed");
        next.entities.erase(entity);
        w.s.annotations.entities.erase(entity);
        for (auto& [owner, edef] : next.entities) {
            std::vector<std::string> gone;
            for (const auto& a : edef.attributes)
                if ((a.kind == AttrKind::Pntr && a.target == entity) || (a.is_entity_array() && a.item->target == entity))
                    gone.push_back(a.name);
            for (const auto& g : gone) {
                std::erase_if(edef.attributes, [&](const AttributeDef& a) { return a.name == g; });
                drop_annotations(w.s.annotations, owner, g);
            }
        }
        migrate(w, next);
        prune_dependencies(w);
        return;
    }
    const auto& steps = u.target.steps();
    if (steps.size() > 2 || !std::all_of(steps.begin(), steps.end(), [](const PathStep& s) { return s.kind == PathStep::Kind::Attr; }))
        mismatch(u, "target must be ENTITY.attr or ENTITY.dict.field");
    auto& attrs = next.entities[entity].attributes;
    auto it = std::find_if(attrs.begin(), attrs.end(), [&](const AttributeDef& a) { return a.name == steps[0].name; });
    if (it == attrs.end()) unknown_target(u, "no attribute '" + steps[0].name + "'");
    if (steps.size() == 2) {
        if (it->kind != AttrKind::Dict) unknown_target(u, "'" + steps[0].name + "' has no fields");
        auto& fields = it->fields;
        auto fit = std::find_if(fields.begin(), fields.end(), [&](const AttributeDef& a) { return a.name == steps[1].name; });
        if (fit == fields.end()) unknown_target(u, "no field '" + steps[1].name + "'");
        fields.erase(fit);
        drop_annotations(w.s.annotations, entity, steps[0].name + "." + steps[1].name);
    } else {
        if (it->name == "id") mismatch(u, "the id attribute cannot be removed");
        attrs.erase(it);
        drop_annotations(w.s.annotations, entity, steps[0].name);
        drop_thumbnail_field(w.s, entity, steps[0].name);
        for (auto& [key, cv] : w.s.view.collections)
            if (cv.sort && cv.sort->field == steps[0].name) cv.sort.reset();
    }
    migrate(w, next);
    prune_dependencies(w);
}

void update_schema(Work& w, const Updater& u) {
    auto res = resolve_target(w.s.schema, u);
    if (!res.attribute || res.element || u.target.steps().size() > 2 ||
        !std::all_of(u.target.steps().begin(), u.target.steps().end(), [](const PathStep& s) { return s.kind == PathStep::Kind::Attr; }))
        mismatch(u, "target must be ENTITY.attr or ENTITY.dict.field");
    if (res.footprint.size() != 1) mismatch(u, "target must stay inside one entity");
    const auto& spec = u.specifications;
    const auto* type = member(spec, "type");
    const auto* rename = member(spec, "rename");
    const auto* labels = member(spec, "labels");
    if (!type && !rename && !labels) mismatch(u, "needs 'type', 'rename' or 'labels'");
    const std::string entity = res.entity;
    const std::string key = res.annotation_key;
    const bool field = u.target.steps().size() == 2;
    Schema next = w.s.schema;
    auto& attrs = next.entities[entity].attributes;
    auto top = std::find_if(attrs.begin(), attrs.end(), [&](const AttributeDef& a) { return a.name == u.target.steps()[0].name; });
    AttributeDef* def = &*top;
    if (field)
        def = &*std::find_if(top->fields.begin(), top->fields.end(),
                             [&](const AttributeDef& a) { return a.name == u.target.steps()[1].name; });
    bool kind_changed = false;
    if (type) {
        OrderedJson body;
        body["type"] = OrderedJson::parse(type->dump());
        if (spec.contains("item")) body["item"] = OrderedJson::parse(spec["item"].dump());
        if (spec.contains("fields")) body["fields"] = OrderedJson::parse(spec["fields"].dump());
        auto fresh = as_payload(u, [&] { return attribute_from_json(def->name, body); });
        kind_changed = !(fresh == *def);
        *def = fresh;
    }
    std::string final_key = key;
    if (rename) {
        if (!rename->is_string() || !is_attribute_name(rename->get<std::string>())) mismatch(u, "'rename' must be an attribute name");
        auto to = rename->get<std::string>();
        if (def->name == "id") mismatch(u, "the id attribute cannot be renamed");
        const auto& siblings = field ? top->fields : attrs;
        if (std::any_of(siblings.begin(), siblings.end(), [&](const AttributeDef& a) { return a.name == to; }))
            mismatch(u, "attribute '" + to + "' already exists");
        std::string from = def->name;
        def->name = to;
        final_key = field ? top->name + "." + to : to;
        // Carry values and labels across the rename by hand; a diff would see remove + add.
        if (!field) {
            for (auto& [id, inst] : w.s.data.instances) {
                if (inst.entity != entity) continue;
                auto vit = inst.values.find(from);
                if (vit == inst.values.end()) continue;
                Value v = vit->second;
                inst.values.erase(vit);
                inst.values[to] = v;
            }
        } else {
            for (auto& [id, inst] : w.s.data.instances) {
                if (inst.entity != entity) continue;
                auto vit = inst.values.find(top->name);
                if (vit == inst.values.end() || !vit->second.is_dict()) continue;
                auto d = vit->second.as_dict();
                if (auto fit = d.find(from); fit != d.end()) {
                    Value v = fit->second;
                    d.erase(fit);
                    d[to] = v;
                }
                vit->second = Value(std::move(d));
            }
        }
        if (const auto* old = w.s.annotations.find(entity, key)) {
            Annotation a = *old;
            drop_annotations(w.s.annotations, entity, key);
            w.s.annotations.set(entity, final_key, a);
        }
        if (!field) {
            drop_thumbnail_field(w.s, entity, from);
            for (auto& [k, cv] : w.s.view.collections)
                if (cv.sort && cv.sort->field == from) cv.sort->field = to;
        }
        w.s.schema = next;  // data already moved
        w.schema_changed = true;
    }
    if (kind_changed) {
        AnnotationSet defaults;
        if (!field) {
            add_default_annotations(next, entity, *def, defaults);
            drop_annotations(w.s.annotations, entity, final_key);
            for (const auto& [k, a] : defaults.entities[entity]) w.s.annotations.set(entity, k, a);
        } else {
            AttributeDef holder = *top;
            add_default_annotations(next, entity, holder, defaults);
            if (const auto* a = defaults.find(entity, final_key)) w.s.annotations.set(entity, final_key, *a);
        }
    }
    if (labels) {
        if (!labels->is_object()) mismatch(u, "'labels' must be an object");
        Json current = w.s.annotations.find(entity, final_key) ? to_json(*w.s.annotations.find(entity, final_key)) : Json::object();
        for (const auto& [k, v] : labels->items()) {
            if (v.is_null()) current.erase(k);
            else current[k] = v;
        }
        if (labels->contains("render") && !labels->contains("summary") && current.value("render", "") != "summary")
            current.erase("summary");
        w.s.annotations.set(entity, final_key, as_payload(u, [&] { return annotation_from_json(current); }));
    }
    migrate(w, next);
    prune_dependencies(w);
}

// --- data actions ---

Value::Dict decode_values(const Updater& u, const Schema& schema, const std::string& entity, const Json& values) {
    if (!values.is_object()) mismatch(u, "'values' must be an object");
    const auto* edef = schema.find(entity);
    Value::Dict out;
    for (const auto& [k, v] : values.items()) {
        const auto* a = edef->find(k);
        if (!a) mismatch(u, "'" + k + "' is not an attribute of " + entity);
        if (k == "id" && a->kind == AttrKind::Sval) continue;
        out[k] = as_payload(u, [&] { return value_from_json(*a, v); });
    }
    return out;
}

bool well_formed_id(const std::string& entity, const std::string& id) {
    static const std::regex re("^[A-Z][A-Z0-9_]*-[0-9]+$");
    return id.rfind(entity + "-", 0) == 0 && std::regex_match(id, re);
}

ObjectId create(Work& w, const Updater& u, const std::string& entity, const Json& spec) {
    Value::Dict partial;
    if (const auto* values = member(spec, "values")) partial = decode_values(u, w.s.schema, entity, *values);
    auto [data, id] = as_payload(u, [&] { return create_instance(w.s.schema, w.s.data, entity, partial); });
    if (const auto* want = member(spec, "id"); want && want->is_string()) {
        auto requested = want->get<std::string>();
        if (requested != id && well_formed_id(entity, requested) && !data.find(requested)) {
            Instance inst = data.instances.at(id);
            data.instances.erase(id);
            inst.id = requested;
            if (inst.values.count("id")) inst.values["id"] = Value(requested);
            data.instances.emplace(requested, std::move(inst));
            id = requested;
        }
    }
    w.s.data = std::move(data);
    const auto& inst = w.s.data.instances.at(id);
    for (const auto& [k, _] : inst.values) w.changed.push_back(slot_path(w.s.data, {id, k, std::nullopt}));
    w.created.push_back(id);
    return id;
}

std::vector<Slot> locate_target(const Work& w, const Updater& u) {
    return as_payload(u, [&] { return locate(w.s.schema, w.s.data, u.target); });
}

void add_data(Work& w, const Updater& u) {
    reject_pending(u);
    auto res = resolve_target(w.s.schema, u);
    const auto& spec = u.specifications;
    if (res.kind == ResolvedKind::EntityRoot || res.kind == ResolvedKind::Entity) {
        if (!only_ids(u.target) || !u.target.steps().empty()) mismatch(u, "target must be an entity, a pointer or an array");
        create(w, u, res.entity, spec);
        return;
    }
    if (!res.attribute || res.element) mismatch(u, "target must be an entity, a pointer or an array");
    const AttributeDef def = *res.attribute;
    auto slots = locate_target(w, u);
    if (slots.size() != 1) unknown_target(u, "expected one slot, found " + std::to_string(slots.size()));
    const Slot slot = slots.front();
    if (def.kind == AttrKind::Arry) {
        Value item;
        if (def.is_entity_array()) {
            item = Value(Ref{create(w, u, *def.item->target, spec)});
        } else {
            const auto* v = member(spec, "value");
            if (!v) mismatch(u, "adding to a list of values needs 'value'");
            item = as_payload(u, [&] { return value_from_json(element_def(def), *v); });
        }
        Value current = get(w.s.schema, w.s.data, slot_path(w.s.data, slot)).at(0);
        Value::List l = current.is_list() ? current.as_list() : Value::List{};
        l.push_back(item);
        auto wr = as_payload(u, [&] { return write_slot(w.s.schema, w.s.data, slot, Value(std::move(l))); });
        w.s.data = std::move(wr.data);
        note_changes(w, wr.changed);
        return;
    }
    if (def.kind == AttrKind::Pntr) {
        auto id = create(w, u, *def.target, spec);
        auto wr = as_payload(u, [&] { return write_slot(w.s.schema, w.s.data, slot, Value(Ref{id})); });
        w.s.data = std::move(wr.data);
        note_changes(w, wr.changed);
        return;
    }
    mismatch(u, "target must be an entity, a pointer or an array");
}

void remove_data(Work& w, const Updater& u) {
    auto res = resolve_target(w.s.schema, u);
    if (res.kind == ResolvedKind::Entity || res.kind == ResolvedKind::EntityRoot) {
        if (u.target.steps().empty() || !only_ids(u.target)) mismatch(u, "target must name one instance or array element");
        const auto& id = u.target.steps().back().name;
        if (!w.s.data.find(id)) unknown_target(u, "no instance '" + id + "'");
        auto wr = as_payload(u, [&] { return delete_instance(w.s.schema, w.s.data, id); });
        w.s.data = std::move(wr.data);
        note_changes(w, wr.changed);
        return;
    }
    if (!res.element) mismatch(u, "target must name one instance or array element");
    auto slots = locate_target(w, u);
    if (slots.empty()) unknown_target(u, "no such element");
    std::map<std::pair<ObjectId, std::string>, std::vector<std::size_t>> by_array;
    for (const auto& s : slots)
        if (s.index) by_array[{s.id, s.key}].push_back(*s.index);
    for (auto& [where, indices] : by_array) {
        Slot array_slot{where.first, where.second, std::nullopt};
        Value current = get(w.s.schema, w.s.data, slot_path(w.s.data, array_slot)).at(0);
        Value::List l = current.as_list();
        std::sort(indices.rbegin(), indices.rend());
        for (auto i : indices) l.erase(l.begin() + static_cast<long>(i));
        auto wr = as_payload(u, [&] { return write_slot(w.s.schema, w.s.data, array_slot, Value(std::move(l))); });
        w.s.data = std::move(wr.data);
        note_changes(w, wr.changed);
    }
}

void update_data(Work& w, const Updater& u) {
    reject_pending(u);
    auto res = resolve_target(w.s.schema, u);
    const auto& spec = u.specifications;
    if (const auto* values = member(spec, "values")) {
        if (res.kind != ResolvedKind::Entity && res.kind != ResolvedKind::EntityRoot)
            mismatch(u, "'values' needs an instance target");
        std::vector<ObjectId> ids;
        if (u.target.steps().empty() && res.kind == ResolvedKind::EntityRoot && res.entity == w.s.schema.root) {
            ids.push_back(w.s.data.root);
        } else if (!u.target.steps().empty() && only_ids(u.target)) {
            ids.push_back(u.target.steps().back().name);
        } else {
            mismatch(u, "'values' needs one instance");
        }
        auto decoded = decode_values(u, w.s.schema, res.entity, *values);
        for (const auto& id : ids) {
            if (!w.s.data.find(id)) unknown_target(u, "no instance '" + id + "'");
            for (const auto& [k, v] : decoded) {
                auto wr = as_payload(u, [&] { return write_slot(w.s.schema, w.s.data, {id, k, std::nullopt}, v); });
                w.s.data = std::move(wr.data);
                note_changes(w, wr.changed);
            }
        }
        return;
    }
    const auto* value = member(spec, "value");
    if (!value) mismatch(u, "needs 'value' or 'values'");
    if (!res.attribute) mismatch(u, "'value' needs an attribute target");
    if (res.attribute->name == "id" && !res.element && res.attribute->kind == AttrKind::Sval)
        mismatch(u, "ids are not writable");
    const AttributeDef def = res.element ? element_def(*res.attribute) : *res.attribute;
    if (res.element && !res.attribute->item) mismatch(u, "bad element target");
    Value v = as_payload(u, [&] { return value_from_json(def, *value); });
    auto slots = locate_target(w, u);
    if (slots.empty()) unknown_target(u, "path selects nothing");
    for (const auto& slot : slots) {
        auto wr = as_payload(u, [&] { return write_slot(w.s.schema, w.s.data, slot, v); });
        w.s.data = std::move(wr.data);
        note_changes(w, wr.changed);
    }
}

// --- view actions ---

// Entity whose instances the collection lists, plus the collection's view key.
std::pair<std::string, std::string> collection_of(const Work& w, const Updater& u) {
    auto res = resolve_target(w.s.schema, u);
    if ((res.kind == ResolvedKind::Entity || res.kind == ResolvedKind::EntityRoot) && u.target.steps().empty())
        return {res.entity, u.target.entity()};
    if (res.attribute && !res.element && res.attribute->is_entity_array())
        return {*res.attribute->item->target, view_key(u.target)};
    if (res.attribute && !res.element && res.attribute->kind == AttrKind::Arry) return {"", view_key(u.target)};
    mismatch(u, "target must be an entity or an array attribute");
}

// Instances currently listed by the collection, in order.
std::vector<const Instance*> members_of(const Work& w, const Updater& u, const std::string& entity) {
    if (u.target.steps().empty()) return w.s.data.of_entity(entity);
    std::vector<const Instance*> out;
    std::set<ObjectId> seen;
    for (const auto& v : as_payload(u, [&] { return get(w.s.schema, w.s.data, u.target); })) {
        if (!v.is_list()) continue;
        for (const auto& e : v.as_list())
            if (e.is_ref() && !e.as_ref().is_null() && seen.insert(e.as_ref().id).second)
                if (const auto* inst = w.s.data.find(e.as_ref().id)) out.push_back(inst);
    }
    return out;
}

void cluster(Work& w, const Updater& u) {
    reject_pending(u);
    auto [entity, key] = collection_of(w, u);
    if (entity.empty()) mismatch(u, "only collections of entities can be clustered");
    const auto& spec = u.specifications;
    auto& cv = w.s.view.collections[key];
    if (spec.value("clear", false)) {
        cv.clusters.clear();
        return;
    }
    auto members = members_of(w, u, entity);
    std::vector<Cluster> out;
    if (const auto* field = member(spec, "field")) {
        if (!field->is_string() || !w.s.schema.find(entity, field->get<std::string>()))
            mismatch(u, "'field' must name an attribute of " + entity);
        auto f = field->get<std::string>();
        for (const auto* inst : members) {
            const Value* v = inst->find(f);
            if (!v || v->is_empty() || (v->is_text() && v->as_text().empty()) || v->is_list() || v->is_dict()) continue;
            std::string label = to_display(*v);
            if (v->is_ref()) {
                const auto* target = w.s.data.find(v->as_ref().id);
                auto pid = target ? public_identifier(w.s.schema, w.s.annotations, target->entity) : std::nullopt;
                if (target && pid && target->find(*pid)) label = to_display(*target->find(*pid));
            }
            auto it = std::find_if(out.begin(), out.end(), [&](const Cluster& c) { return c.label == label; });
            if (it == out.end()) out.push_back({label, {inst->id}});
            else it->members.push_back(inst->id);
        }
    } else if (const auto* groups = member(spec, "groups")) {
        std::set<ObjectId> allowed;
        for (const auto* i : members) allowed.insert(i->id);
        auto add = [&](const std::string& label, const Json& ids) {
            if (!ids.is_array()) mismatch(u, "group '" + label + "' must list ids");
            Cluster c{label, {}};
            for (const auto& id : ids) {
                if (!id.is_string() || !allowed.count(id.get<std::string>()))
                    mismatch(u, "group '" + label + "' names " + id.dump() + ", which is not in the collection");
                c.members.push_back(id.get<std::string>());
            }
            out.push_back(std::move(c));
        };
        if (groups->is_array()) {
            for (const auto& g : *groups) {
                if (!g.is_object() || !g.contains("label") || !g["label"].is_string()) mismatch(u, "each group needs a 'label'");
                add(g["label"].get<std::string>(), g.value("members", Json::array()));
            }
        } else if (groups->is_object()) {
            for (const auto& [label, ids] : groups->items()) add(label, ids);
        } else {
            mismatch(u, "'groups' must be an array or object");
        }
    } else {
        mismatch(u, "needs 'field', 'groups' or 'clear'");
    }
    cv.clusters = std::move(out);
}

void filter(Work& w, const Updater& u) {
    auto [entity, key] = collection_of(w, u);
    const auto& spec = u.specifications;
    if (spec.value("clear", false)) {
        w.s.view.collections[key].filter.reset();
        return;
    }
    const auto* pred = member(spec, "predicate");
    if (!pred || !pred->is_string()) mismatch(u, "needs a 'predicate' string or 'clear'");
    auto expr = as_payload(u, [&]() -> Expression {
        try {
            return Expression::parse(pred->get<std::string>());
        } catch (const Error& e) {
            throw Error("type-mismatch", e.what());
        }
    });
    for (const auto& n : expr.free_names())
        if (n != "item") mismatch(u, "a filter may only read 'item', not '" + n + "'");
    w.s.view.collections[key].filter = pred->get<std::string>();
}

int rank(const Value& v) { return v.is_number() ? 0 : v.is_text() && !v.as_text().empty() ? 1 : v.is_empty() || v.is_text() ? 3 : 2; }

bool ordered(const Value& a, const Value& b, bool descending) {
    int ra = rank(a), rb = rank(b);
    if (ra == 3 || rb == 3) return ra != 3 && rb == 3;  // empties last either way
    if (ra != rb) return ra < rb;
    if (descending) return ordered(b, a, false);
    if (ra == 0) return a.as_number() < b.as_number();
    if (ra == 1) return a.as_text() < b.as_text();
    return to_display(a) < to_display(b);
}

void sort(Work& w, const Updater& u) {
    auto [entity, key] = collection_of(w, u);
    const auto& spec = u.specifications;
    std::string direction = spec.value("direction", std::string("asc"));
    if (direction != "asc" && direction != "desc") mismatch(u, "'direction' must be asc or desc");
    bool desc = direction == "desc";
    std::string field = spec.value("field", std::string());
    if (!entity.empty()) {
        if (field.empty() || !w.s.schema.find(entity, field)) mismatch(u, "'field' must name an attribute of " + entity);
    }
    if (u.target.steps().empty()) {
        w.s.view.collections[key].sort = SortSpec{field, desc};
        return;
    }
    // Arrays are reordered in place.
    for (const auto& slot : locate_target(w, u)) {
        Value current = get(w.s.schema, w.s.data, slot_path(w.s.data, slot)).at(0);
        if (!current.is_list()) continue;
        Value::List l = current.as_list();
        auto sort_key = [&](const Value& e) -> Value {
            if (entity.empty()) return e;
            if (!e.is_ref()) return Value();
            const auto* inst = w.s.data.find(e.as_ref().id);
            const Value* v = inst ? inst->find(field) : nullptr;
            return v ? *v : Value();
        };
        std::stable_sort(l.begin(), l.end(), [&](const Value& a, const Value& b) { return ordered(sort_key(a), sort_key(b), desc); });
        auto wr = as_payload(u, [&] { return write_slot(w.s.schema, w.s.data, slot, Value(std::move(l))); });
        w.s.data = std::move(wr.data);
        note_changes(w, wr.changed);
    }
}

void apply_one(Work& w, const Updater& u) {
    switch (u.action) {
        case Action::AddSchema: return add_schema(w, u);
        case Action::RemoveSchema: return remove_schema(w, u);
        case Action::UpdateSchema: return update_schema(w, u);
        case Action::AddData: return add_data(w, u);
        case Action::RemoveData: return remove_data(w, u);
        case Action::UpdateData: return update_data(w, u);
        case Action::Cluster: return cluster(w, u);
        case Action::Filter: return filter(w, u);
        case Action::Sort: return sort(w, u);
    }
}

[[noreturn]] void reject(std::size_t index, const std::string& message, Json detail) {
    detail["index"] = index;
    throw Error("validation-rejection", message, std::move(detail));
}

Json violations_json(const std::vector<Violation>& vs) {
    Json out = Json::array();
    for (const auto& v : vs) out.push_back(v.to_json());
    return out;
}

}  // namespace

std::string to_string(Action a) {
    for (const auto& [k, name] : kActions)
        if (k == a) return name;
    return "update-data";
}

std::optional<Action> action_from_string(std::string_view s) {
    for (const auto& [k, name] : kActions)
        if (s == name) return k;
    return std::nullopt;
}

Json to_json(const Updater& u) {
    return {{"target", u.target.str()}, {"action", to_string(u.action)}, {"specifications", u.specifications}};
}

Json to_json(const std::vector<Updater>& us) {
    Json out = Json::array();
    for (const auto& u : us) out.push_back(to_json(u));
    return out;
}

Updater updater_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("target") || !j["target"].is_string() || !j.contains("action") ||
        !j["action"].is_string())
        throw Error("payload-mismatch", "updater needs string 'target' and 'action'");
    auto action = action_from_string(j["action"].get<std::string>());
    if (!action) throw Error("payload-mismatch", "unknown action '" + j["action"].get<std::string>() + "'");
    Updater u;
    try {
        u.target = Path::parse(j["target"].get<std::string>());
    } catch (const Error& e) {
        throw Error("unknown-target", e.what(), {{"target", j["target"]}});
    }
    u.action = *action;
    if (j.contains("specifications")) {
        if (!j["specifications"].is_object()) throw Error("payload-mismatch", "'specifications' must be an object");
        u.specifications = j["specifications"];
    }
    return u;
}

std::vector<Updater> updaters_from_json(const Json& j) {
    if (!j.is_array()) throw Error("payload-mismatch", "updaters must be an array");
    std::vector<Updater> out;
    for (const auto& e : j) out.push_back(updater_from_json(e));
    return out;
}

void check_updater(const Session& s, const Updater& u) {
    Work w{s, {}, {}, false, false};
    apply_one(w, u);
}

ApplyResult apply_batch(const Session& s, const std::vector<Updater>& batch, const ApplyOptions& opts) {
    if (batch.empty()) throw Error("payload-mismatch", "empty updater batch");
    Work w{s, {}, {}, false, false};
    for (std::size_t i = 0; i < batch.size(); ++i) {
        try {
            apply_one(w, batch[i]);
        } catch (const Error& e) {
            Json detail = e.detail().is_object() ? e.detail() : Json::object();
            detail["index"] = i;
            throw Error(e.code(), "updater " + std::to_string(i) + ": " + e.what(), detail);
        }
    }
    const std::size_t last = batch.size() - 1;
    if (w.schema_changed) {
        auto r = validate_schema(w.s.schema);
        if (r.ok()) r.merge(validate_annotations(w.s.schema, w.s.annotations));
        if (!r.ok()) reject(last, "schema or annotations no longer valid", {{"issues", r.to_json()}});
    }
    DependencyGraph graph;
    try {
        graph = build_graph(w.s.schema, w.s.dependencies);
    } catch (const Error& e) {
        reject(last, std::string("dependencies rejected: ") + e.what(), {{"issues", Json::array({e.to_json()})}});
    }
    DataSet before = s.data;
    if (w.schema_changed) before = migrate_data(w.s.schema, s.data, diff_schemas(s.schema, w.s.schema));

    auto checked = check_state(graph, w.s.schema, before, w.s.data, w.changed, opts.budget);
    if (!checked.accepted) reject(last, "write violates a constraint", {{"violations", violations_json(checked.violations)}});

    PropagateResult prop;
    try {
        prop = (w.schema_changed || w.deps_changed)
                   ? recompute_all(graph, w.s.schema, w.s.data, opts.budget, opts.nl, opts.cache)
                   : propagate(graph, w.s.schema, w.s.data, w.changed, opts.budget, opts.nl, opts.cache);
    } catch (const Error& e) {
        reject(last, std::string("propagation failed: ") + e.what(), {{"issues", Json::array({e.to_json()})}});
    }
    if (!prop.updated.empty()) {
        auto all = w.changed;
        all.insert(all.end(), prop.updated.begin(), prop.updated.end());
        auto again = check_state(graph, w.s.schema, before, prop.data, all, opts.budget);
        if (!again.accepted)
            reject(last, "derived values violate a constraint", {{"violations", violations_json(again.violations)}});
    }
    w.s.data = std::move(prop.data);
    auto dr = validate_data(w.s.schema, w.s.data);
    if (!dr.ok()) reject(last, "data no longer valid", {{"issues", dr.to_json()}});
    tidy_view(w.s);

    ApplyResult out;
    out.session = std::move(w.s);
    out.changed = std::move(w.changed);
    out.changed.insert(out.changed.end(), prop.updated.begin(), prop.updated.end());
    out.stale = std::move(prop.stale);
    out.schema_changed = w.schema_changed;
    out.created = std::move(w.created);
    return out;
}

ApplyResult apply_updater(const Session& s, const Updater& u, const ApplyOptions& opts) { return apply_batch(s, {u}, opts); }

}  // namespace taskui
