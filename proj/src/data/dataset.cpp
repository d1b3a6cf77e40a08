#include "taskui/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace taskui {

namespace {

long suffix_of(std::string_view id) {
    auto dash = id.rfind('-');
    if (dash == std::string_view::npos) return -1;
    long n = -1;
    auto [ptr, ec] = std::from_chars(id.data() + dash + 1, id.data() + id.size(), n);
    if (ec != std::errc() || ptr != id.data() + id.size()) return -1;
    return n;
}

AttributeDef item_def(const AttributeDef& array) {
    AttributeDef d;
    d.name = array.name;
    if (array.item) {
        d.kind = array.item->kind;
        d.hint = array.item->hint;
        d.target = array.item->target;
    }
    return d;
}

// Attribute def for "attr" or "dict.field" keys.
const AttributeDef* def_for_key(const Schema& schema, std::string_view entity, std::string_view key) {
    auto dot = key.find('.');
    const auto* def = schema.find(entity, key.substr(0, dot));
    while (def && dot != std::string_view::npos) {
        key = key.substr(dot + 1);
        dot = key.find('.');
        auto field = key.substr(0, dot);
        auto it = std::find_if(def->fields.begin(), def->fields.end(), [&](const AttributeDef& f) { return f.name == field; });
        def = it == def->fields.end() ? nullptr : &*it;
    }
    return def;
}

Value read_key(const Instance& inst, std::string_view key) {
    auto dot = key.find('.');
    const Value* v = inst.find(key.substr(0, dot));
    while (v && dot != std::string_view::npos) {
        key = key.substr(dot + 1);
        dot = key.find('.');
        v = v->find(key.substr(0, dot));
    }
    return v ? *v : Value();
}

Value replace_in(const Value& base, std::string_view key, const Value& value) {
    auto dot = key.find('.');
    Value::Dict d = base.is_dict() ? base.as_dict() : Value::Dict{};
    auto head = std::string(key.substr(0, dot));
    if (dot == std::string_view::npos) {
        d[head] = value;
    } else {
        auto it = d.find(head);
        d[head] = replace_in(it == d.end() ? Value() : it->second, key.substr(dot + 1), value);
    }
    return Value(std::move(d));
}

void write_key(Instance& inst, std::string_view key, const Value& value) {
    auto dot = key.find('.');
    auto head = std::string(key.substr(0, dot));
    if (dot == std::string_view::npos) {
        inst.values[head] = value;
        return;
    }
    auto it = inst.values.find(head);
    inst.values[head] = replace_in(it == inst.values.end() ? Value() : it->second, key.substr(dot + 1), value);
}

struct Cursor {
    Value value;
    std::optional<Slot> slot;
};

std::vector<Cursor> walk(const Schema& schema, const DataSet& data, const Path& path) {
    (void)resolve_path(schema, path);
    std::vector<Cursor> cur;
    if (path.entity() == schema.root) {
        cur.push_back({data.root.empty() ? Value() : Value(Ref{data.root}), std::nullopt});
    } else {
        for (const auto* inst : data.of_entity(path.entity())) cur.push_back({Value(Ref{inst->id}), std::nullopt});
    }
    bool at_entity = true;
    for (const auto& step : path.steps()) {
        std::vector<Cursor> next;
        if (at_entity && step.kind == PathStep::Kind::Id) {
            for (auto& c : cur)
                if (c.value.is_ref() && c.value.as_ref().id == step.name) next.push_back(c);
            if (next.empty())
                throw Error("unknown-path", "no " + path.entity() + " instance '" + step.name + "'", {{"path", path.str()}});
            cur = std::move(next);
            continue;
        }
        if (at_entity && step.kind == PathStep::Kind::All) continue;
        switch (step.kind) {
            case PathStep::Kind::Attr:
                at_entity = false;
                for (auto& c : cur) {
                    if (c.value.is_ref()) {
                        const Instance* inst = c.value.as_ref().is_null() ? nullptr : data.find(c.value.as_ref().id);
                        if (!inst) {
                            next.push_back({Value(), std::nullopt});
                            continue;
                        }
                        next.push_back({read_key(*inst, step.name), Slot{inst->id, step.name, std::nullopt}});
                    } else if (c.value.is_dict() && c.slot && !c.slot->index) {
                        const Value* v = c.value.find(step.name);
                        next.push_back({v ? *v : Value(), Slot{c.slot->id, c.slot->key + "." + step.name, std::nullopt}});
                    } else {
                        next.push_back({Value(), std::nullopt});
                    }
                }
                break;
            case PathStep::Kind::All:
                for (auto& c : cur) {
                    if (!c.value.is_list()) continue;
                    const auto& l = c.value.as_list();
                    for (std::size_t i = 0; i < l.size(); ++i)
                        next.push_back({l[i], c.slot ? std::optional<Slot>(Slot{c.slot->id, c.slot->key, i}) : std::nullopt});
                }
                break;
            case PathStep::Kind::Index:
                for (auto& c : cur) {
                    std::optional<Slot> s;
                    if (c.slot) s = Slot{c.slot->id, c.slot->key, step.index};
                    if (c.value.is_list() && step.index < c.value.as_list().size())
                        next.push_back({c.value.as_list()[step.index], s});
                    else
                        next.push_back({Value(), std::nullopt});
                }
                break;
            case PathStep::Kind::Id:
                for (auto& c : cur) {
                    Cursor found{Value(), std::nullopt};
                    if (c.value.is_list()) {
                        const auto& l = c.value.as_list();
                        for (std::size_t i = 0; i < l.size(); ++i) {
                            if (l[i].is_ref() && l[i].as_ref().id == step.name) {
                                found = {l[i], c.slot ? std::optional<Slot>(Slot{c.slot->id, c.slot->key, i}) : std::nullopt};
                                break;
                            }
                        }
                    }
                    next.push_back(found);
                }
                break;
        }
        cur = std::move(next);
    }
    return cur;
}

void scrub(const Schema& schema, DataSet& data, const ObjectId& gone, std::vector<Path>& changed) {
    for (auto& [id, inst] : data.instances) {
        const auto* edef = schema.find(inst.entity);
        if (!edef) continue;
        std::function<void(const AttributeDef&, const std::string&)> visit = [&](const AttributeDef& a, const std::string& key) {
            if (a.kind == AttrKind::Dict) {
                for (const auto& f : a.fields) visit(f, key + "." + f.name);
                return;
            }
            Value v = read_key(inst, key);
            Value replaced;
            bool touched = false;
            if (a.kind == AttrKind::Pntr && v.is_ref() && v.as_ref().id == gone) {
                replaced = Value(Ref::null());
                touched = true;
            } else if (a.is_entity_array() && v.is_list()) {
                Value::List kept;
                for (const auto& e : v.as_list()) {
                    if (e.is_ref() && e.as_ref().id == gone) touched = true;
                    else kept.push_back(e);
                }
                replaced = Value(std::move(kept));
            }
            if (touched) {
                write_key(inst, key, replaced);
                changed.push_back(slot_path(data, Slot{id, key, std::nullopt}));
            }
        };
        for (const auto& a : edef->attributes) visit(a, a.name);
    }
}

void validate_value(const Schema& schema, const DataSet& data, const AttributeDef& def, const Value& v,
                    const std::string& path, const ObjectId& id, ValidationReport& report) {
    if (def.kind == AttrKind::Dict) {
        if (!v.is_dict()) {
            report.add(path, "type-mismatch", "expected a dictionary, got " + v.type_name(), id);
            return;
        }
        for (const auto& f : def.fields) {
            const Value* fv = v.find(f.name);
            if (!fv) report.add(path + "." + f.name, "missing-value", "field has no value", id);
            else validate_value(schema, data, f, *fv, path + "." + f.name, id, report);
        }
        for (const auto& [k, _] : v.as_dict())
            if (std::none_of(def.fields.begin(), def.fields.end(), [&](const AttributeDef& f) { return f.name == k; }))
                report.add(path + "." + k, "unknown-attribute", "field is not in the schema", id);
        return;
    }
    if (def.kind == AttrKind::Arry && v.is_list()) {
        auto idef = item_def(def);
        const auto& l = v.as_list();
        for (std::size_t i = 0; i < l.size(); ++i)
            validate_value(schema, data, idef, l[i], path + "[" + std::to_string(i) + "]", id, report);
        return;
    }
    if (def.kind == AttrKind::Pntr && v.is_ref() && v.as_ref().is_null() && path.back() == ']') {
        report.add(path, "dangling-pointer", "array elements may not be null references", id);
        return;
    }
    if (auto rule = check_value(schema, data, def, v)) {
        std::string msg = *rule == "dangling-pointer" ? "reference to missing instance '" + to_display(v) + "'"
                          : *rule == "pointer-entity" ? "reference to an instance of the wrong entity"
                                                      : "expected " + to_string(def.kind) + ", got " + v.type_name();
        report.add(path, *rule, msg, id);
    }
}

}  // namespace

const Value* Instance::find(std::string_view attribute) const {
    auto it = values.find(attribute);
    return it == values.end() ? nullptr : &it->second;
}

const Instance* DataSet::find(std::string_view id) const {
    auto it = instances.find(id);
    return it == instances.end() ? nullptr : &it->second;
}

std::vector<const Instance*> DataSet::of_entity(std::string_view entity) const {
    std::vector<const Instance*> out;
    for (const auto& [id, inst] : instances)
        if (inst.entity == entity) out.push_back(&inst);
    std::stable_sort(out.begin(), out.end(), [](const Instance* a, const Instance* b) {
        auto sa = suffix_of(a->id), sb = suffix_of(b->id);
        return sa != sb ? sa < sb : a->id < b->id;
    });
    return out;
}

ObjectId DataSet::next_id(std::string_view entity) const {
    long best = 0;
    for (const auto& [id, inst] : instances)
        if (inst.entity == entity) best = std::max(best, suffix_of(id));
    std::string candidate;
    do {
        candidate = std::string(entity) + "-" + std::to_string(++best);
    } while (instances.count(candidate));
    return candidate;
}

Path instance_path(const DataSet& data, const Instance& inst) {
    if (inst.id == data.root) return Path(inst.entity);
    return Path(inst.entity).id(inst.id);
}

Path slot_path(const DataSet& data, const Slot& slot) {
    const Instance* inst = data.find(slot.id);
    Path p = inst ? instance_path(data, *inst) : Path(slot.id);
    std::string_view key = slot.key;
    for (;;) {
        auto dot = key.find('.');
        p = p.attr(std::string(key.substr(0, dot)));
        if (dot == std::string_view::npos) break;
        key = key.substr(dot + 1);
    }
    if (slot.index) p = p.at(*slot.index);
    return p;
}

Value empty_value(const AttributeDef& def) {
    switch (def.kind) {
        case AttrKind::Sval: return def.hint == ScalarHint::Number ? Value() : Value(std::string());
        case AttrKind::Pntr: return Value(Ref::null());
        case AttrKind::Arry: return Value(Value::List{});
        case AttrKind::Dict: {
            Value::Dict d;
            for (const auto& f : def.fields) d.emplace(f.name, empty_value(f));
            return Value(std::move(d));
        }
    }
    return Value();
}

std::optional<std::string> check_value(const Schema& schema, const DataSet& data, const AttributeDef& def,
                                       const Value& v) {
    switch (def.kind) {
        case AttrKind::Sval:
            if (v.is_empty()) return std::nullopt;
            if (def.hint == ScalarHint::Number ? v.is_number() : v.is_text()) return std::nullopt;
            return "type-mismatch";
        case AttrKind::Pntr: {
            if (!v.is_ref()) return "type-mismatch";
            if (v.as_ref().is_null()) return std::nullopt;
            const Instance* inst = data.find(v.as_ref().id);
            if (!inst) return "dangling-pointer";
            if (def.target && inst->entity != *def.target) return "pointer-entity";
            return std::nullopt;
        }
        case AttrKind::Arry: {
            if (!v.is_list()) return "type-mismatch";
            auto idef = item_def(def);
            for (const auto& e : v.as_list()) {
                if (idef.kind == AttrKind::Pntr && e.is_ref() && e.as_ref().is_null()) return "dangling-pointer";
                if (auto r = check_value(schema, data, idef, e)) return r;
            }
            return std::nullopt;
        }
        case AttrKind::Dict: {
            if (!v.is_dict()) return "type-mismatch";
            if (v.as_dict().size() != def.fields.size()) return "type-mismatch";
            for (const auto& f : def.fields) {
                const Value* fv = v.find(f.name);
                if (!fv) return "type-mismatch";
                if (auto r = check_value(schema, data, f, *fv)) return r;
            }
            return std::nullopt;
        }
    }
    return "type-mismatch";
}

Value value_from_json(const AttributeDef& def, const Json& j) {
    switch (def.kind) {
        case AttrKind::Sval:
            if (j.is_null()) return empty_value(def);
            return value_from_json(j);
        case AttrKind::Pntr:
            if (j.is_null()) return Value(Ref::null());
            if (j.is_string()) return Value(Ref{j.get<std::string>()});
            return value_from_json(j);
        case AttrKind::Arry: {
            if (j.is_null()) return Value(Value::List{});
            if (!j.is_array()) return value_from_json(j);
            auto idef = item_def(def);
            Value::List l;
            for (const auto& e : j) l.push_back(value_from_json(idef, e));
            return Value(std::move(l));
        }
        case AttrKind::Dict: {
            if (j.is_null()) return empty_value(def);
            if (!j.is_object()) return value_from_json(j);
            Value::Dict d;
            for (const auto& [k, e] : j.items()) {
                auto it = std::find_if(def.fields.begin(), def.fields.end(), [&](const AttributeDef& f) { return f.name == k; });
                d.emplace(k, it == def.fields.end() ? value_from_json(e) : value_from_json(*it, e));
            }
            return Value(std::move(d));
        }
    }
    return value_from_json(j);
}

ValidationReport validate_data(const Schema& schema, const DataSet& data) {
    ValidationReport report;
    const Instance* root = data.find(data.root);
    if (!root) report.add(schema.root, "missing-root", "no root instance '" + data.root + "'");
    else if (root->entity != schema.root)
        report.add(schema.root, "root-entity", "root instance is a " + root->entity, root->id);
    for (const auto& [id, inst] : data.instances) {
        std::string base = instance_path(data, inst).str();
        const auto* edef = schema.find(inst.entity);
        if (!edef) {
            report.add(base, "unknown-entity", "entity '" + inst.entity + "' is not in the schema", id);
            continue;
        }
        if (inst.id != id) report.add(base, "id-mismatch", "instance id differs from its key", id);
        for (const auto& a : edef->attributes) {
            const Value* v = inst.find(a.name);
            std::string p = base + "." + a.name;
            if (!v) {
                report.add(p, "missing-value", "attribute has no value", id);
                continue;
            }
            if (a.name == "id" && a.kind == AttrKind::Sval && !(v->is_text() && v->as_text() == id)) {
                report.add(p, "id-mismatch", "id attribute does not match the instance id", id);
                continue;
            }
            validate_value(schema, data, a, *v, p, id, report);
        }
        for (const auto& [k, _] : inst.values)
            if (!edef->find(k)) report.add(base + "." + k, "unknown-attribute", "attribute is not in the schema", id);
    }
    return report;
}

std::vector<Value> get(const Schema& schema, const DataSet& data, const Path& path) {
    std::vector<Value> out;
    for (auto& c : walk(schema, data, path)) out.push_back(std::move(c.value));
    return out;
}

std::vector<Slot> locate(const Schema& schema, const DataSet& data, const Path& path) {
    std::vector<Slot> out;
    for (auto& c : walk(schema, data, path))
        if (c.slot) out.push_back(*c.slot);
    return out;
}

WriteResult write_slot(const Schema& schema, const DataSet& data, const Slot& slot, const Value& value) {
    const Instance* inst = data.find(slot.id);
    if (!inst) throw Error("unknown-path", "no instance '" + slot.id + "'");
    const AttributeDef* def = def_for_key(schema, inst->entity, slot.key);
    if (!def) throw Error("unknown-path", "no attribute '" + slot.key + "' on " + inst->entity);
    Path where = slot_path(data, slot);
    if (slot.key == "id") throw Error("not-editable", "instance ids cannot be written", {{"path", where.str()}});
    Value current = read_key(*inst, slot.key);
    Value next = value;
    if (slot.index) {
        if (def->kind != AttrKind::Arry || !current.is_list() || *slot.index >= current.as_list().size())
            throw Error("unknown-path", "no element at '" + where.str() + "'", {{"path", where.str()}});
        auto idef = item_def(*def);
        if (auto rule = check_value(schema, data, idef, value); rule || (idef.kind == AttrKind::Pntr && value.as_ref().is_null()))
            throw Error(rule.value_or("type-mismatch"), "value does not fit '" + where.str() + "'",
                        {{"path", where.str()}, {"value", to_json(value)}});
        Value::List l = current.as_list();
        if (l[*slot.index] == value) return {data, {}};
        l[*slot.index] = value;
        next = Value(std::move(l));
    } else {
        if (auto rule = check_value(schema, data, *def, value))
            throw Error(*rule, "value does not fit '" + where.str() + "'", {{"path", where.str()}, {"value", to_json(value)}});
        if (current == value) return {data, {}};
    }
    DataSet out = data;
    write_key(out.instances.at(slot.id), slot.key, next);
    return {std::move(out), {where}};
}

WriteResult set_unchecked(const Schema& schema, const DataSet& data, const Path& path, const Value& value) {
    auto slots = locate(schema, data, path);
    if (slots.size() != 1)
        throw Error("unknown-path", "'" + path.str() + "' does not denote exactly one stored value", {{"path", path.str()}});
    return write_slot(schema, data, slots.front(), value);
}

WriteResult set(const Schema& schema, const AnnotationSet& annotations, const DataSet& data, const Path& path,
                const Value& value) {
    auto r = resolve_path(schema, path);
    if (r.attribute && !r.element && r.attribute->kind != AttrKind::Dict) {
        if (auto rule = check_value(schema, data, *r.attribute, value))
            throw Error(*rule, "value does not fit '" + path.str() + "'", {{"path", path.str()}});
    }
    const Annotation* ann = annotations.find(r.entity, r.annotation_key);
    if (!ann || !ann->is_editable())
        throw Error("not-editable", "'" + path.str() + "' is not editable", {{"path", path.str()}});
    return set_unchecked(schema, data, path, value);
}

std::pair<DataSet, ObjectId> create_instance(const Schema& schema, const DataSet& data, const std::string& entity,
                                             const Value::Dict& partial) {
    const auto* edef = schema.find(entity);
    if (!edef) throw Error("unknown-entity", "no entity '" + entity + "'", {{"entity", entity}});
    for (const auto& [k, _] : partial)
        if (!edef->find(k)) throw Error("type-mismatch", "'" + k + "' is not an attribute of " + entity, {{"attribute", k}});
    Instance inst;
    inst.entity = entity;
    inst.id = data.next_id(entity);
    for (const auto& a : edef->attributes) {
        if (a.name == "id" && a.kind == AttrKind::Sval) {
            inst.values["id"] = Value(inst.id);
            continue;
        }
        auto it = partial.find(a.name);
        if (it == partial.end()) {
            inst.values[a.name] = empty_value(a);
            continue;
        }
        if (auto rule = check_value(schema, data, a, it->second))
            throw Error(*rule, "value for " + entity + "." + a.name + " does not fit", {{"attribute", a.name}});
        inst.values[a.name] = it->second;
    }
    DataSet out = data;
    auto id = inst.id;
    if (out.root.empty() && entity == schema.root) out.root = id;
    out.instances.emplace(id, std::move(inst));
    return {std::move(out), id};
}

WriteResult delete_instance(const Schema& schema, const DataSet& data, const ObjectId& id) {
    const Instance* inst = data.find(id);
    if (!inst) throw Error("unknown-id", "no instance '" + id + "'", {{"id", id}});
    if (id == data.root) throw Error("cannot-delete-root", "the root instance cannot be deleted", {{"id", id}});
    WriteResult r{data, {instance_path(data, *inst)}};
    r.data.instances.erase(id);
    scrub(schema, r.data, id, r.changed);
    return r;
}

DataSet empty_dataset(const Schema& schema) {
    return create_instance(schema, DataSet{}, schema.root).first;
}

DataSet migrate_data(const Schema& schema, const DataSet& data, const SchemaDelta& delta) {
    if (delta.empty()) return data;
    DataSet out = data;
    std::set<std::string> dropped;
    for (const auto& c : delta.removed)
        if (c.path.find('.') == std::string::npos) dropped.insert(c.path);
    for (auto it = out.instances.begin(); it != out.instances.end();)
        it = dropped.count(it->second.entity) ? out.instances.erase(it) : std::next(it);
    for (auto& [id, inst] : out.instances) {
        const auto* edef = schema.find(inst.entity);
        if (!edef) continue;
        for (auto vit = inst.values.begin(); vit != inst.values.end();)
            vit = edef->find(vit->first) ? std::next(vit) : inst.values.erase(vit);
        for (const auto& a : edef->attributes) {
            auto vit = inst.values.find(a.name);
            if (vit == inst.values.end()) {
                inst.values[a.name] = a.name == "id" && a.kind == AttrKind::Sval ? Value(id) : empty_value(a);
            }
        }
    }
    // Changed definitions: keep what still fits, reset the rest. Pointers are checked
    // after all removals so references into dropped entities are cleared too.
    for (auto& [id, inst] : out.instances) {
        const auto* edef = schema.find(inst.entity);
        if (!edef) continue;
        for (const auto& a : edef->attributes) {
            auto& v = inst.values[a.name];
            if (a.name == "id" && a.kind == AttrKind::Sval) continue;
            if (!check_value(schema, out, a, v)) continue;
            if (a.is_entity_array() && v.is_list()) {
                Value::List kept;
                for (const auto& e : v.as_list())
                    if (!check_value(schema, out, item_def(a), e) && !(e.is_ref() && e.as_ref().is_null())) kept.push_back(e);
                v = Value(std::move(kept));
                if (!check_value(schema, out, a, v)) continue;
            }
            v = empty_value(a);
        }
    }
    if (delta.root && (!out.find(out.root) || out.find(out.root)->entity != schema.root)) {
        auto existing = out.of_entity(schema.root);
        if (!existing.empty()) {
            out.root = existing.front()->id;
        } else {
            out.root.clear();
            out = create_instance(schema, out, schema.root).first;
        }
    }
    return out;
}

Json to_json(const DataSet& data) {
    Json instances = Json::object();
    for (const auto& [id, inst] : data.instances) {
        Json values = Json::object();
        for (const auto& [k, v] : inst.values) values[k] = to_json(v);
        instances[id] = {{"entity", inst.entity}, {"values", values}};
    }
    return {{"root", data.root}, {"instances", instances}};
}

DataSet dataset_from_json(const Schema& schema, const Json& j) {
    if (!j.is_object() || !j.contains("instances") || !j["instances"].is_object())
        throw Error("data-syntax", "data document needs an 'instances' object");
    DataSet d;
    if (j.contains("root") && j["root"].is_string()) d.root = j["root"].get<std::string>();
    for (const auto& [id, ij] : j["instances"].items()) {
        if (!ij.is_object() || !ij.contains("entity") || !ij["entity"].is_string())
            throw Error("data-syntax", "instance '" + id + "' needs an 'entity'");
        Instance inst;
        inst.id = id;
        inst.entity = ij["entity"].get<std::string>();
        if (ij.contains("values")) {
            if (!ij["values"].is_object()) throw Error("data-syntax", "values of '" + id + "' must be an object");
            for (const auto& [k, vj] : ij["values"].items()) {
                const auto* def = schema.find(inst.entity, k);
                inst.values[k] = def ? value_from_json(*def, vj) : value_from_json(vj);
            }
        }
        d.instances.emplace(id, std::move(inst));
    }
    return d;
}

}  // namespace taskui
