#include "taskui/core/schema_ops.hpp"

#include <algorithm>
#include <set>

#include "taskui/expr/expression.hpp"

namespace taskui {

namespace {

void check_item(const Schema& schema, const std::string& path, const ItemSpec& item, ValidationReport& report) {
    switch (item.kind) {
        case AttrKind::Dict:
            report.add(path, "no-array-of-dict", "arrays may not hold dictionaries; abstract the dictionary into an entity");
            return;
        case AttrKind::Arry:
            report.add(path, "no-nested-array", "array items must be single values or entity pointers");
            return;
        case AttrKind::Sval:
            if (!item.hint || item.target) report.add(path, "kind-fields", "scalar item needs a scalar hint and no target");
            return;
        case AttrKind::Pntr:
            if (!item.target || item.hint) {
                report.add(path, "kind-fields", "pointer item needs a target entity and no scalar hint");
            } else if (!schema.find(*item.target)) {
                report.add(path, "unknown-entity-ref", "array item references unknown entity '" + *item.target + "'");
            }
            return;
    }
}

void check_attribute(const Schema& schema, const std::string& path, const AttributeDef& a, bool in_dict,
                     ValidationReport& report) {
    if (!is_attribute_name(a.name)) report.add(path, "bad-attribute-name", "attribute names are lower_snake");
    bool hint = a.hint.has_value(), target = a.target.has_value(), fields = !a.fields.empty(), item = a.item.has_value();
    bool shape_ok = true;
    switch (a.kind) {
        case AttrKind::Sval: shape_ok = hint && !target && !fields && !item; break;
        case AttrKind::Pntr: shape_ok = target && !hint && !fields && !item; break;
        case AttrKind::Dict: shape_ok = !hint && !target && !item; break;
        case AttrKind::Arry: shape_ok = item && !hint && !target && !fields; break;
    }
    if (!shape_ok) report.add(path, "kind-fields", "populated members do not match kind " + to_string(a.kind));

    if (a.kind == AttrKind::Pntr && a.target && !schema.find(*a.target))
        report.add(path, "unknown-entity-ref", "pointer references unknown entity '" + *a.target + "'");
    if (a.kind == AttrKind::Arry && a.item) check_item(schema, path, *a.item, report);
    if (a.kind == AttrKind::Dict) {
        if (in_dict) report.add(path, "nested-dict", "dictionary fields may not be dictionaries");
        std::set<std::string> seen;
        for (const auto& f : a.fields) {
            if (!seen.insert(f.name).second)
                report.add(path + "." + f.name, "duplicate-attribute", "duplicate field '" + f.name + "'");
            check_attribute(schema, path + "." + f.name, f, true, report);
        }
    }
}

bool numeric_field(const Schema& schema, const std::string& entity, const std::string& field) {
    const auto* f = schema.find(entity, field);
    return f && f->kind == AttrKind::Sval && f->hint == ScalarHint::Number;
}

void check_annotation(const Schema& schema, const std::string& entity, const std::string& key, const AttributeDef& a,
                      const Annotation& ann, ValidationReport& report) {
    const std::string path = entity + "." + key;
    bool array = a.kind == AttrKind::Arry;
    if (!ann.editable) report.add(path, "missing-field", "annotation lacks 'editable'");
    if (!ann.render) report.add(path, "missing-field", "annotation lacks 'render'");
    if (!ann.function && !array) report.add(path, "missing-field", "annotation lacks 'function'");

    if (ann.render) {
        if (array && !is_array_render(*ann.render))
            report.add(path, "render-kind-mismatch", "arrays render as 'expanded' or 'summary'");
        if (!array && is_array_render(*ann.render))
            report.add(path, "render-kind-mismatch", "'" + to_string(*ann.render) + "' is only valid for arrays");
    }
    if (ann.render == Render::Category && ann.categories.empty())
        report.add(path, "empty-categories", "category render needs at least one category");
    if (ann.render != Render::Category && !ann.categories.empty())
        report.add(path, "categories-without-category", "categories given but render is not 'category'");

    if (ann.render == Render::Summary) {
        if (!ann.summary) {
            report.add(path, "summary-missing", "summary render needs a summary specification");
        } else if (!a.is_entity_array()) {
            report.add(path, "summary-item-kind", "summaries derive from arrays of entity pointers");
        } else {
            const auto& item_entity = *a.item->target;
            const auto& s = *ann.summary;
            bool numeric_op = s.operation == SummaryOp::Sum || s.operation == SummaryOp::Avg ||
                              s.operation == SummaryOp::Min || s.operation == SummaryOp::Max;
            if (!schema.find(item_entity, s.field)) {
                report.add(path, "summary-field", "'" + s.field + "' is not an attribute of " + item_entity);
            } else if (numeric_op && !numeric_field(schema, item_entity, s.field)) {
                report.add(path, "summary-non-numeric", to_string(s.operation) + " needs a numeric field");
            }
            if (s.predicate) {
                if (numeric_op) report.add(path, "summary-predicate", "predicates apply to FILTER and COUNT only");
                try {
                    (void)Expression::parse(*s.predicate);
                } catch (const Error& e) {
                    report.add(path, "summary-predicate", e.what());
                }
            }
        }
    } else if (ann.summary) {
        report.add(path, "summary-unexpected", "summary specification without summary render");
    }

    if (!ann.thumbnail.empty()) {
        std::optional<std::string> target;
        if (a.kind == AttrKind::Pntr) target = a.target;
        if (a.is_entity_array()) target = a.item->target;
        if (!target) {
            report.add(path, "thumbnail-kind", "thumbnails apply to pointers and arrays of pointers");
        } else if (schema.find(*target)) {
            for (const auto& t : ann.thumbnail)
                if (!schema.find(*target, t))
                    report.add(path, "unknown-thumbnail", "thumbnail attribute '" + t + "' is not on " + *target);
        }
    }
    if (ann.item_render) {
        bool scalar_array = array && a.item && a.item->kind == AttrKind::Sval;
        if (!scalar_array || is_array_render(*ann.item_render) || *ann.item_render == Render::Category)
            report.add(path, "render-kind-mismatch", "item render applies to arrays of single values");
    }
}

void annotate_attributes(const Schema& schema, const std::string& entity, const std::string& prefix,
                         const std::vector<AttributeDef>& attrs, const AnnotationSet& annotations,
                         std::set<std::string>& known, int& private_ids, int& public_ids, ValidationReport& report) {
    for (const auto& a : attrs) {
        auto key = prefix + a.name;
        if (a.kind == AttrKind::Dict) {
            annotate_attributes(schema, entity, key + ".", a.fields, annotations, known, private_ids, public_ids, report);
            continue;
        }
        known.insert(key);
        const auto* ann = annotations.find(entity, key);
        if (!ann) {
            report.add(entity + "." + key, "missing-annotation", "attribute has no annotation");
            continue;
        }
        if (ann->function == Function::PrivateIdentifier) ++private_ids;
        if (ann->function == Function::PublicIdentifier) ++public_ids;
        check_annotation(schema, entity, key, a, *ann, report);
    }
}

std::optional<std::string> rule_public_identifier(const EntityDef& def) {
    for (const char* candidate : {"name", "title"}) {
        const auto* a = def.find(candidate);
        if (a && a->kind == AttrKind::Sval && a->hint == ScalarHint::Text) return std::string(candidate);
    }
    return std::nullopt;
}

bool name_has(const std::string& name, std::initializer_list<const char*> parts) {
    return std::any_of(parts.begin(), parts.end(), [&](const char* p) { return name.find(p) != std::string::npos; });
}

Render text_render_for(const std::string& name) {
    if (name_has(name, {"date", "time", "deadline", "when"}) || name.ends_with("_at")) return Render::Time;
    if (name_has(name, {"location", "address", "place", "venue"})) return Render::Location;
    if (name_has(name, {"url", "link", "website", "email"})) return Render::Url;
    if (name_has(name, {"description", "notes", "review", "bio", "instructions", "details"})) return Render::Paragraph;
    return Render::ShortText;
}

std::vector<std::string> default_thumbnail(const Schema& schema, const std::optional<std::string>& target) {
    if (!target) return {};
    const auto* def = schema.find(*target);
    if (!def) return {};
    if (auto pub = rule_public_identifier(*def)) return {*pub};
    return {};
}

void annotate(const Schema& schema, const std::string& entity, const std::string& key, const AttributeDef& a,
              bool public_id, AnnotationSet& out) {
    Annotation ann;
    ann.editable = true;
    ann.function = Function::Display;
    switch (a.kind) {
        case AttrKind::Dict:
            for (const auto& f : a.fields) annotate(schema, entity, key + "." + f.name, f, false, out);
            return;
        case AttrKind::Sval:
            if (a.name == "id") {
                ann.function = Function::PrivateIdentifier;
                ann.render = Render::Hidden;
                ann.editable = false;
            } else if (public_id) {
                ann.function = Function::PublicIdentifier;
                ann.render = Render::ShortText;
            } else if (a.hint == ScalarHint::Number) {
                ann.render = Render::Number;
            } else {
                ann.render = text_render_for(a.name);
            }
            break;
        case AttrKind::Pntr:
            ann.render = Render::ShortText;
            ann.thumbnail = default_thumbnail(schema, a.target);
            break;
        case AttrKind::Arry:
            ann.render = Render::Expanded;
            if (a.item && a.item->kind == AttrKind::Pntr) ann.thumbnail = default_thumbnail(schema, a.item->target);
            if (a.item && a.item->kind == AttrKind::Sval)
                ann.item_render = a.item->hint == ScalarHint::Number ? Render::Number : Render::ShortText;
            break;
    }
    out.set(entity, key, std::move(ann));
}

[[noreturn]] void path_error(const std::string& code, const Path& path, const std::string& what) {
    throw Error(code, "cannot resolve '" + path.str() + "': " + what, {{"path", path.str()}});
}

}  // namespace

ValidationReport validate_schema(const Schema& schema) {
    ValidationReport report;
    if (schema.root.empty() || !schema.find(schema.root))
        report.add(schema.root.empty() ? "root" : schema.root, "unknown-root", "root must name an entity of the schema");
    for (const auto& [name, def] : schema.entities) {
        if (!is_entity_name(name)) report.add(name, "bad-entity-name", "entity names are UPPER_SNAKE");
        std::set<std::string> seen;
        for (const auto& a : def.attributes) {
            if (!seen.insert(a.name).second)
                report.add(name + "." + a.name, "duplicate-attribute", "duplicate attribute '" + a.name + "'");
            check_attribute(schema, name + "." + a.name, a, false, report);
        }
    }
    return report;
}

ValidationReport validate_annotations(const Schema& schema, const AnnotationSet& annotations) {
    ValidationReport report;
    for (const auto& [entity, def] : schema.entities) {
        std::set<std::string> known;
        int private_ids = 0, public_ids = 0;
        annotate_attributes(schema, entity, "", def.attributes, annotations, known, private_ids, public_ids, report);
        if (private_ids > 1) report.add(entity, "duplicate-private-identifier", "more than one privateIdentifier");
        if (public_ids > 1) report.add(entity, "duplicate-public-identifier", "more than one publicIdentifier");
        auto it = annotations.entities.find(entity);
        if (it != annotations.entities.end())
            for (const auto& [key, ann] : it->second)
                if (!known.count(key)) report.add(entity + "." + key, "orphan-annotation", "annotation for an unknown attribute");
    }
    for (const auto& [entity, attrs] : annotations.entities)
        if (!schema.find(entity)) report.add(entity, "orphan-annotation", "annotations for an unknown entity");
    return report;
}

std::string PathResolution::address() const {
    if (attribute && !footprint.empty()) return footprint.back();
    return entity;
}

std::optional<std::string> PathResolution::target_entity() const {
    if (kind == ResolvedKind::EntityRoot || kind == ResolvedKind::Entity) return entity;
    if (kind == ResolvedKind::Pntr && attribute) return attribute->target;
    if (kind == ResolvedKind::Arry && attribute && attribute->is_entity_array()) return attribute->item->target;
    return std::nullopt;
}

std::string PathResolution::describe() const {
    auto scalar = [](std::optional<ScalarHint> h) { return h == ScalarHint::Number ? std::string("SVAL-number") : std::string("SVAL-text"); };
    switch (kind) {
        case ResolvedKind::EntityRoot: return "entity-root";
        case ResolvedKind::Entity: return "entity";
        case ResolvedKind::SvalText: return "SVAL-text";
        case ResolvedKind::SvalNumber: return "SVAL-number";
        case ResolvedKind::Dict: return "DICT";
        case ResolvedKind::Pntr: return "PNTR";
        case ResolvedKind::Arry:
            if (attribute && attribute->item) {
                if (attribute->item->kind == AttrKind::Pntr) return "ARRY of PNTR";
                return "ARRY of " + scalar(attribute->item->hint);
            }
            return "ARRY";
    }
    return "?";
}

PathResolution resolve_path(const Schema& schema, const Path& path) {
    if (!schema.find(path.entity())) path_error("unknown-entity", path, "no entity '" + path.entity() + "'");
    PathResolution r;
    r.entity = path.entity();
    bool is_root = path.entity() == schema.root;
    r.kind = is_root ? ResolvedKind::EntityRoot : ResolvedKind::Entity;
    r.many = !is_root;

    auto set_attr = [&](const AttributeDef& def) {
        r.attribute = def;
        r.element = false;
        switch (def.kind) {
            case AttrKind::Sval: r.kind = def.hint == ScalarHint::Number ? ResolvedKind::SvalNumber : ResolvedKind::SvalText; break;
            case AttrKind::Dict: r.kind = ResolvedKind::Dict; break;
            case AttrKind::Pntr: r.kind = ResolvedKind::Pntr; break;
            case AttrKind::Arry: r.kind = ResolvedKind::Arry; break;
        }
    };

    for (const auto& step : path.steps()) {
        const bool entity_ctx = r.kind == ResolvedKind::EntityRoot || r.kind == ResolvedKind::Entity;
        if (step.kind == PathStep::Kind::Attr) {
            if (entity_ctx || r.kind == ResolvedKind::Pntr) {
                std::string owner = entity_ctx ? r.entity : r.attribute->target.value_or("");
                const auto* def = schema.find(owner, step.name);
                if (!def) path_error("unknown-attribute", path, "no attribute '" + step.name + "' on " + owner);
                r.entity = owner;
                r.annotation_key = step.name;
                r.footprint.push_back(owner + "." + step.name);
                set_attr(*def);
            } else if (r.kind == ResolvedKind::Dict) {
                const auto& fields = r.attribute->fields;
                auto it = std::find_if(fields.begin(), fields.end(), [&](const AttributeDef& f) { return f.name == step.name; });
                if (it == fields.end()) path_error("unknown-attribute", path, "no field '" + step.name + "' in " + r.annotation_key);
                r.annotation_key += "." + step.name;
                r.footprint.push_back(r.entity + "." + r.annotation_key);
                set_attr(*it);
            } else {
                path_error("kind-mismatch", path, "cannot access '" + step.name + "' on " + r.describe());
            }
            continue;
        }
        // Selector steps: [*], [n], [id=v]
        if (entity_ctx) {
            if (step.kind == PathStep::Kind::Index) path_error("kind-mismatch", path, "entities are selected by id, not index");
            if (step.kind == PathStep::Kind::Id) r.many = false;
            if (step.kind == PathStep::Kind::All && !is_root) r.many = true;
            continue;
        }
        if (r.kind != ResolvedKind::Arry || r.element)
            path_error("kind-mismatch", path, "cannot index " + r.describe());
        const auto& item = *r.attribute->item;
        if (item.kind != AttrKind::Sval && item.kind != AttrKind::Pntr)
            path_error("kind-mismatch", path, "array items of this kind cannot be addressed");
        if (step.kind == PathStep::Kind::Id && item.kind != AttrKind::Pntr)
            path_error("kind-mismatch", path, "id selectors need an array of entity pointers");
        AttributeDef element;
        element.name = r.attribute->name;
        element.kind = item.kind;
        element.hint = item.hint;
        element.target = item.target;
        set_attr(element);
        r.element = true;
        if (step.kind == PathStep::Kind::All) r.many = true;
    }
    return r;
}

std::vector<Path> enumerate_paths(const Schema& schema) {
    std::vector<Path> out;
    std::function<void(const Path&, const AttributeDef&)> walk = [&](const Path& p, const AttributeDef& a) {
        out.push_back(p);
        if (a.kind == AttrKind::Dict)
            for (const auto& f : a.fields) walk(p.attr(f.name), f);
        if (a.kind == AttrKind::Arry && a.item && (a.item->kind == AttrKind::Sval || a.item->kind == AttrKind::Pntr))
            out.push_back(p.all());
    };
    for (const auto& [name, def] : schema.entities) {
        Path base(name);
        out.push_back(base);
        for (const auto& a : def.attributes) walk(base.attr(a.name), a);
    }
    return out;
}

SchemaDelta diff_schemas(const Schema& before, const Schema& after) {
    SchemaDelta delta;
    for (const auto& [name, def] : before.entities)
        if (!after.find(name)) delta.removed.push_back({name, def, std::nullopt, std::nullopt, 0});
    for (const auto& [name, def] : after.entities) {
        const auto* old = before.find(name);
        if (!old) {
            delta.added.push_back({name, def, std::nullopt, std::nullopt, 0});
            continue;
        }
        for (const auto& a : old->attributes)
            if (!def.find(a.name)) delta.removed.push_back({name + "." + a.name, std::nullopt, a, std::nullopt, 0});
        for (std::size_t i = 0; i < def.attributes.size(); ++i) {
            const auto& a = def.attributes[i];
            const auto* prev = old->find(a.name);
            if (!prev) delta.added.push_back({name + "." + a.name, std::nullopt, a, std::nullopt, i});
            else if (!(*prev == a)) delta.changed.push_back({name + "." + a.name, std::nullopt, a, *prev, i});
        }
    }
    if (before.root != after.root) delta.root = after.root;
    return delta;
}

Schema apply_delta(const Schema& schema, const SchemaDelta& delta) {
    Schema s = schema;
    auto split = [](const std::string& path) {
        auto dot = path.find('.');
        return std::pair{path.substr(0, dot), dot == std::string::npos ? std::string() : path.substr(dot + 1)};
    };
    for (const auto& c : delta.removed) {
        auto [entity, attr] = split(c.path);
        if (attr.empty()) {
            s.entities.erase(entity);
        } else if (auto it = s.entities.find(entity); it != s.entities.end()) {
            auto& attrs = it->second.attributes;
            attrs.erase(std::remove_if(attrs.begin(), attrs.end(), [&](const AttributeDef& a) { return a.name == attr; }), attrs.end());
        }
    }
    std::vector<const SchemaChange*> adds;
    for (const auto& c : delta.added) {
        auto [entity, attr] = split(c.path);
        if (attr.empty() && c.entity) s.entities[entity] = *c.entity;
        else if (c.attribute) adds.push_back(&c);
    }
    std::stable_sort(adds.begin(), adds.end(), [](auto* a, auto* b) { return a->position < b->position; });
    for (const auto* c : adds) {
        auto [entity, attr] = split(c->path);
        auto& attrs = s.entities[entity].attributes;
        auto pos = std::min(c->position, attrs.size());
        attrs.insert(attrs.begin() + static_cast<std::ptrdiff_t>(pos), *c->attribute);
    }
    for (const auto& c : delta.changed) {
        auto [entity, attr] = split(c.path);
        auto it = s.entities.find(entity);
        if (it == s.entities.end() || !c.attribute) continue;
        for (auto& a : it->second.attributes)
            if (a.name == attr) a = *c.attribute;
    }
    if (delta.root) s.root = *delta.root;
    return s;
}

Json to_json(const SchemaDelta& delta) {
    auto bucket = [](const std::vector<SchemaChange>& changes) {
        Json arr = Json::array();
        for (const auto& c : changes) {
            Json j = {{"path", c.path}};
            if (c.attribute) j["attribute"] = to_json(*c.attribute, c.position);
            if (c.before) j["before"] = to_json(*c.before, 0);
            if (c.entity) {
                Schema tmp;
                tmp.entities.emplace("X", *c.entity);
                j["entity"] = to_json(tmp)["entities"]["X"];
            }
            arr.push_back(j);
        }
        return arr;
    };
    Json j = {{"added", bucket(delta.added)}, {"removed", bucket(delta.removed)}, {"changed", bucket(delta.changed)}};
    if (delta.root) j["root"] = *delta.root;
    return j;
}

AnnotationSet default_annotations(const Schema& schema) {
    AnnotationSet out;
    for (const auto& [entity, def] : schema.entities) {
        auto pub = rule_public_identifier(def);
        for (const auto& a : def.attributes) annotate(schema, entity, a.name, a, pub && *pub == a.name, out);
    }
    return out;
}

void add_default_annotations(const Schema& schema, const std::string& entity, const AttributeDef& attribute,
                             AnnotationSet& out) {
    bool public_id = false;
    if ((attribute.name == "name" || attribute.name == "title") && attribute.kind == AttrKind::Sval &&
        attribute.hint == ScalarHint::Text)
        public_id = !public_identifier(schema, out, entity).has_value();
    annotate(schema, entity, attribute.name, attribute, public_id, out);
}

std::optional<std::string> public_identifier(const Schema& schema, const AnnotationSet& annotations,
                                             std::string_view entity) {
    const auto* def = schema.find(entity);
    if (!def) return std::nullopt;
    for (const auto& a : def->attributes) {
        const auto* ann = annotations.find(entity, a.name);
        if (ann && ann->function == Function::PublicIdentifier) return a.name;
    }
    return std::nullopt;
}

}  // namespace taskui
