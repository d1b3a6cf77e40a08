#include "taskui/ui/compiler.hpp"

#include <algorithm>
#include <cctype>

#include "taskui/core/schema_ops.hpp"
#include "taskui/expr/expression.hpp"

namespace taskui {

namespace {

const std::vector<std::string> kEntityAffordances = {"add-generate", "add-empty", "autocomplete"};

struct Ctx {
    const Schema& schema;
    const AnnotationSet& annotations;
    const DataSet& data;
    const ViewState& view;
};

Json json_list(const std::vector<std::string>& v) {
    Json a = Json::array();
    for (const auto& s : v) a.push_back(s);
    return a;
}

Render default_render(const AttributeDef& def) {
    if (def.kind == AttrKind::Arry) return Render::Expanded;
    if (def.kind == AttrKind::Sval && def.hint == ScalarHint::Number) return Render::Number;
    return Render::ShortText;
}

UINode field_node(const std::string& id, const Path& path, const AttributeDef& def, const Annotation* ann,
                  const Value& value, std::string_view key) {
    UINode n;
    n.id = id;
    n.type = "field";
    Render r = ann && ann->render ? *ann->render : default_render(def);
    n.props = {{"path", path.str()},
               {"attribute", std::string(key)},
               {"label", display_label(def.name)},
               {"widget", widget_name(r)},
               {"editable", ann ? ann->is_editable() : false},
               {"value", to_json(value)}};
    if (r == Render::Category && ann) n.props["categories"] = json_list(ann->categories);
    if (ann && ann->function == Function::PublicIdentifier) n.props["salient"] = true;
    return n;
}

std::vector<std::string> default_thumbnail(const Ctx& c, std::string_view entity) {
    if (auto pub = public_identifier(c.schema, c.annotations, entity)) return {*pub};
    if (const auto* def = c.schema.find(entity))
        for (const auto& a : def->attributes) {
            const auto* ann = c.annotations.find(entity, a.name);
            if (a.kind == AttrKind::Sval && !(ann && ann->is_hidden())) return {a.name};
        }
    return {};
}

// Thumbnail used where an entity is listed on its own (entity panels).
std::vector<std::string> entity_thumbnail(const Ctx& c, std::string_view entity) {
    std::vector<std::string> order;
    if (c.schema.find(c.schema.root)) order.push_back(c.schema.root);
    for (const auto& [name, def] : c.schema.entities)
        if (name != c.schema.root) order.push_back(name);
    for (const auto& owner : order) {
        for (const auto& a : c.schema.find(owner)->attributes) {
            std::optional<std::string> target = a.kind == AttrKind::Pntr ? a.target
                                                : a.is_entity_array()    ? a.item->target
                                                                         : std::nullopt;
            if (target != entity) continue;
            const auto* ann = c.annotations.find(owner, a.name);
            if (ann && !ann->thumbnail.empty()) return ann->thumbnail;
        }
    }
    return default_thumbnail(c, entity);
}

std::string object_title(const Ctx& c, const Instance& inst) {
    if (auto pub = public_identifier(c.schema, c.annotations, inst.entity))
        if (const Value* v = inst.find(*pub); v && !to_display(*v).empty()) return to_display(*v);
    return inst.id;
}

std::vector<UINode> thumbnail_fields(const Ctx& c, const Instance& inst, const std::vector<std::string>& names,
                                     const std::string& parent);

UINode link_node(const Ctx& c, const std::string& id, const Path& path, const AttributeDef& def, const Annotation* ann,
                 const Value& value, std::string_view key, bool with_thumbnail) {
    UINode n;
    n.id = id;
    n.type = "link";
    const Instance* target = value.is_ref() && !value.as_ref().is_null() ? c.data.find(value.as_ref().id) : nullptr;
    n.props = {{"path", path.str()},
               {"attribute", std::string(key)},
               {"label", display_label(def.name)},
               {"editable", ann ? ann->is_editable() : false},
               {"entity", def.target.value_or("")},
               {"object", target ? Json(target->id) : Json(nullptr)},
               {"detail", target ? Json("card:" + target->id) : Json(nullptr)}};
    if (target) {
        n.props["title"] = object_title(c, *target);
        if (with_thumbnail) {
            auto names = ann && !ann->thumbnail.empty() ? ann->thumbnail : default_thumbnail(c, target->entity);
            n.children = thumbnail_fields(c, *target, names, id);
        }
    }
    return n;
}

UINode count_button(const std::string& id, const Path& path, const AttributeDef& def, const Value& value,
                    std::string_view key) {
    std::size_t count = value.is_list() ? value.as_list().size() : 0;
    UINode n;
    n.id = id;
    n.type = "summary";
    n.props = {{"path", path.str()},
               {"attribute", std::string(key)},
               {"label", std::to_string(count) + " " + display_label(def.name)},
               {"count", count},
               {"value", count}};
    return n;
}

std::vector<UINode> thumbnail_fields(const Ctx& c, const Instance& inst, const std::vector<std::string>& names,
                                     const std::string& parent) {
    std::vector<UINode> out;
    Path base = instance_path(c.data, inst);
    for (const auto& name : names) {
        const auto* def = c.schema.find(inst.entity, name);
        if (!def) continue;
        const auto* ann = c.annotations.find(inst.entity, name);
        if (ann && ann->is_hidden()) continue;
        const Value* v = inst.find(name);
        Value value = v ? *v : Value();
        std::string id = parent + "/" + name;
        if (def->kind == AttrKind::Pntr) out.push_back(link_node(c, id, base.attr(name), *def, ann, value, name, false));
        else if (def->kind == AttrKind::Arry) out.push_back(count_button(id, base.attr(name), *def, value, name));
        else if (def->kind == AttrKind::Sval) out.push_back(field_node(id, base.attr(name), *def, ann, value, name));
    }
    return out;
}

UINode item_node(const Ctx& c, const Instance& inst, const std::vector<std::string>& thumb, const std::string& parent) {
    UINode n;
    n.id = parent + "/" + inst.id;
    n.type = "item";
    n.props = {{"object", inst.id}, {"entity", inst.entity}, {"detail", "card:" + inst.id}, {"title", object_title(c, inst)}};
    n.children = thumbnail_fields(c, inst, thumb, n.id);
    return n;
}

bool keep_item(const Ctx& c, const Expression* filter, const Value& item) {
    if (!filter) return true;
    try {
        EvalBudget b;
        Bindings bind{{"item", item}};
        Value r = evaluate(*filter, bind, b, [&](const ObjectId& id) -> const Value::Dict* {
            const auto* inst = c.data.find(id);
            return inst ? &inst->values : nullptr;
        });
        return r.is_bool() ? r.as_bool() : true;
    } catch (const Error&) {
        return true;
    }
}

int sort_rank(const Value& v) { return v.is_number() ? 0 : v.is_text() && !v.as_text().empty() ? 1 : v.is_empty() || v.is_text() ? 3 : 2; }

bool value_less(const Value& a, const Value& b) {
    int ra = sort_rank(a), rb = sort_rank(b);
    if (ra != rb) return ra < rb;
    if (ra == 0) return a.as_number() < b.as_number();
    if (ra == 1) return a.as_text() < b.as_text();
    return to_display(a) < to_display(b);
}

void apply_sort(std::vector<const Instance*>& items, const SortSpec& s) {
    std::stable_sort(items.begin(), items.end(), [&](const Instance* x, const Instance* y) {
        const Value* a = x->find(s.field);
        const Value* b = y->find(s.field);
        Value va = a ? *a : Value(), vb = b ? *b : Value();
        bool ea = sort_rank(va) == 3, eb = sort_rank(vb) == 3;
        if (ea || eb) return !ea && eb;
        return s.descending ? value_less(vb, va) : value_less(va, vb);
    });
}

// Instance items of a collection, after filter and sort.
std::vector<const Instance*> view_items(const Ctx& c, std::vector<const Instance*> items, const CollectionView* cv) {
    if (!cv) return items;
    if (cv->filter) {
        std::optional<Expression> expr;
        try {
            expr = Expression::parse(*cv->filter);
        } catch (const Error&) {
        }
        if (expr) {
            std::vector<const Instance*> kept;
            for (const auto* i : items)
                if (keep_item(c, &*expr, Value(Ref{i->id}))) kept.push_back(i);
            items = std::move(kept);
        }
    }
    if (cv->sort) apply_sort(items, *cv->sort);
    return items;
}

std::vector<UINode> item_nodes(const Ctx& c, const std::vector<const Instance*>& items,
                               const std::vector<std::string>& thumb, const std::string& parent,
                               const CollectionView* cv) {
    std::vector<UINode> out;
    if (!cv || cv->clusters.empty()) {
        for (const auto* i : items) out.push_back(item_node(c, *i, thumb, parent));
        return out;
    }
    std::set<ObjectId> placed;
    auto group = [&](const std::string& label, auto&& member) {
        UINode g;
        g.id = parent + "/group:" + label;
        g.type = "group";
        g.props = {{"label", label}};
        for (const auto* i : items)
            if (member(i->id)) {
                g.children.push_back(item_node(c, *i, thumb, g.id));
                placed.insert(i->id);
            }
        g.props["count"] = g.children.size();
        out.push_back(std::move(g));
    };
    for (const auto& cl : cv->clusters)
        group(cl.label, [&](const ObjectId& id) {
            return !placed.count(id) && std::find(cl.members.begin(), cl.members.end(), id) != cl.members.end();
        });
    bool rest = std::any_of(items.begin(), items.end(), [&](const Instance* i) { return !placed.count(i->id); });
    if (rest) group("Other", [&](const ObjectId& id) { return !placed.count(id); });
    return out;
}

const CollectionView* collection_view(const Ctx& c, const std::string& key) {
    auto it = c.view.collections.find(key);
    return it == c.view.collections.end() ? nullptr : &it->second;
}

UINode collection_node(const Ctx& c, const std::string& id, const Path& path, const std::string& entity,
                       const AttributeDef& def, const Annotation* ann, const Value& value, std::string_view key) {
    UINode n;
    n.id = id;
    n.type = "collection";
    bool summary = ann && ann->render == Render::Summary;
    bool editable = ann ? ann->is_editable() : false;
    std::vector<std::string> affordances;
    if (editable) affordances = def.is_entity_array() ? kEntityAffordances : std::vector<std::string>{"add-empty"};
    n.props = {{"path", path.str()},
               {"attribute", std::string(key)},
               {"label", display_label(def.name)},
               {"mode", summary ? "summary" : "expanded"},
               {"editable", editable},
               {"affordances", json_list(affordances)}};
    const auto& list = value.is_list() ? value.as_list() : Value::List{};
    if (def.is_entity_array()) {
        n.props["entity"] = *def.item->target;
        std::vector<const Instance*> items;
        for (const auto& e : list)
            if (e.is_ref())
                if (const auto* inst = c.data.find(e.as_ref().id)) items.push_back(inst);
        if (summary && ann->summary) {
            UINode s;
            s.id = id + "/summary";
            s.type = "summary";
            Value v;
            try {
                v = compute_summary(*ann->summary, items, c.data);
            } catch (const Error& e) {
                s.props["error"] = e.what();
            }
            s.props["label"] = ann->summary->label;
            s.props["operation"] = to_string(ann->summary->operation);
            s.props["field"] = ann->summary->field;
            s.props["count"] = items.size();
            s.props["value"] = to_json(v);
            s.props["path"] = path.str();
            n.children.push_back(std::move(s));
            return n;
        }
        const auto* cv = collection_view(c, entity + "." + std::string(key));
        auto thumb = ann && !ann->thumbnail.empty() ? ann->thumbnail : default_thumbnail(c, *def.item->target);
        n.children = item_nodes(c, view_items(c, items, cv), thumb, id, cv);
        return n;
    }
    // Arrays of single values.
    Render r = ann && ann->item_render ? *ann->item_render
               : def.item && def.item->hint == ScalarHint::Number ? Render::Number
                                                                   : Render::ShortText;
    const auto* cv = collection_view(c, entity + "." + std::string(key));
    std::optional<Expression> filter;
    if (cv && cv->filter) {
        try {
            filter = Expression::parse(*cv->filter);
        } catch (const Error&) {
        }
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (filter && !keep_item(c, &*filter, list[i])) continue;
        UINode item;
        item.id = id + "/" + std::to_string(i);
        item.type = "item";
        item.props = {{"path", path.at(i).str()}, {"value", to_json(list[i])}, {"widget", widget_name(r)}, {"editable", editable}};
        n.children.push_back(std::move(item));
    }
    return n;
}

std::optional<UINode> attribute_node(const Ctx& c, const Instance& inst, const Path& base, const AttributeDef& def,
                                     const std::string& key, const Value& value, const std::string& parent) {
    const auto* ann = c.annotations.find(inst.entity, key);
    if (ann && ann->is_hidden()) return std::nullopt;
    std::string id = parent + "/" + key;
    switch (def.kind) {
        case AttrKind::Sval: return field_node(id, base, def, ann, value, key);
        case AttrKind::Pntr: return link_node(c, id, base, def, ann, value, key, true);
        case AttrKind::Arry: return collection_node(c, id, base, inst.entity, def, ann, value, key);
        case AttrKind::Dict: {
            UINode g;
            g.id = id;
            g.type = "group";
            g.props = {{"path", base.str()}, {"attribute", key}, {"label", display_label(def.name)}};
            for (const auto& f : def.fields) {
                const Value* fv = value.find(f.name);
                if (auto n = attribute_node(c, inst, base.attr(f.name), f, key + "." + f.name, fv ? *fv : Value(), parent))
                    g.children.push_back(std::move(*n));
            }
            return g;
        }
    }
    return std::nullopt;
}

std::vector<UINode> instance_children(const Ctx& c, const Instance& inst, const std::string& parent, bool salient_first) {
    std::vector<UINode> out;
    const auto* def = c.schema.find(inst.entity);
    if (!def) return out;
    Path base = instance_path(c.data, inst);
    std::vector<const AttributeDef*> attrs;
    for (const auto& a : def->attributes) attrs.push_back(&a);
    if (salient_first)
        if (auto pub = public_identifier(c.schema, c.annotations, inst.entity))
            std::stable_partition(attrs.begin(), attrs.end(), [&](const AttributeDef* a) { return a->name == *pub; });
    for (const auto* a : attrs) {
        const Value* v = inst.find(a->name);
        if (auto n = attribute_node(c, inst, base.attr(a->name), *a, a->name, v ? *v : Value(), parent))
            out.push_back(std::move(*n));
    }
    return out;
}

std::optional<std::string> location_attribute(const Schema& schema, const AnnotationSet& annotations,
                                              std::string_view entity) {
    const auto* def = schema.find(entity);
    if (!def) return std::nullopt;
    for (const auto& a : def->attributes) {
        const auto* ann = annotations.find(entity, a.name);
        if (a.kind == AttrKind::Sval && ann && ann->render == Render::Location) return a.name;
    }
    return std::nullopt;
}

bool truthy_keep(const Value& r) { return r.is_bool() && r.as_bool(); }

}  // namespace

const PanelView* ViewState::find_panel(std::string_view entity) const {
    for (const auto& p : panels)
        if (p.entity == entity) return &p;
    return nullptr;
}

Json to_json(const ViewState& v) {
    Json panels = Json::array(), cards = Json::array(), cols = Json::object();
    for (const auto& p : v.panels) panels.push_back({{"entity", p.entity}, {"representation", p.representation}});
    for (const auto& cd : v.cards) cards.push_back({{"object", cd.object}, {"mode", cd.mode}});
    for (const auto& [k, cv] : v.collections) {
        Json j = Json::object();
        if (cv.filter) j["filter"] = *cv.filter;
        if (cv.sort) j["sort"] = {{"field", cv.sort->field}, {"descending", cv.sort->descending}};
        if (!cv.clusters.empty()) {
            Json cl = Json::array();
            for (const auto& c : cv.clusters) cl.push_back({{"label", c.label}, {"members", json_list(c.members)}});
            j["clusters"] = cl;
        }
        cols[k] = j;
    }
    return {{"panels", panels}, {"cards", cards}, {"collections", cols}, {"focus", v.focus ? Json(*v.focus) : Json(nullptr)}};
}

ViewState view_from_json(const Json& j) {
    ViewState v;
    if (!j.is_object()) return v;
    if (j.contains("panels"))
        for (const auto& p : j["panels"]) v.panels.push_back({p.at("entity").get<std::string>(), p.value("representation", "list")});
    if (j.contains("cards"))
        for (const auto& cd : j["cards"]) v.cards.push_back({cd.at("object").get<std::string>(), cd.value("mode", "floating")});
    if (j.contains("collections"))
        for (const auto& [k, cj] : j["collections"].items()) {
            CollectionView cv;
            if (cj.contains("filter") && cj["filter"].is_string()) cv.filter = cj["filter"].get<std::string>();
            if (cj.contains("sort") && cj["sort"].is_object())
                cv.sort = SortSpec{cj["sort"].at("field").get<std::string>(), cj["sort"].value("descending", false)};
            if (cj.contains("clusters"))
                for (const auto& cl : cj["clusters"])
                    cv.clusters.push_back({cl.at("label").get<std::string>(), cl.at("members").get<std::vector<std::string>>()});
            v.collections[k] = cv;
        }
    if (j.contains("focus") && j["focus"].is_string()) v.focus = j["focus"].get<std::string>();
    return v;
}

std::string widget_name(Render r) { return to_string(r); }

std::string display_label(std::string_view name) {
    std::string out;
    bool start = true;
    for (char ch : name) {
        if (ch == '_' || ch == ' ') {
            if (!out.empty() && out.back() != ' ') out += ' ';
            start = true;
            continue;
        }
        auto u = static_cast<unsigned char>(ch);
        out += static_cast<char>(start ? std::toupper(u) : std::tolower(u));
        start = false;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

Value compute_summary(const SummarySpec& spec, const std::vector<const Instance*>& items, const DataSet& data) {
    auto field_of = [&](const Instance* i) {
        const Value* v = i->find(spec.field);
        return v ? *v : Value();
    };
    std::optional<Expression> pred;
    if (spec.predicate) pred = Expression::parse(*spec.predicate);
    auto matches = [&](const Instance* i) {
        if (!pred) return true;
        EvalBudget b;
        Bindings bind{{"item", Value(Ref{i->id})}};
        return truthy_keep(evaluate(*pred, bind, b, [&](const ObjectId& id) -> const Value::Dict* {
            const auto* inst = data.find(id);
            return inst ? &inst->values : nullptr;
        }));
    };
    switch (spec.operation) {
        case SummaryOp::Count: {
            double n = 0;
            for (const auto* i : items)
                if (matches(i)) ++n;
            return Value(n);
        }
        case SummaryOp::Filter: {
            Value::List out;
            for (const auto* i : items) {
                bool keep = pred ? matches(i) : !field_of(i).is_empty() && !(field_of(i).is_bool() && !field_of(i).as_bool());
                if (keep) out.push_back(Value(Ref{i->id}));
            }
            return Value(std::move(out));
        }
        default: break;
    }
    std::vector<double> xs;
    for (const auto* i : items) {
        Value v = field_of(i);
        if (v.is_empty()) continue;
        if (!v.is_number())
            throw Error("type-error", to_string(spec.operation) + " over non-numeric field '" + spec.field + "'");
        xs.push_back(v.as_number());
    }
    if (spec.operation == SummaryOp::Sum) {
        double s = 0;
        for (double x : xs) s += x;
        return Value(s);
    }
    if (xs.empty()) return Value();
    if (spec.operation == SummaryOp::Avg) {
        double s = 0;
        for (double x : xs) s += x;
        return Value(s / static_cast<double>(xs.size()));
    }
    return Value(spec.operation == SummaryOp::Min ? *std::min_element(xs.begin(), xs.end())
                                                  : *std::max_element(xs.begin(), xs.end()));
}

std::vector<std::string> valid_representations(const Schema& schema, const AnnotationSet& annotations,
                                               std::string_view entity) {
    std::vector<std::string> out{"list", "table"};
    if (location_attribute(schema, annotations, entity)) out.push_back("map");
    return out;
}

std::string choose_representation(const Schema& schema, const AnnotationSet& annotations, std::string_view entity,
                                  std::string_view context) {
    std::string ctx(context);
    std::transform(ctx.begin(), ctx.end(), ctx.begin(), [](unsigned char ch) { return std::tolower(ch); });
    static const char* place_words[] = {"route", "routing", "map", "place", "store", "shop", "trip", "nearby",
                                        "location", "where", "visit", "directions", "travel", "distance", "drive", "walk"};
    if (location_attribute(schema, annotations, entity))
        for (const char* w : place_words)
            if (ctx.find(w) != std::string::npos) return "map";
    const auto* def = schema.find(entity);
    std::size_t scalars = 0;
    if (def)
        for (const auto& a : def->attributes) {
            const auto* ann = annotations.find(entity, a.name);
            if (a.kind == AttrKind::Sval && !(ann && ann->is_hidden())) ++scalars;
        }
    return scalars > 4 ? "table" : "list";
}

UINode compile_home_panel(const Schema& schema, const AnnotationSet& annotations, const DataSet& data,
                          const ViewState& view) {
    Ctx c{schema, annotations, data, view};
    UINode n;
    n.id = "home";
    n.type = "panel";
    n.props = {{"kind", "home"}, {"entity", schema.root}, {"title", display_label(schema.root)}, {"representation", "list"}};
    if (const auto* root = data.find(data.root)) n.children = instance_children(c, *root, n.id, false);
    return n;
}

UINode compile_entity_panel(const Schema& schema, const AnnotationSet& annotations, const DataSet& data,
                            const std::string& entity, const std::string& representation, const ViewState& view) {
    if (!schema.find(entity)) throw Error("unknown-entity", "no entity '" + entity + "'", {{"entity", entity}});
    auto valid = valid_representations(schema, annotations, entity);
    if (std::find(valid.begin(), valid.end(), representation) == valid.end())
        throw Error("representation-unsupported", "'" + representation + "' is not available for " + entity,
                    {{"entity", entity}, {"representation", representation}});
    Ctx c{schema, annotations, data, view};
    UINode n;
    n.id = "panel:" + entity;
    n.type = "panel";
    n.props = {{"kind", "entity"},
               {"entity", entity},
               {"title", display_label(entity)},
               {"representation", representation},
               {"representations", json_list(valid)},
               {"affordances", json_list(kEntityAffordances)}};
    const auto* cv = collection_view(c, entity);
    auto items = view_items(c, data.of_entity(entity), cv);
    if (representation == "list") {
        UINode coll;
        coll.id = n.id + "/items";
        coll.type = "collection";
        coll.props = {{"path", entity}, {"label", display_label(entity)}, {"mode", "expanded"}, {"entity", entity},
                      {"editable", true}, {"affordances", json_list(kEntityAffordances)}};
        coll.children = item_nodes(c, items, entity_thumbnail(c, entity), coll.id, cv);
        n.children.push_back(std::move(coll));
    } else if (representation == "table") {
        UINode table;
        table.id = n.id + "/table";
        table.type = "table";
        Json cols = Json::array();
        const auto& attrs = schema.find(entity)->attributes;
        std::vector<const AttributeDef*> shown;
        for (const auto& a : attrs) {
            const auto* ann = annotations.find(entity, a.name);
            if (ann && ann->is_hidden()) continue;
            shown.push_back(&a);
            std::string widget = a.kind == AttrKind::Sval ? widget_name(ann && ann->render ? *ann->render : default_render(a))
                                 : a.kind == AttrKind::Pntr ? "link"
                                 : a.kind == AttrKind::Arry ? "summary"
                                                            : "group";
            cols.push_back({{"attribute", a.name}, {"label", display_label(a.name)}, {"widget", widget}});
        }
        table.props = {{"path", entity}, {"columns", cols}};
        for (const auto* inst : items) {
            UINode row;
            row.id = table.id + "/" + inst->id;
            row.type = "row";
            row.props = {{"object", inst->id}, {"detail", "card:" + inst->id}};
            Path base = instance_path(data, *inst);
            for (const auto* a : shown) {
                const Value* v = inst->find(a->name);
                Value value = v ? *v : Value();
                std::string id = row.id + "/" + a->name;
                if (a->kind == AttrKind::Arry) {
                    row.children.push_back(count_button(id, base.attr(a->name), *a, value, a->name));
                } else if (auto cell = attribute_node(c, *inst, base.attr(a->name), *a, a->name, value, row.id)) {
                    row.children.push_back(std::move(*cell));
                }
            }
            table.children.push_back(std::move(row));
        }
        n.children.push_back(std::move(table));
    } else {
        auto loc = *location_attribute(schema, annotations, entity);
        UINode map;
        map.id = n.id + "/map";
        map.type = "map";
        map.props = {{"path", entity}, {"location_attribute", loc}};
        for (const auto* inst : items) {
            UINode m;
            m.id = map.id + "/" + inst->id;
            m.type = "marker";
            const Value* v = inst->find(loc);
            m.props = {{"object", inst->id},
                       {"label", object_title(c, *inst)},
                       {"location", v ? to_display(*v) : std::string()},
                       {"detail", "card:" + inst->id}};
            map.children.push_back(std::move(m));
        }
        n.children.push_back(std::move(map));
    }
    return n;
}

UINode compile_card(const Schema& schema, const AnnotationSet& annotations, const DataSet& data, const ObjectId& id,
                    const std::string& mode) {
    const Instance* inst = data.find(id);
    if (!inst) throw Error("unknown-id", "no instance '" + id + "'", {{"id", id}});
    ViewState none;
    Ctx c{schema, annotations, data, none};
    UINode n;
    n.id = "card:" + id;
    n.type = "card";
    n.props = {{"object", id}, {"entity", inst->entity}, {"mode", mode}, {"title", object_title(c, *inst)}};
    n.children = instance_children(c, *inst, n.id, true);
    return n;
}

UIDocument compile_document(const Schema& schema, const AnnotationSet& annotations, const DataSet& data,
                            const ViewState& view) {
    UIDocument doc;
    doc.panels.push_back(compile_home_panel(schema, annotations, data, view));
    for (const auto& p : view.panels) {
        if (!schema.find(p.entity)) continue;
        auto valid = valid_representations(schema, annotations, p.entity);
        std::string rep = std::find(valid.begin(), valid.end(), p.representation) != valid.end() ? p.representation : "list";
        doc.panels.push_back(compile_entity_panel(schema, annotations, data, p.entity, rep, view));
    }
    for (const auto& cd : view.cards)
        if (data.find(cd.object)) doc.panels.push_back(compile_card(schema, annotations, data, cd.object, cd.mode));
    doc.focus = view.focus;
    return doc;
}

}  // namespace taskui
