#include "taskui/llm/gateway.hpp"

#include <algorithm>
#include <charconv>
#include <future>
#include <regex>
#include <set>

#include "taskui/core/combined.hpp"
#include "taskui/core/schema_ops.hpp"
#include "taskui/llm/repair.hpp"

namespace taskui {

namespace {

Json plain(const OrderedJson& j) { return Json::parse(j.dump()); }

Json values_json(const Value::Dict& values, bool with_id = true) {
    Json out = Json::object();
    for (const auto& [k, v] : values)
        if (with_id || k != "id") out[k] = to_json(v);
    return out;
}

bool blank(const Value& v) {
    return v.is_empty() || (v.is_text() && v.as_text().empty()) || (v.is_list() && v.as_list().empty()) ||
           (v.is_ref() && v.as_ref().is_null());
}

std::optional<double> number_in(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return std::nullopt;
    std::string t = s.substr(b, e - b + 1);
    try {
        std::size_t used = 0;
        double d = std::stod(t, &used);
        if (used == t.size()) return d;
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

// Decodes a generated value, turning numeric strings into numbers where a number is expected.
Value decode(const AttributeDef& def, const Json& j) {
    if (def.kind == AttrKind::Sval && def.hint == ScalarHint::Number && j.is_string())
        if (auto d = number_in(j.get<std::string>())) return Value(*d);
    if (def.kind == AttrKind::Arry && def.item && def.item->kind == AttrKind::Sval && def.item->hint == ScalarHint::Number &&
        j.is_array()) {
        Value::List l;
        for (const auto& e : j) {
            auto d = e.is_string() ? number_in(e.get<std::string>()) : std::nullopt;
            l.push_back(d ? Value(*d) : value_from_json(e));
        }
        return Value(std::move(l));
    }
    return value_from_json(def, j);
}

// Drops references to missing instances; reports whether anything was dropped.
Value drop_dangling(const DataSet& data, const AttributeDef& def, const Value& v, bool& dropped) {
    if (def.kind == AttrKind::Pntr && v.is_ref() && !v.as_ref().is_null() && !data.find(v.as_ref().id)) {
        dropped = true;
        return Value(Ref::null());
    }
    if (def.is_entity_array() && v.is_list()) {
        Value::List l;
        for (const auto& e : v.as_list()) {
            if (e.is_ref() && !data.find(e.as_ref().id)) {
                dropped = true;
                continue;
            }
            l.push_back(e);
        }
        return Value(std::move(l));
    }
    return v;
}

// Fills missing attributes, drops unknown ones and dangling references, and
// clears values of the wrong kind. Returns notes for each repair.
std::vector<std::string> conform_data(const Schema& schema, DataSet& data) {
    std::vector<std::string> notes;
    for (auto it = data.instances.begin(); it != data.instances.end();) {
        if (!schema.find(it->second.entity)) {
            notes.push_back("dropped " + it->first + ": unknown entity " + it->second.entity);
            it = data.instances.erase(it);
        } else {
            ++it;
        }
    }
    for (auto& [id, inst] : data.instances) {
        const auto* edef = schema.find(inst.entity);
        for (auto vit = inst.values.begin(); vit != inst.values.end();) {
            if (!edef->find(vit->first)) {
                notes.push_back("dropped " + id + "." + vit->first + ": not in the schema");
                vit = inst.values.erase(vit);
            } else {
                ++vit;
            }
        }
        for (const auto& a : edef->attributes) {
            auto vit = inst.values.find(a.name);
            if (vit == inst.values.end()) {
                inst.values[a.name] = a.name == "id" && a.kind == AttrKind::Sval ? Value(id) : empty_value(a);
                continue;
            }
            bool dropped = false;
            vit->second = drop_dangling(data, a, vit->second, dropped);
            if (dropped) notes.push_back("dropped missing references in " + id + "." + a.name);
            if (auto rule = check_value(schema, data, a, vit->second)) {
                notes.push_back("cleared " + id + "." + a.name + ": " + *rule);
                vit->second = empty_value(a);
            }
        }
    }
    return notes;
}

// Generated labels with gaps filled from the rule-based defaults.
Annotation fill_labels(const Annotation& given, const Annotation& fallback) {
    Annotation a = given;
    if (!a.function) a.function = fallback.function;
    if (!a.render) a.render = fallback.render;
    if (!a.editable) a.editable = fallback.editable;
    if (a.thumbnail.empty()) a.thumbnail = fallback.thumbnail;
    if (!a.item_render) a.item_render = fallback.item_render;
    if (a.render == Render::Summary && !a.summary) a.render = fallback.render;
    return a;
}

// Repairs an annotation set against the schema: gaps from defaults, then any
// attribute (or entity) still reported falls back to defaults entirely.
AnnotationSet settle_annotations(const Schema& schema, const AnnotationSet& given, std::vector<std::string>& notes) {
    auto defaults = default_annotations(schema);
    AnnotationSet out;
    for (const auto& [entity, keys] : defaults.entities)
        for (const auto& [key, fallback] : keys) {
            const auto* g = given.find(entity, key);
            out.set(entity, key, g ? fill_labels(*g, fallback) : fallback);
        }
    for (int round = 0; round < 2; ++round) {
        auto report = validate_annotations(schema, out);
        if (report.ok()) return out;
        for (const auto& issue : report.issues()) {
            auto dot = issue.path.find('.');
            std::string entity = issue.path.substr(0, dot);
            if (!defaults.entities.count(entity)) continue;
            if (dot == std::string::npos || round == 1) {
                out.entities[entity] = defaults.entities[entity];
                notes.push_back("labels of " + entity + " replaced by defaults (" + issue.rule + ")");
            } else {
                std::string key = issue.path.substr(dot + 1);
                if (const auto* d = defaults.find(entity, key)) {
                    out.set(entity, key, *d);
                    notes.push_back("labels of " + issue.path + " replaced by defaults (" + issue.rule + ")");
                }
            }
        }
    }
    auto report = validate_annotations(schema, out);
    if (!report.ok()) throw Error("annotation-invalid", "generated labels are not usable", {{"issues", report.to_json()}});
    return out;
}

// Overlays generated labels onto the type-only combined document.
OrderedJson overlay_labels(OrderedJson types, const Json& labels) {
    for (auto eit = types.begin(); eit != types.end(); ++eit) {
        if (!labels.contains(eit.key()) || !labels[eit.key()].is_object()) continue;
        const auto& el = labels[eit.key()];
        for (auto ait = eit.value().begin(); ait != eit.value().end(); ++ait) {
            if (!el.contains(ait.key()) || !el[ait.key()].is_object()) continue;
            auto& body = ait.value();
            for (const auto& [k, v] : el[ait.key()].items()) {
                if (k == "type") continue;
                if (k == "fields" && body.contains("fields")) {
                    Json sub = {{"_", v}};
                    OrderedJson wrapped;
                    wrapped["_"] = body["fields"];
                    body["fields"] = overlay_labels(wrapped, sub)["_"];
                    continue;
                }
                if (k == "item" && body.contains("item") && v.is_object()) {
                    for (const auto& [ik, iv] : v.items())
                        if (ik != "type") body["item"][ik] = OrderedJson::parse(iv.dump());
                    continue;
                }
                body[k] = OrderedJson::parse(v.dump());
            }
        }
    }
    return types;
}

std::vector<std::string> graph_notes(const Schema& schema, std::vector<Dependency>& deps) {
    std::vector<std::string> notes;
    std::vector<Dependency> kept;
    for (const auto& d : deps) {
        try {
            (void)build_graph(schema, {d});
            kept.push_back(d);
        } catch (const Error& e) {
            if (e.code() == "cycle-detected") throw;
            notes.push_back("dropped dependency " + d.source.str() + " -> " + d.target.str() + ": " + e.what());
        }
    }
    deps = std::move(kept);
    return notes;
}

}  // namespace

Json normalize_generated_data(const Schema& schema, const Json& raw) {
    Json in = raw;
    if (in.is_object() && in.contains("instances") && in["instances"].is_array()) {
        Json obj = Json::object();
        std::size_t n = 0;
        for (const auto& e : in["instances"]) {
            if (!e.is_object()) throw Error("data-syntax", "instances must be objects");
            std::string id = e.contains("id") && e["id"].is_string() ? e["id"].get<std::string>() : "_" + std::to_string(n);
            obj[id] = e;
            ++n;
        }
        in["instances"] = obj;
    }
    if (!in.is_object() || !in.contains("instances") || !in["instances"].is_object())
        throw Error("data-syntax", "data document needs an 'instances' object");

    static const std::regex well_formed("^([A-Z][A-Z0-9_]*)-([1-9][0-9]*)$");
    std::map<std::string, std::string> rename;
    std::map<std::string, std::set<long>> used;
    for (const auto& [id, inst] : in["instances"].items()) {
        std::smatch m;
        std::string entity = inst.value("entity", "");
        if (std::regex_match(id, m, well_formed) && m[1] == entity) used[entity].insert(std::stol(m[2]));
    }
    for (const auto& [id, inst] : in["instances"].items()) {
        std::smatch m;
        std::string entity = inst.value("entity", "");
        if (std::regex_match(id, m, well_formed) && m[1] == entity) continue;
        long next = used[entity].empty() ? 1 : *used[entity].rbegin() + 1;
        used[entity].insert(next);
        rename[id] = entity + "-" + std::to_string(next);
    }
    auto mapped = [&](const Json& v) -> Json {
        if (!v.is_string()) return v;
        auto it = rename.find(v.get<std::string>());
        return it == rename.end() ? v : Json(it->second);
    };

    Json out = {{"instances", Json::object()}};
    for (const auto& [id, inst] : in["instances"].items()) {
        std::string nid = rename.count(id) ? rename[id] : id;
        Json ni = inst;
        const auto* edef = schema.find(inst.value("entity", ""));
        if (edef && ni.contains("values") && ni["values"].is_object()) {
            for (const auto& a : edef->attributes) {
                if (!ni["values"].contains(a.name)) continue;
                auto& v = ni["values"][a.name];
                if (a.kind == AttrKind::Pntr) v = mapped(v);
                if (a.is_entity_array() && v.is_array())
                    for (auto& e : v) e = mapped(e);
            }
        }
        if (edef && edef->find("id")) {
            if (!ni.contains("values") || !ni["values"].is_object()) ni["values"] = Json::object();
            ni["values"]["id"] = nid;
        }
        out["instances"][nid] = ni;
    }
    std::string root = in.contains("root") && in["root"].is_string() ? mapped(in["root"]).get<std::string>() : "";
    if (root.empty() || !out["instances"].contains(root)) {
        root.clear();
        long best = 0;
        for (const auto& [id, inst] : out["instances"].items()) {
            std::smatch m;
            if (inst.value("entity", "") != schema.root || !std::regex_match(id, m, well_formed)) continue;
            long n = std::stol(m[2]);
            if (root.empty() || n < best) root = id, best = n;
        }
    }
    out["root"] = root;
    return out;
}

Json session_context(const Session& s) {
    return {{"prompts", s.prompts}, {"model", plain(to_combined_json(s.schema, s.annotations))}, {"data", to_json(s.data)}};
}

Session to_session(const GeneratedModel& m, const std::string& prompt) {
    Session s;
    s.schema = m.schema;
    s.annotations = m.annotations;
    s.dependencies = m.dependencies;
    s.data = m.data;
    s.prompts = {prompt};
    return s;
}

template <class T, class F>
T Gateway::request(RequestKind kind, Json payload, const Json& context, const std::string& shape, F&& accept,
                   std::vector<std::string>* notes) {
    Json attempts = Json::array();
    const int tries = 1 + (provider_->live() ? std::max(0, options_.max_reasks) : 0);
    for (int attempt = 0; attempt < tries; ++attempt) {
        ProviderRequest r{kind, context, payload};
        std::string raw = provider_->complete(r);
        try {
            auto parsed = repair_json(raw, shape);
            T out = accept(parsed);
            if (notes && !parsed.steps.empty()) notes->push_back(to_string(kind) + " response repaired");
            return out;
        } catch (const Error& e) {
            if (e.code() == "provider-unavailable" || e.code() == "fixture-miss") throw;
            attempts.push_back(e.to_json());
            payload["repair"] = {{"previous", raw.substr(0, 4000)}, {"problems", e.to_json()}};
        } catch (const std::exception& e) {
            attempts.push_back({{"code", "malformed"}, {"message", e.what()}});
            payload["repair"] = {{"previous", raw.substr(0, 4000)}, {"problems", e.what()}};
        }
    }
    throw Error("irreparable-response", to_string(kind) + " response unusable after " + std::to_string(tries) + " attempt(s)",
                {{"kind", to_string(kind)}, {"attempts", attempts}});
}

GeneratedModel Gateway::generate_model(const std::string& prompt, const Json& context) {
    if (prompt.find_first_not_of(" \t\r\n") == std::string::npos) throw Error("payload-mismatch", "prompt is empty");
    GeneratedModel m;

    struct SchemaPart {
        ModelSpec spec;
    };
    auto part = request<SchemaPart>(
        RequestKind::GenSchema, {{"prompt", prompt}}, context, "object",
        [](const RepairOutcome& r) {
            OrderedJson doc = OrderedJson::parse(r.text);
            std::optional<std::string> root;
            if (doc.contains("entities") && doc["entities"].is_object()) {
                if (doc.contains("root") && doc["root"].is_string()) root = doc["root"].get<std::string>();
                doc = OrderedJson(doc["entities"]);
            }
            auto spec = combined_from_json(doc, root);
            auto report = validate_schema(spec.schema);
            if (!report.ok()) throw Error("schema-invalid", "generated schema is not valid", {{"issues", report.to_json()}});
            return SchemaPart{spec};
        },
        &m.notes);
    m.schema = part.spec.schema;
    const Schema schema = m.schema;
    const OrderedJson types = to_combined_json(schema, {});
    const Json base = {{"prompt", prompt}, {"schema", plain(types)}, {"root", schema.root}};

    auto deps_job = std::async(std::launch::async, [&, base] {
        std::vector<std::string> notes;
        auto deps = request<std::vector<Dependency>>(
            RequestKind::GenDependencies, base, context, "any",
            [&](const RepairOutcome& r) {
                Json list = r.value.is_object() ? r.value.value("dependencies", Json::array()) : r.value;
                if (!list.is_array()) throw Error("dependency-syntax", "expected a list of dependencies");
                std::vector<Dependency> out;
                for (const auto& d : list) {
                    try {
                        out.push_back(dependency_from_json(d));
                    } catch (const Error& e) {
                        notes.push_back(std::string("dropped dependency: ") + e.what());
                    }
                }
                auto dropped = graph_notes(schema, out);
                notes.insert(notes.end(), dropped.begin(), dropped.end());
                (void)build_graph(schema, out);
                return out;
            },
            &notes);
        return std::make_pair(deps, notes);
    });
    auto labels_job = std::async(std::launch::async, [&, base] {
        std::vector<std::string> notes;
        auto labels = request<AnnotationSet>(
            RequestKind::GenAnnotations, base, context, "object",
            [&](const RepairOutcome& r) {
                Json given = r.value.contains("annotations") && r.value["annotations"].is_object() ? r.value["annotations"] : r.value;
                auto spec = combined_from_json(overlay_labels(types, given), schema.root);
                // labels that came with the schema count when the label step leaves a gap
                for (const auto& [entity, keys] : part.spec.annotations.entities)
                    for (const auto& [key, a] : keys)
                        if (const auto* g = spec.annotations.find(entity, key); g && *g == Annotation{}) spec.annotations.set(entity, key, a);
                return settle_annotations(schema, spec.annotations, notes);
            },
            &notes);
        return std::make_pair(labels, notes);
    });
    auto data_job = std::async(std::launch::async, [&, base] {
        std::vector<std::string> notes;
        auto data = request<DataSet>(
            RequestKind::GenData, base, context, "object",
            [&](const RepairOutcome& r) {
                auto d = dataset_from_json(schema, normalize_generated_data(schema, r.value));
                auto fixed = conform_data(schema, d);
                if (d.root.empty()) {
                    auto [with_root, id] = create_instance(schema, d, schema.root);
                    d = with_root;
                    d.root = id;
                    fixed.push_back("created missing root " + id);
                }
                auto report = validate_data(schema, d);
                if (!report.ok()) throw Error("data-invalid", "generated data is not valid", {{"issues", report.to_json()}});
                notes.insert(notes.end(), fixed.begin(), fixed.end());
                return d;
            },
            &notes);
        return std::make_pair(data, notes);
    });

    auto [deps, dep_notes] = deps_job.get();
    auto [labels, label_notes] = labels_job.get();
    auto [data, data_notes] = data_job.get();
    for (auto* n : {&dep_notes, &label_notes, &data_notes}) m.notes.insert(m.notes.end(), n->begin(), n->end());
    m.dependencies = deps;
    m.annotations = labels;

    auto graph = build_graph(schema, deps);
    auto prop = recompute_all(graph, schema, data, options_.budget, nl_executor(schema), &nl_cache_);
    for (auto i : prop.stale) m.notes.push_back("dependency " + std::to_string(i) + " could not be evaluated");
    m.data = prop.data;

    auto report = validate_session(to_session(m, prompt));
    if (!report.ok()) throw Error("irreparable-response", "generated model is inconsistent", {{"issues", report.to_json()}});
    return m;
}

FollowUp Gateway::parse_followup(const std::string& prompt, const Session& s) {
    if (prompt.find_first_not_of(" \t\r\n") == std::string::npos) throw Error("payload-mismatch", "prompt is empty");
    return request<FollowUp>(RequestKind::ParseFollowUp, {{"prompt", prompt}}, session_context(s), "any",
                             [&](const RepairOutcome& r) {
                                 FollowUp f;
                                 Json list = r.value.is_array() ? r.value : r.value.value("updaters", Json::array());
                                 if (r.value.is_object()) f.message = r.value.value("message", std::string());
                                 f.updaters = updaters_from_json(list);
                                 if (f.updaters.empty()) {
                                     f.no_op = true;
                                     if (f.message.empty()) f.message = "Nothing in the model needs to change.";
                                     return f;
                                 }
                                 f.updaters = resolve_pending(s, std::move(f.updaters));
                                 ApplyOptions opts{options_.budget, nl_executor(s.schema), &nl_cache_};
                                 (void)apply_batch(s, f.updaters, opts);
                                 return f;
                             });
}

Instance Gateway::autocomplete_instance(const Session& s, const std::string& entity, const Value::Dict& partial,
                                        const std::string& preference) {
    const auto* edef = s.schema.find(entity);
    if (!edef) throw Error("unknown-entity", "no entity '" + entity + "'", {{"entity", entity}});
    for (const auto& [k, v] : partial) {
        const auto* a = edef->find(k);
        if (!a) throw Error("payload-mismatch", "'" + k + "' is not an attribute of " + entity);
        if (auto rule = check_value(s.schema, s.data, *a, v))
            throw Error("payload-mismatch", entity + "." + k + ": " + *rule, {{"reason", *rule}});
    }
    std::vector<const AttributeDef*> missing;
    for (const auto& a : edef->attributes) {
        if (a.name == "id") continue;
        auto it = partial.find(a.name);
        if (it == partial.end() || blank(it->second)) missing.push_back(&a);
    }
    Instance out{entity, "", partial};
    if (missing.empty()) return out;

    Json examples = Json::array();
    for (const auto* inst : s.data.of_entity(entity)) {
        if (examples.size() == 2) break;
        examples.push_back(values_json(inst->values, false));
    }
    Json entity_model = plain(to_combined_json(s.schema, s.annotations))[entity];
    Json payload = {{"entity", entity},
                    {"attributes", entity_model},
                    {"partial", values_json(partial, false)},
                    {"examples", examples},
                    {"preference", preference}};
    Json wanted = Json::array();
    for (const auto* a : missing) wanted.push_back(a->name);
    payload["missing"] = wanted;

    return request<Instance>(RequestKind::AutoComplete, payload, Json{{"prompts", s.prompts}}, "object",
                             [&](const RepairOutcome& r) {
                                 Json values = r.value.contains("values") && r.value["values"].is_object() ? r.value["values"] : r.value;
                                 Instance done = out;
                                 for (const auto* a : missing) {
                                     if (!values.contains(a->name) || values[a->name].is_null())
                                         throw Error("incomplete-response", "completion leaves '" + a->name + "' empty");
                                     bool dropped = false;
                                     Value v = drop_dangling(s.data, *a, decode(*a, values[a->name]), dropped);
                                     if (auto rule = check_value(s.schema, s.data, *a, v))
                                         throw Error(*rule, "completion for '" + a->name + "' is not usable: " + *rule,
                                                     {{"attribute", a->name}, {"value", values[a->name]}});
                                     done.values[a->name] = v;
                                 }
                                 return done;
                             });
}

std::vector<Updater> Gateway::resolve_pending(const Session& s, std::vector<Updater> updaters) {
    for (auto& u : updaters) {
        if (!u.specifications.is_object() || !u.specifications.contains("pending")) continue;
        const Json spec = u.specifications;
        const std::string kind = spec["pending"].is_string() ? spec["pending"].get<std::string>() : "";
        const std::string preference = spec.value("preference", std::string());
        PathResolution res;
        try {
            res = resolve_path(s.schema, u.target);
        } catch (const Error& e) {
            throw Error("unknown-target", e.what(), {{"target", u.target.str()}});
        }
        auto decode_partial = [&](const std::string& entity, const Json& values) {
            Value::Dict partial;
            if (!values.is_object()) return partial;
            for (const auto& [k, v] : values.items()) {
                const auto* a = s.schema.find(entity, k);
                if (!a) throw Error("payload-mismatch", "'" + k + "' is not an attribute of " + entity);
                if (k != "id") partial[k] = decode(*a, v);
            }
            return partial;
        };
        if (kind == "generate" && u.action == Action::AddData) {
            std::string entity;
            if (!res.attribute) entity = res.entity;
            else if (res.attribute->kind == AttrKind::Pntr) entity = *res.attribute->target;
            else if (res.attribute->is_entity_array() && !res.element) entity = *res.attribute->item->target;
            else throw Error("payload-mismatch", "cannot generate an item for " + u.target.str());
            auto inst = autocomplete_instance(s, entity, decode_partial(entity, spec.value("values", Json::object())), preference);
            u.specifications = {{"values", values_json(inst.values, false)}};
        } else if (kind == "autocomplete" && u.action == Action::UpdateData) {
            if (res.attribute || u.target.steps().empty() || u.target.steps().back().kind != PathStep::Kind::Id)
                throw Error("payload-mismatch", "autocomplete needs an instance target");
            const auto* inst = s.data.find(u.target.steps().back().name);
            if (!inst) throw Error("unknown-target", "no instance '" + u.target.steps().back().name + "'");
            Value::Dict partial;
            for (const auto& [k, v] : inst->values)
                if (k != "id" && !blank(v)) partial[k] = v;
            for (auto& [k, v] : decode_partial(inst->entity, spec.value("values", Json::object()))) partial[k] = v;
            auto done = autocomplete_instance(s, inst->entity, partial, preference);
            u.specifications = {{"values", values_json(done.values, false)}};
        } else if (kind == "cluster" && u.action == Action::Cluster) {
            std::string entity;
            std::vector<const Instance*> items;
            if (!res.attribute && u.target.steps().empty()) {
                entity = res.entity;
                items = s.data.of_entity(entity);
            } else if (res.attribute && res.attribute->is_entity_array() && !res.element) {
                entity = *res.attribute->item->target;
                std::set<ObjectId> seen;
                for (const auto& v : get(s.schema, s.data, u.target))
                    if (v.is_list())
                        for (const auto& e : v.as_list())
                            if (e.is_ref() && seen.insert(e.as_ref().id).second)
                                if (const auto* i = s.data.find(e.as_ref().id)) items.push_back(i);
            } else {
                throw Error("payload-mismatch", "only collections of entities can be clustered");
            }
            Json list = Json::array();
            for (const auto* i : items) list.push_back({{"id", i->id}, {"values", values_json(i->values, false)}});
            Json payload = {{"collection", u.target.str()}, {"criterion", spec.value("criterion", std::string())}, {"items", list}};
            std::set<ObjectId> allowed;
            for (const auto* i : items) allowed.insert(i->id);
            u.specifications = request<Json>(RequestKind::SemanticCluster, payload, Json{{"prompts", s.prompts}}, "any",
                                             [&](const RepairOutcome& r) {
                                                 Json groups = r.value.is_object() && r.value.contains("groups") ? r.value["groups"] : r.value;
                                                 Json norm = Json::array();
                                                 auto take = [&](const std::string& label, const Json& ids) {
                                                     Json members = Json::array();
                                                     for (const auto& id : ids)
                                                         if (id.is_string() && allowed.count(id.get<std::string>())) members.push_back(id);
                                                     if (!members.empty()) norm.push_back({{"label", label}, {"members", members}});
                                                 };
                                                 if (groups.is_array()) {
                                                     for (const auto& g : groups)
                                                         if (g.is_object() && g.contains("label") && g["label"].is_string())
                                                             take(g["label"].get<std::string>(), g.value("members", Json::array()));
                                                 } else if (groups.is_object()) {
                                                     for (const auto& [label, ids] : groups.items()) take(label, ids);
                                                 }
                                                 if (norm.empty()) throw Error("cluster-empty", "no usable groups in the answer");
                                                 return Json{{"groups", norm}};
                                             });
        } else {
            throw Error("payload-mismatch", "cannot resolve pending '" + kind + "' on " + to_string(u.action));
        }
    }
    return updaters;
}

NlExecutor Gateway::nl_executor(const Schema& schema) {
    return [this, schema](const NlRequest& r) -> Value {
        Json payload = {{"relationship", r.relationship},
                        {"mechanism", to_string(r.mechanism)},
                        {"source", r.source},
                        {"target", r.target},
                        {"source_value", r.source_value},
                        {"target_value", r.target_value},
                        {"owner", r.owner_values}};
        return request<Value>(RequestKind::NLDependencyExec, payload, Json::object(), "object",
                              [&](const RepairOutcome& out) -> Value {
                                  if (r.mechanism == Mechanism::Validate) {
                                      if (!out.value.contains("valid") || !out.value["valid"].is_boolean())
                                          throw Error("nl-shape", "expected {\"valid\": bool}");
                                      return Value(out.value["valid"].get<bool>());
                                  }
                                  if (!out.value.contains("value")) throw Error("nl-shape", "expected {\"value\": ...}");
                                  auto res = resolve_path(schema, Path::parse(r.target));
                                  return res.attribute ? decode(*res.attribute, out.value["value"]) : value_from_json(out.value["value"]);
                              });
    };
}

}  // namespace taskui
