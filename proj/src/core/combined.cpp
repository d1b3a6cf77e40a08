#include "taskui/core/combined.hpp"

namespace taskui {

namespace {

void collect(const std::string& entity, const std::string& key_prefix, const OrderedJson& attrs, EntityDef* owner,
             std::vector<AttributeDef>* dict_fields, AnnotationSet& annotations) {
    for (auto it = attrs.begin(); it != attrs.end(); ++it) {
        const auto& name = it.key();
        const auto& body = it.value();
        auto def = attribute_from_json(name, body);
        if (def.kind == AttrKind::Dict) {
            def.fields.clear();
            if (body.contains("fields") && body["fields"].is_object())
                collect(entity, key_prefix + name + ".", body["fields"], nullptr, &def.fields, annotations);
        } else {
            // Annotation keys live next to the type; anything else is ignored.
            Json labels = Json::parse(body.dump());
            labels.erase("type");
            labels.erase("fields");
            labels.erase("position");
            if (labels.contains("item") && labels["item"].is_object()) labels["item"].erase("type");
            annotations.set(entity, key_prefix + name, annotation_from_json(labels));
        }
        if (owner) owner->attributes.push_back(std::move(def));
        else dict_fields->push_back(std::move(def));
    }
}

OrderedJson combined_attr(const std::string& entity, const std::string& key, const AttributeDef& a,
                          const AnnotationSet& annotations) {
    auto typed = OrderedJson::parse(to_json(a, 0).dump());
    typed.erase("position");
    OrderedJson out;
    out["type"] = typed["type"];
    if (a.kind == AttrKind::Dict) {
        OrderedJson fields = OrderedJson::object();
        for (const auto& f : a.fields) fields[f.name] = combined_attr(entity, key + "." + f.name, f, annotations);
        out["fields"] = fields;
        return out;
    }
    if (const auto* ann = annotations.find(entity, key)) {
        auto labels = OrderedJson::parse(to_json(*ann).dump());
        for (auto it = labels.begin(); it != labels.end(); ++it) {
            if (it.key() == "item") continue;
            out[it.key()] = it.value();
        }
        if (a.kind == AttrKind::Arry) {
            OrderedJson item = typed["item"];
            if (labels.contains("item"))
                for (auto it = labels["item"].begin(); it != labels["item"].end(); ++it) item[it.key()] = it.value();
            out["item"] = item;
        }
    } else if (a.kind == AttrKind::Arry) {
        out["item"] = typed["item"];
    }
    return out;
}

}  // namespace

ModelSpec combined_from_json(const OrderedJson& doc, std::optional<std::string> root) {
    if (!doc.is_object()) throw Error("schema-syntax", "specification document must be an object");
    ModelSpec spec;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!it.value().is_object()) throw Error("schema-syntax", "entity '" + it.key() + "' must be an object");
        if (spec.schema.root.empty()) spec.schema.root = it.key();
        EntityDef def;
        collect(it.key(), "", it.value(), &def, nullptr, spec.annotations);
        spec.schema.entities.emplace(it.key(), std::move(def));
    }
    if (root) spec.schema.root = *root;
    return spec;
}

OrderedJson to_combined_json(const Schema& schema, const AnnotationSet& annotations) {
    OrderedJson doc = OrderedJson::object();
    auto emit = [&](const std::string& name) {
        OrderedJson e = OrderedJson::object();
        for (const auto& a : schema.entities.at(name).attributes) e[a.name] = combined_attr(name, a.name, a, annotations);
        doc[name] = e;
    };
    if (schema.find(schema.root)) emit(schema.root);
    for (const auto& [name, def] : schema.entities)
        if (name != schema.root) emit(name);
    return doc;
}

}  // namespace taskui
