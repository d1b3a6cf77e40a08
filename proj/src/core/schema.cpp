#include "taskui/core/schema.hpp"

#include <algorithm>
#include <numeric>

namespace taskui {

AttributeDef AttributeDef::text(std::string name) {
    AttributeDef a;
    a.name = std::move(name);
    a.kind = AttrKind::Sval;
    a.hint = ScalarHint::Text;
    return a;
}

AttributeDef AttributeDef::number(std::string name) {
    AttributeDef a = text(std::move(name));
    a.hint = ScalarHint::Number;
    return a;
}

AttributeDef AttributeDef::pointer(std::string name, std::string entity) {
    AttributeDef a;
    a.name = std::move(name);
    a.kind = AttrKind::Pntr;
    a.target = std::move(entity);
    return a;
}

AttributeDef AttributeDef::array_of(std::string name, ItemSpec item) {
    AttributeDef a;
    a.name = std::move(name);
    a.kind = AttrKind::Arry;
    a.item = std::move(item);
    return a;
}

AttributeDef AttributeDef::dict(std::string name, std::vector<AttributeDef> fields) {
    AttributeDef a;
    a.name = std::move(name);
    a.kind = AttrKind::Dict;
    a.fields = std::move(fields);
    return a;
}

const AttributeDef* EntityDef::find(std::string_view name) const {
    auto it = std::find_if(attributes.begin(), attributes.end(), [&](const AttributeDef& a) { return a.name == name; });
    return it == attributes.end() ? nullptr : &*it;
}

const EntityDef* Schema::find(std::string_view entity) const {
    auto it = entities.find(entity);
    return it == entities.end() ? nullptr : &it->second;
}

const AttributeDef* Schema::find(std::string_view entity, std::string_view attribute) const {
    const auto* e = find(entity);
    return e ? e->find(attribute) : nullptr;
}

std::string to_string(AttrKind k) {
    switch (k) {
        case AttrKind::Sval: return "SVAL";
        case AttrKind::Dict: return "DICT";
        case AttrKind::Pntr: return "PNTR";
        case AttrKind::Arry: return "ARRY";
    }
    return "?";
}

std::string to_string(ScalarHint h) { return h == ScalarHint::Number ? "number" : "text"; }

std::optional<std::string> entity_from_type_token(std::string_view token) {
    if (token.size() > 4 && token.substr(0, 2) == "__" && token.substr(token.size() - 2) == "__")
        return std::string(token.substr(2, token.size() - 4));
    return std::nullopt;
}

std::string type_token_for_entity(std::string_view entity) { return "__" + std::string(entity) + "__"; }

namespace {

Json item_to_json(const ItemSpec& item) {
    switch (item.kind) {
        case AttrKind::Sval: return {{"type", item.hint == ScalarHint::Number ? "number" : "string"}};
        case AttrKind::Pntr: return {{"type", type_token_for_entity(item.target.value_or(""))}};
        case AttrKind::Dict: return {{"type", "object"}};
        case AttrKind::Arry: return {{"type", "array"}};
    }
    return Json::object();
}

ItemSpec item_from_json(const OrderedJson& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw Error("schema-syntax", "array item needs a string 'type'");
    auto type = j["type"].get<std::string>();
    ItemSpec item;
    if (type == "string") {
        item.hint = ScalarHint::Text;
    } else if (type == "number") {
        item.hint = ScalarHint::Number;
    } else if (type == "object") {
        item.kind = AttrKind::Dict;
    } else if (type == "array") {
        item.kind = AttrKind::Arry;
    } else if (auto entity = entity_from_type_token(type)) {
        item.kind = AttrKind::Pntr;
        item.target = *entity;
    } else {
        throw Error("schema-syntax", "unknown item type '" + type + "'");
    }
    return item;
}

template <typename J>
std::vector<std::pair<std::string, const J*>> ordered_members(const J& obj) {
    // Members sorted by explicit "position" when present, else document order.
    std::vector<std::pair<std::string, const J*>> members;
    std::vector<long long> positions;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        members.emplace_back(it.key(), &it.value());
        long long pos = static_cast<long long>(positions.size());
        if (it.value().is_object() && it.value().contains("position") && it.value()["position"].is_number_integer())
            pos = it.value()["position"].template get<long long>();
        positions.push_back(pos);
    }
    std::vector<std::size_t> idx(members.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return positions[a] < positions[b]; });
    std::vector<std::pair<std::string, const J*>> out;
    for (auto i : idx) out.push_back(members[i]);
    return out;
}

}  // namespace

Json to_json(const AttributeDef& a, std::size_t position) {
    Json j;
    switch (a.kind) {
        case AttrKind::Sval: j["type"] = a.hint == ScalarHint::Number ? "number" : "string"; break;
        case AttrKind::Pntr: j["type"] = type_token_for_entity(a.target.value_or("")); break;
        case AttrKind::Arry:
            j["type"] = "array";
            if (a.item) j["item"] = item_to_json(*a.item);
            break;
        case AttrKind::Dict: {
            j["type"] = "object";
            Json fields = Json::object();
            for (std::size_t i = 0; i < a.fields.size(); ++i) fields[a.fields[i].name] = to_json(a.fields[i], i);
            j["fields"] = fields;
            break;
        }
    }
    j["position"] = position;
    return j;
}

Json to_json(const Schema& s) {
    Json entities = Json::object();
    for (const auto& [name, def] : s.entities) {
        Json attrs = Json::object();
        for (std::size_t i = 0; i < def.attributes.size(); ++i) attrs[def.attributes[i].name] = to_json(def.attributes[i], i);
        entities[name] = attrs;
    }
    return {{"root", s.root}, {"entities", entities}};
}

AttributeDef attribute_from_json(const std::string& name, const OrderedJson& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw Error("schema-syntax", "attribute '" + name + "' needs a string 'type'");
    auto type = j["type"].get<std::string>();
    AttributeDef a;
    a.name = name;
    if (type == "string" || type == "number") {
        a.kind = AttrKind::Sval;
        a.hint = type == "number" ? ScalarHint::Number : ScalarHint::Text;
    } else if (type == "array") {
        a.kind = AttrKind::Arry;
        if (!j.contains("item")) throw Error("schema-syntax", "array attribute '" + name + "' needs an 'item'");
        a.item = item_from_json(j["item"]);
    } else if (type == "object") {
        a.kind = AttrKind::Dict;
        if (j.contains("fields")) {
            if (!j["fields"].is_object()) throw Error("schema-syntax", "'fields' of '" + name + "' must be an object");
            for (const auto& [fname, fdef] : ordered_members(j["fields"])) a.fields.push_back(attribute_from_json(fname, *fdef));
        }
    } else if (auto entity = entity_from_type_token(type)) {
        a.kind = AttrKind::Pntr;
        a.target = *entity;
    } else {
        throw Error("schema-syntax", "attribute '" + name + "' has unknown type '" + type + "'");
    }
    return a;
}

Schema schema_from_json(const OrderedJson& j) {
    if (!j.is_object() || !j.contains("entities") || !j["entities"].is_object())
        throw Error("schema-syntax", "schema document needs an 'entities' object");
    Schema s;
    if (j.contains("root") && j["root"].is_string()) s.root = j["root"].get<std::string>();
    for (const auto& [ename, edef] : j["entities"].items()) {
        if (!edef.is_object()) throw Error("schema-syntax", "entity '" + ename + "' must be an object");
        EntityDef def;
        for (const auto& [aname, adef] : ordered_members(edef)) def.attributes.push_back(attribute_from_json(aname, *adef));
        s.entities.emplace(ename, std::move(def));
    }
    return s;
}

}  // namespace taskui
