#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taskui/core/error.hpp"

namespace taskui {

enum class AttrKind { Sval, Dict, Pntr, Arry };
enum class ScalarHint { Text, Number };

// Array item type. Only Sval and Pntr are legal; Dict and Arry exist so that
// illegal documents can be represented and reported by validate_schema.
struct ItemSpec {
    AttrKind kind = AttrKind::Sval;
    std::optional<ScalarHint> hint;
    std::optional<std::string> target;

    bool operator==(const ItemSpec&) const = default;
};

// Only the members belonging to `kind` are populated on a well-formed def.
struct AttributeDef {
    std::string name;
    AttrKind kind = AttrKind::Sval;
    std::optional<ScalarHint> hint;        // Sval
    std::optional<std::string> target;     // Pntr
    std::vector<AttributeDef> fields;      // Dict
    std::optional<ItemSpec> item;          // Arry

    static AttributeDef text(std::string name);
    static AttributeDef number(std::string name);
    static AttributeDef pointer(std::string name, std::string entity);
    static AttributeDef array_of(std::string name, ItemSpec item);
    static AttributeDef dict(std::string name, std::vector<AttributeDef> fields);

    bool is_entity_array() const { return kind == AttrKind::Arry && item && item->kind == AttrKind::Pntr; }
    bool operator==(const AttributeDef&) const = default;
};

struct EntityDef {
    std::vector<AttributeDef> attributes;  // schema order

    const AttributeDef* find(std::string_view name) const;
    bool operator==(const EntityDef&) const = default;
};

struct Schema {
    std::map<std::string, EntityDef, std::less<>> entities;
    std::string root;

    const EntityDef* find(std::string_view entity) const;
    const AttributeDef* find(std::string_view entity, std::string_view attribute) const;
    // Public identifier is an annotation concept; see AnnotationSet.
    bool operator==(const Schema&) const = default;
};

std::string to_string(AttrKind k);
std::string to_string(ScalarHint h);

// "__DISH__" <-> "DISH"
std::optional<std::string> entity_from_type_token(std::string_view token);
std::string type_token_for_entity(std::string_view entity);

// Canonical JSON: {"root": E, "entities": {E: {attr: {"type": ..., "position": n}}}}.
Json to_json(const Schema& s);
Json to_json(const AttributeDef& a, std::size_t position);
// Accepts documents with or without positions; without, document order wins.
Schema schema_from_json(const OrderedJson& j);
AttributeDef attribute_from_json(const std::string& name, const OrderedJson& j);

}  // namespace taskui
