#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taskui/core/annotation.hpp"
#include "taskui/core/path.hpp"
#include "taskui/core/schema.hpp"
#include "taskui/core/validation.hpp"

namespace taskui {

ValidationReport validate_schema(const Schema& schema);
ValidationReport validate_annotations(const Schema& schema, const AnnotationSet& annotations);

enum class ResolvedKind { EntityRoot, Entity, SvalText, SvalNumber, Dict, Pntr, Arry };

struct PathResolution {
    ResolvedKind kind = ResolvedKind::EntityRoot;
    bool many = false;
    // Entity denoted by the path (entity kinds) or owning the final attribute.
    std::string entity;
    // Final attribute. For element selections ([*], [n], [id=..]) this is the
    // item type wrapped as an attribute carrying the array's name.
    std::optional<AttributeDef> attribute;
    // AnnotationSet key of the final attribute, e.g. "nutrition.fat".
    std::string annotation_key;
    bool element = false;
    // Schema addresses traversed, e.g. {"DINNER_PLAN.menu", "DISH.calories"}.
    std::vector<std::string> footprint;

    // Address of what the path finally denotes: an "ENTITY.attr" address or an entity name.
    std::string address() const;
    std::optional<std::string> target_entity() const;
    std::string describe() const;
};

// Throws Error with code unknown-entity, unknown-attribute or kind-mismatch.
PathResolution resolve_path(const Schema& schema, const Path& path);

// Every path a valid schema admits without id selectors: entity paths, each
// attribute, each dict field, and [*] steps through arrays (pointers are not
// followed, so the enumeration is finite on cyclic schemas).
std::vector<Path> enumerate_paths(const Schema& schema);

struct SchemaChange {
    std::string path;                      // "ENTITY" or "ENTITY.attr"
    std::optional<EntityDef> entity;       // entity-level changes
    std::optional<AttributeDef> attribute; // attribute-level: the new (or removed) definition
    std::optional<AttributeDef> before;    // changed only
    std::size_t position = 0;              // index in the new entity (added / changed)

    bool operator==(const SchemaChange&) const = default;
};

struct SchemaDelta {
    std::vector<SchemaChange> added;
    std::vector<SchemaChange> removed;
    std::vector<SchemaChange> changed;
    std::optional<std::string> root;  // set when the root entity changes

    bool empty() const { return added.empty() && removed.empty() && changed.empty() && !root; }
    bool operator==(const SchemaDelta&) const = default;
};

SchemaDelta diff_schemas(const Schema& before, const Schema& after);
Schema apply_delta(const Schema& schema, const SchemaDelta& delta);
Json to_json(const SchemaDelta& delta);

// Rule-based labels for every attribute of the schema.
AnnotationSet default_annotations(const Schema& schema);
// Same rules for one attribute (and, for dicts, its fields) of `entity`.
void add_default_annotations(const Schema& schema, const std::string& entity, const AttributeDef& attribute,
                             AnnotationSet& out);
std::optional<std::string> public_identifier(const Schema& schema, const AnnotationSet& annotations,
                                             std::string_view entity);

}  // namespace taskui
