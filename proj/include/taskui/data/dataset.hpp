#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taskui/core/annotation.hpp"
#include "taskui/core/path.hpp"
#include "taskui/core/schema.hpp"
#include "taskui/core/schema_ops.hpp"
#include "taskui/core/validation.hpp"
#include "taskui/core/value.hpp"

namespace taskui {

struct Instance {
    std::string entity;
    ObjectId id;
    Value::Dict values;

    const Value* find(std::string_view attribute) const;
    bool operator==(const Instance&) const = default;
};

struct DataSet {
    ObjectId root;
    std::map<ObjectId, Instance, std::less<>> instances;

    const Instance* find(std::string_view id) const;
    // Instances of `entity` in creation order (numeric id suffix).
    std::vector<const Instance*> of_entity(std::string_view entity) const;
    // ENTITY-n with n one past the largest suffix in use.
    ObjectId next_id(std::string_view entity) const;
    bool operator==(const DataSet&) const = default;
};

// Concrete location of one stored value.
struct Slot {
    ObjectId id;
    std::string key;                   // attribute, or "dict.field"
    std::optional<std::size_t> index;  // element of an array attribute
    bool operator==(const Slot&) const = default;
};

struct WriteResult {
    DataSet data;
    std::vector<Path> changed;
};

// "ROOT" for the root instance, "ENTITY[id=X]" otherwise.
Path instance_path(const DataSet& data, const Instance& inst);
Path slot_path(const DataSet& data, const Slot& slot);

Value empty_value(const AttributeDef& def);
// Kind check of `v` against `def`; pointer targets are checked against `data`.
// Returns the rule broken (type-mismatch, dangling-pointer, pointer-entity) or nullopt.
std::optional<std::string> check_value(const Schema& schema, const DataSet& data, const AttributeDef& def,
                                       const Value& v);
// Schema-directed decoding: strings in pointer positions become refs.
Value value_from_json(const AttributeDef& def, const Json& j);

ValidationReport validate_data(const Schema& schema, const DataSet& data);

// Throws path-resolution errors; an [id=..] naming no instance is unknown-path.
std::vector<Value> get(const Schema& schema, const DataSet& data, const Path& path);
// Concrete slots a path denotes. Entity paths denote no slots.
std::vector<Slot> locate(const Schema& schema, const DataSet& data, const Path& path);

// Checks the editable annotation; errors not-editable, type-mismatch, unknown-path.
WriteResult set(const Schema& schema, const AnnotationSet& annotations, const DataSet& data, const Path& path,
                const Value& value);
// Same write without the editable check, for derived values and the system.
WriteResult set_unchecked(const Schema& schema, const DataSet& data, const Path& path, const Value& value);
WriteResult write_slot(const Schema& schema, const DataSet& data, const Slot& slot, const Value& value);

std::pair<DataSet, ObjectId> create_instance(const Schema& schema, const DataSet& data, const std::string& entity,
                                             const Value::Dict& partial = {});
WriteResult delete_instance(const Schema& schema, const DataSet& data, const ObjectId& id);

// A data set holding only an empty root instance.
DataSet empty_dataset(const Schema& schema);

// `schema` is the schema after the delta.
DataSet migrate_data(const Schema& schema, const DataSet& data, const SchemaDelta& delta);

// {root, instances: {id: {entity, values}}}
Json to_json(const DataSet& data);
DataSet dataset_from_json(const Schema& schema, const Json& j);

}  // namespace taskui
