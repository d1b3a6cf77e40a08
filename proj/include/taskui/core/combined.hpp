#pragma once

#include <optional>
#include <string>

#include "taskui/core/annotation.hpp"
#include "taskui/core/schema.hpp"

namespace taskui {

struct ModelSpec {
    Schema schema;
    AnnotationSet annotations;
};

// The single-document form where every attribute object carries both its
// type and its UI labels:
//   { DINNER_PLAN: { date: { type: "string", render: "time", ... }, ... }, ... }
// The root entity is the first entity in document order unless given.
ModelSpec combined_from_json(const OrderedJson& doc, std::optional<std::string> root = std::nullopt);
OrderedJson to_combined_json(const Schema& schema, const AnnotationSet& annotations);

}  // namespace taskui
