#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taskui/core/error.hpp"

namespace taskui {

enum class Function { PrivateIdentifier, PublicIdentifier, Display };

enum class Render {
    ShortText, Paragraph, Number, Url, Time, Location, Category, Hidden,  // non-array
    Summary, Expanded,                                                     // array
};

enum class SummaryOp { Sum, Avg, Min, Max, Filter, Count };

struct SummarySpec {
    std::string label;                     // button text
    std::string field;                     // item attribute the derivation reads
    SummaryOp operation = SummaryOp::Count;
    std::optional<std::string> predicate;  // FILTER / COUNT only

    bool operator==(const SummarySpec&) const = default;
};

// Label set for one attribute. Required members are optional here so that a
// document missing them can be loaded and reported by validate_annotations.
struct Annotation {
    std::optional<Function> function;
    std::optional<Render> render;
    std::optional<bool> editable;
    std::vector<std::string> categories;
    std::optional<SummarySpec> summary;
    std::vector<std::string> thumbnail;  // pointer / array-of-pointer attributes
    std::optional<Render> item_render;   // array-of-scalar attributes

    bool is_hidden() const { return render == Render::Hidden; }
    bool is_editable() const { return editable.value_or(false); }
    bool operator==(const Annotation&) const = default;
};

// entity -> attribute key -> annotation. Dict fields use "attr.field" keys;
// the dict attribute itself carries no annotation.
struct AnnotationSet {
    std::map<std::string, std::map<std::string, Annotation, std::less<>>, std::less<>> entities;

    const Annotation* find(std::string_view entity, std::string_view key) const;
    void set(const std::string& entity, const std::string& key, Annotation a) { entities[entity][key] = std::move(a); }
    bool operator==(const AnnotationSet&) const = default;
};

std::string to_string(Function f);
std::string to_string(Render r);
std::string to_string(SummaryOp op);
std::optional<Function> function_from_string(std::string_view s);
std::optional<Render> render_from_string(std::string_view s);
std::optional<SummaryOp> summary_op_from_string(std::string_view s);
bool is_array_render(Render r);

Json to_json(const Annotation& a);
Json to_json(const AnnotationSet& set);
Annotation annotation_from_json(const Json& j);
AnnotationSet annotations_from_json(const Json& j);

}  // namespace taskui
