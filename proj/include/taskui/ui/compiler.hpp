#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taskui/core/annotation.hpp"
#include "taskui/core/schema.hpp"
#include "taskui/data/dataset.hpp"
#include "taskui/ui/document.hpp"

namespace taskui {

struct SortSpec {
    std::string field;
    bool descending = false;
    bool operator==(const SortSpec&) const = default;
};

struct Cluster {
    std::string label;
    std::vector<ObjectId> members;
    bool operator==(const Cluster&) const = default;
};

// Presentation state of one collection, keyed by its path: "DISH" for an
// entity panel, "DINNER_PLAN.menu" for an array attribute.
struct CollectionView {
    std::optional<std::string> filter;  // predicate over `item`
    std::optional<SortSpec> sort;
    std::vector<Cluster> clusters;
    bool empty() const { return !filter && !sort && clusters.empty(); }
    bool operator==(const CollectionView&) const = default;
};

struct PanelView {
    std::string entity;
    std::string representation = "list";
    bool operator==(const PanelView&) const = default;
};

struct CardView {
    ObjectId object;
    std::string mode = "floating";
    bool operator==(const CardView&) const = default;
};

struct ViewState {
    std::vector<PanelView> panels;  // opening order
    std::vector<CardView> cards;
    std::map<std::string, CollectionView> collections;
    std::optional<std::string> focus;

    const PanelView* find_panel(std::string_view entity) const;
    bool operator==(const ViewState&) const = default;
};

Json to_json(const ViewState& v);
ViewState view_from_json(const Json& j);

std::string widget_name(Render r);
// "guest_list" -> "Guest List", "SHOPPING_ITEM" -> "Shopping Item"
std::string display_label(std::string_view name);

// Empty list: SUM and COUNT give 0, the others the empty marker.
// Errors: type-error for a non-numeric field under SUM/AVG/MIN/MAX.
Value compute_summary(const SummarySpec& spec, const std::vector<const Instance*>& items, const DataSet& data);

std::vector<std::string> valid_representations(const Schema& schema, const AnnotationSet& annotations,
                                               std::string_view entity);
std::string choose_representation(const Schema& schema, const AnnotationSet& annotations, std::string_view entity,
                                  std::string_view context);

UINode compile_home_panel(const Schema& schema, const AnnotationSet& annotations, const DataSet& data,
                          const ViewState& view = {});
// Errors: unknown-entity, representation-unsupported.
UINode compile_entity_panel(const Schema& schema, const AnnotationSet& annotations, const DataSet& data,
                            const std::string& entity, const std::string& representation, const ViewState& view = {});
// Errors: unknown-id.
UINode compile_card(const Schema& schema, const AnnotationSet& annotations, const DataSet& data, const ObjectId& id,
                    const std::string& mode = "popup");
UIDocument compile_document(const Schema& schema, const AnnotationSet& annotations, const DataSet& data,
                            const ViewState& view);

}  // namespace taskui
