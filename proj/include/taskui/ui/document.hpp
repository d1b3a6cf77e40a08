#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taskui/core/error.hpp"

namespace taskui {

// Frontend-agnostic render tree. Node types:
//   panel, card, field, link, group, collection, item, summary, table, row, map, marker
// Nodes that stand for an instance carry props.object; that id is the highlight key.
struct UINode {
    std::string id;
    std::string type;
    Json props = Json::object();
    std::vector<UINode> children;

    const UINode* find(std::string_view node_id) const;
    bool operator==(const UINode& o) const { return id == o.id && type == o.type && props == o.props && children == o.children; }
};

struct UIDocument {
    std::vector<UINode> panels;  // home first, then entity panels and floating cards
    std::optional<std::string> focus;

    const UINode* find(std::string_view node_id) const;
    bool operator==(const UIDocument&) const = default;
};

Json to_json(const UINode& n);
Json to_json(const UIDocument& d);
UINode node_from_json(const Json& j);
UIDocument document_from_json(const Json& j);
// Sorted keys, no whitespace: byte-stable for golden comparisons.
std::string canonical(const UIDocument& d);

struct UIOp {
    enum class Kind { Remove, Insert, Replace, Focus };
    Kind kind = Kind::Replace;
    std::string id;      // Remove / Replace
    std::string parent;  // Insert; "" is the document itself
    std::size_t index = 0;
    std::optional<UINode> node;
    std::optional<std::string> focus;

    bool operator==(const UIOp& o) const {
        return kind == o.kind && id == o.id && parent == o.parent && index == o.index && node == o.node && focus == o.focus;
    }
};

struct UIDelta {
    std::vector<UIOp> ops;
    bool empty() const { return ops.empty(); }
};

UIDelta diff_ui(const UIDocument& before, const UIDocument& after);
UIDocument apply_ui_delta(const UIDocument& doc, const UIDelta& delta);
Json to_json(const UIDelta& d);
UIDelta ui_delta_from_json(const Json& j);

// Nodes carrying props.object == id.
std::vector<const UINode*> occurrences(const UIDocument& doc, std::string_view object);

}  // namespace taskui
