#include "taskui/ui/document.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace taskui {

namespace {

const UINode* find_in(const std::vector<UINode>& nodes, std::string_view id) {
    for (const auto& n : nodes)
        if (const auto* f = n.find(id)) return f;
    return nullptr;
}

UINode* find_mut(std::vector<UINode>& nodes, std::string_view id, std::vector<UINode>** owner, std::size_t* pos) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == id) {
            if (owner) *owner = &nodes;
            if (pos) *pos = i;
            return &nodes[i];
        }
        if (auto* f = find_mut(nodes[i].children, id, owner, pos)) return f;
    }
    return nullptr;
}

// Longest common subsequence of ids; returns kept (old index, new index) pairs.
std::vector<std::pair<std::size_t, std::size_t>> common_ids(const std::vector<UINode>& a, const std::vector<UINode>& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<std::size_t>> t(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            t[i][j] = a[i].id == b[j].id ? t[i + 1][j + 1] + 1 : std::max(t[i + 1][j], t[i][j + 1]);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (a[i].id == b[j].id) {
            out.emplace_back(i++, j++);
        } else if (t[i + 1][j] >= t[i][j + 1]) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

void diff_children(const std::string& parent, const std::vector<UINode>& a, const std::vector<UINode>& b,
                   std::vector<UIOp>& ops);

void diff_node(const UINode& a, const UINode& b, std::vector<UIOp>& ops) {
    if (a == b) return;
    if (a.type != b.type || a.props != b.props) {
        UIOp op;
        op.kind = UIOp::Kind::Replace;
        op.id = a.id;
        op.node = b;
        ops.push_back(std::move(op));
        return;
    }
    diff_children(a.id, a.children, b.children, ops);
}

void diff_children(const std::string& parent, const std::vector<UINode>& a, const std::vector<UINode>& b,
                   std::vector<UIOp>& ops) {
    auto keep = common_ids(a, b);
    std::vector<bool> kept_old(a.size(), false), kept_new(b.size(), false);
    for (auto [i, j] : keep) {
        kept_old[i] = true;
        kept_new[j] = true;
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!kept_old[i]) {
            UIOp op;
            op.kind = UIOp::Kind::Remove;
            op.id = a[i].id;
            ops.push_back(std::move(op));
        }
    for (std::size_t j = 0; j < b.size(); ++j)
        if (!kept_new[j]) {
            UIOp op;
            op.kind = UIOp::Kind::Insert;
            op.parent = parent;
            op.index = j;
            op.node = b[j];
            ops.push_back(std::move(op));
        }
    for (auto [i, j] : keep) diff_node(a[i], b[j], ops);
}

void scan(const UINode& n, std::string_view object, std::vector<const UINode*>& out) {
    auto it = n.props.find("object");
    if (it != n.props.end() && it->is_string() && it->get<std::string>() == object) out.push_back(&n);
    for (const auto& c : n.children) scan(c, object, out);
}

}  // namespace

const UINode* UINode::find(std::string_view node_id) const {
    if (id == node_id) return this;
    return find_in(children, node_id);
}

const UINode* UIDocument::find(std::string_view node_id) const { return find_in(panels, node_id); }

Json to_json(const UINode& n) {
    Json children = Json::array();
    for (const auto& c : n.children) children.push_back(to_json(c));
    return {{"id", n.id}, {"type", n.type}, {"props", n.props}, {"children", children}};
}

Json to_json(const UIDocument& d) {
    Json panels = Json::array();
    for (const auto& p : d.panels) panels.push_back(to_json(p));
    return {{"panels", panels}, {"focus", d.focus ? Json(*d.focus) : Json(nullptr)}};
}

UINode node_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("id") || !j.contains("type"))
        throw Error("ui-syntax", "node needs 'id' and 'type'");
    UINode n;
    n.id = j["id"].get<std::string>();
    n.type = j["type"].get<std::string>();
    if (j.contains("props")) n.props = j["props"];
    if (j.contains("children"))
        for (const auto& c : j["children"]) n.children.push_back(node_from_json(c));
    return n;
}

UIDocument document_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("panels") || !j["panels"].is_array())
        throw Error("ui-syntax", "document needs a 'panels' list");
    UIDocument d;
    for (const auto& p : j["panels"]) d.panels.push_back(node_from_json(p));
    if (j.contains("focus") && j["focus"].is_string()) d.focus = j["focus"].get<std::string>();
    return d;
}

std::string canonical(const UIDocument& d) { return to_json(d).dump(); }

UIDelta diff_ui(const UIDocument& before, const UIDocument& after) {
    UIDelta d;
    diff_children("", before.panels, after.panels, d.ops);
    if (before.focus != after.focus) {
        UIOp op;
        op.kind = UIOp::Kind::Focus;
        op.focus = after.focus;
        d.ops.push_back(std::move(op));
    }
    return d;
}

UIDocument apply_ui_delta(const UIDocument& doc, const UIDelta& delta) {
    UIDocument out = doc;
    for (const auto& op : delta.ops) {
        switch (op.kind) {
            case UIOp::Kind::Remove: {
                std::vector<UINode>* owner = nullptr;
                std::size_t pos = 0;
                if (!find_mut(out.panels, op.id, &owner, &pos))
                    throw Error("ui-delta", "no node '" + op.id + "' to remove");
                owner->erase(owner->begin() + static_cast<std::ptrdiff_t>(pos));
                break;
            }
            case UIOp::Kind::Insert: {
                std::vector<UINode>* list = &out.panels;
                if (!op.parent.empty()) {
                    UINode* p = find_mut(out.panels, op.parent, nullptr, nullptr);
                    if (!p) throw Error("ui-delta", "no parent '" + op.parent + "' for insertion");
                    list = &p->children;
                }
                auto at = std::min(op.index, list->size());
                list->insert(list->begin() + static_cast<std::ptrdiff_t>(at), *op.node);
                break;
            }
            case UIOp::Kind::Replace: {
                UINode* n = find_mut(out.panels, op.id, nullptr, nullptr);
                if (!n) throw Error("ui-delta", "no node '" + op.id + "' to replace");
                *n = *op.node;
                break;
            }
            case UIOp::Kind::Focus: out.focus = op.focus; break;
        }
    }
    return out;
}

Json to_json(const UIDelta& d) {
    Json arr = Json::array();
    for (const auto& op : d.ops) {
        switch (op.kind) {
            case UIOp::Kind::Remove: arr.push_back({{"op", "remove"}, {"id", op.id}}); break;
            case UIOp::Kind::Insert:
                arr.push_back({{"op", "insert"}, {"parent", op.parent}, {"index", op.index}, {"node", to_json(*op.node)}});
                break;
            case UIOp::Kind::Replace: arr.push_back({{"op", "replace"}, {"id", op.id}, {"node", to_json(*op.node)}}); break;
            case UIOp::Kind::Focus: arr.push_back({{"op", "focus"}, {"focus", op.focus ? Json(*op.focus) : Json(nullptr)}}); break;
        }
    }
    return arr;
}

UIDelta ui_delta_from_json(const Json& j) {
    if (!j.is_array()) throw Error("ui-syntax", "delta must be a list");
    UIDelta d;
    for (const auto& o : j) {
        UIOp op;
        auto kind = o.at("op").get<std::string>();
        if (kind == "remove") {
            op.kind = UIOp::Kind::Remove;
            op.id = o.at("id").get<std::string>();
        } else if (kind == "insert") {
            op.kind = UIOp::Kind::Insert;
            op.parent = o.at("parent").get<std::string>();
            op.index = o.at("index").get<std::size_t>();
            op.node = node_from_json(o.at("node"));
        } else if (kind == "replace") {
            op.kind = UIOp::Kind::Replace;
            op.id = o.at("id").get<std::string>();
            op.node = node_from_json(o.at("node"));
        } else if (kind == "focus") {
            op.kind = UIOp::Kind::Focus;
            if (o.contains("focus") && o["focus"].is_string()) op.focus = o["focus"].get<std::string>();
        } else {
            throw Error("ui-syntax", "unknown delta op '" + kind + "'");
        }
        d.ops.push_back(std::move(op));
    }
    return d;
}

std::vector<const UINode*> occurrences(const UIDocument& doc, std::string_view object) {
    std::vector<const UINode*> out;
    for (const auto& p : doc.panels) scan(p, object, out);
    return out;
}

}  // namespace taskui
