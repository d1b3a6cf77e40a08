#include "taskui/core/annotation.hpp"

#include <array>
#include <utility>

namespace taskui {

namespace {

constexpr std::array<std::pair<Render, std::string_view>, 10> kRenderNames{{
    {Render::ShortText, "shortText"},
    {Render::Paragraph, "paragraph"},
    {Render::Number, "number"},
    {Render::Url, "url"},
    {Render::Time, "time"},
    {Render::Location, "location"},
    {Render::Category, "category"},
    {Render::Hidden, "hidden"},
    {Render::Summary, "summary"},
    {Render::Expanded, "expanded"},
}};

constexpr std::array<std::pair<SummaryOp, std::string_view>, 6> kOpNames{{
    {SummaryOp::Sum, "SUM"},
    {SummaryOp::Avg, "AVG"},
    {SummaryOp::Min, "MIN"},
    {SummaryOp::Max, "MAX"},
    {SummaryOp::Filter, "FILTER"},
    {SummaryOp::Count, "COUNT"},
}};

std::vector<std::string> string_list(const Json& j, const char* what) {
    if (!j.is_array()) throw Error("annotation-syntax", std::string(what) + " must be a list of strings");
    std::vector<std::string> out;
    for (const auto& s : j) {
        if (!s.is_string()) throw Error("annotation-syntax", std::string(what) + " must be a list of strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

Render parse_render(const Json& j) {
    if (!j.is_string()) throw Error("annotation-syntax", "render must be a string");
    auto r = render_from_string(j.get<std::string>());
    if (!r) throw Error("annotation-syntax", "unknown render type '" + j.get<std::string>() + "'");
    return *r;
}

}  // namespace

const Annotation* AnnotationSet::find(std::string_view entity, std::string_view key) const {
    auto e = entities.find(entity);
    if (e == entities.end()) return nullptr;
    auto a = e->second.find(key);
    return a == e->second.end() ? nullptr : &a->second;
}

std::string to_string(Function f) {
    switch (f) {
        case Function::PrivateIdentifier: return "privateIdentifier";
        case Function::PublicIdentifier: return "publicIdentifier";
        case Function::Display: return "display";
    }
    return "?";
}

std::string to_string(Render r) {
    for (const auto& [value, name] : kRenderNames)
        if (value == r) return std::string(name);
    return "?";
}

std::string to_string(SummaryOp op) {
    for (const auto& [value, name] : kOpNames)
        if (value == op) return std::string(name);
    return "?";
}

std::optional<Function> function_from_string(std::string_view s) {
    if (s == "privateIdentifier" || s == "priviateIdentifier") return Function::PrivateIdentifier;
    if (s == "publicIdentifier") return Function::PublicIdentifier;
    if (s == "display") return Function::Display;
    return std::nullopt;
}

std::optional<Render> render_from_string(std::string_view s) {
    if (s == "date") return Render::Time;  // alias seen in generated specifications
    for (const auto& [value, name] : kRenderNames)
        if (name == s) return value;
    return std::nullopt;
}

std::optional<SummaryOp> summary_op_from_string(std::string_view s) {
    for (const auto& [value, name] : kOpNames)
        if (name == s) return value;
    return std::nullopt;
}

bool is_array_render(Render r) { return r == Render::Summary || r == Render::Expanded; }

Json to_json(const Annotation& a) {
    Json j = Json::object();
    if (a.function) j["function"] = to_string(*a.function);
    if (a.render) j["render"] = to_string(*a.render);
    if (a.editable) j["editable"] = *a.editable;
    if (!a.categories.empty()) j["categories"] = a.categories;
    if (a.summary) {
        Json s = {{"label", a.summary->label},
                  {"derived", {{"field", a.summary->field}, {"operation", to_string(a.summary->operation)}}}};
        if (a.summary->predicate) s["predicate"] = *a.summary->predicate;
        j["summary"] = s;
    }
    bool array = a.render && is_array_render(*a.render);
    if (array) {
        Json item = Json::object();
        if (!a.thumbnail.empty()) item["thumbnail"] = a.thumbnail;
        if (a.item_render) item["render"] = to_string(*a.item_render);
        if (!item.empty()) j["item"] = item;
    } else if (!a.thumbnail.empty()) {
        j["thumbnail"] = a.thumbnail;
    }
    return j;
}

Json to_json(const AnnotationSet& set) {
    Json j = Json::object();
    for (const auto& [entity, attrs] : set.entities) {
        Json e = Json::object();
        for (const auto& [key, a] : attrs) e[key] = to_json(a);
        j[entity] = e;
    }
    return j;
}

Annotation annotation_from_json(const Json& j) {
    if (!j.is_object()) throw Error("annotation-syntax", "annotation must be an object");
    Annotation a;
    if (j.contains("function")) {
        if (!j["function"].is_string()) throw Error("annotation-syntax", "function must be a string");
        a.function = function_from_string(j["function"].get<std::string>());
        if (!a.function) throw Error("annotation-syntax", "unknown function '" + j["function"].get<std::string>() + "'");
    }
    if (j.contains("render")) a.render = parse_render(j["render"]);
    if (j.contains("editable")) {
        if (!j["editable"].is_boolean()) throw Error("annotation-syntax", "editable must be a boolean");
        a.editable = j["editable"].get<bool>();
    }
    if (j.contains("categories")) a.categories = string_list(j["categories"], "categories");
    if (j.contains("thumbnail")) a.thumbnail = string_list(j["thumbnail"], "thumbnail");
    if (j.contains("item")) {
        const auto& item = j["item"];
        if (!item.is_object()) throw Error("annotation-syntax", "item must be an object");
        if (item.contains("thumbnail")) a.thumbnail = string_list(item["thumbnail"], "thumbnail");
        if (item.contains("render")) a.item_render = parse_render(item["render"]);
    }
    if (j.contains("summary")) {
        const auto& s = j["summary"];
        if (!s.is_object()) throw Error("annotation-syntax", "summary must be an object");
        SummarySpec spec;
        if (s.contains("label") && s["label"].is_string()) spec.label = s["label"].get<std::string>();
        else if (s.contains("name") && s["name"].is_string()) spec.label = s["name"].get<std::string>();
        if (!s.contains("derived") || !s["derived"].is_object()) throw Error("annotation-syntax", "summary needs a 'derived' object");
        const auto& d = s["derived"];
        if (!d.contains("field") || !d["field"].is_string()) throw Error("annotation-syntax", "summary.derived needs a 'field'");
        spec.field = d["field"].get<std::string>();
        if (!d.contains("operation") || !d["operation"].is_string()) throw Error("annotation-syntax", "summary.derived needs an 'operation'");
        auto op = summary_op_from_string(d["operation"].get<std::string>());
        if (!op) throw Error("annotation-syntax", "unknown summary operation '" + d["operation"].get<std::string>() + "'");
        spec.operation = *op;
        if (s.contains("predicate") && s["predicate"].is_string()) spec.predicate = s["predicate"].get<std::string>();
        a.summary = std::move(spec);
    }
    return a;
}

AnnotationSet annotations_from_json(const Json& j) {
    if (!j.is_object()) throw Error("annotation-syntax", "annotation set must be an object");
    AnnotationSet set;
    for (const auto& [entity, attrs] : j.items()) {
        if (!attrs.is_object()) throw Error("annotation-syntax", "annotations of '" + entity + "' must be an object");
        for (const auto& [key, a] : attrs.items()) set.set(entity, key, annotation_from_json(a));
    }
    return set;
}

}  // namespace taskui
