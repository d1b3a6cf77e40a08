#include "taskui/session/session.hpp"

#include "taskui/core/schema_ops.hpp"
#include "taskui/deps/engine.hpp"

namespace taskui {

Json to_json(const Session& s) {
    return {{"schema", to_json(s.schema)},
            {"annotations", to_json(s.annotations)},
            {"dependencies", to_json(s.dependencies)},
            {"data", to_json(s.data)},
            {"view", to_json(s.view)},
            {"prompts", s.prompts}};
}

Session session_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("schema") || !j.contains("data"))
        throw Error("session-syntax", "session document needs 'schema' and 'data'");
    Session s;
    s.schema = schema_from_json(OrderedJson::parse(j["schema"].dump()));
    if (j.contains("annotations")) s.annotations = annotations_from_json(j["annotations"]);
    else s.annotations = default_annotations(s.schema);
    if (j.contains("dependencies")) s.dependencies = dependencies_from_json(j["dependencies"]);
    s.data = dataset_from_json(s.schema, j["data"]);
    if (j.contains("view") && j["view"].is_object()) s.view = view_from_json(j["view"]);
    if (j.contains("prompts")) {
        if (!j["prompts"].is_array()) throw Error("session-syntax", "'prompts' must be an array");
        for (const auto& p : j["prompts"]) s.prompts.push_back(p.get<std::string>());
    }
    return s;
}

ValidationReport validate_session(const Session& s) {
    ValidationReport r = validate_schema(s.schema);
    if (!r.ok()) return r;
    r.merge(validate_annotations(s.schema, s.annotations));
    try {
        (void)build_graph(s.schema, s.dependencies);
    } catch (const Error& e) {
        r.add("dependencies", e.code(), e.what());
    }
    r.merge(validate_data(s.schema, s.data));
    return r;
}

UIDocument compile_session(const Session& s) { return compile_document(s.schema, s.annotations, s.data, s.view); }

}  // namespace taskui
