#pragma once

#include <string>
#include <vector>

#include "taskui/core/annotation.hpp"
#include "taskui/core/schema.hpp"
#include "taskui/core/validation.hpp"
#include "taskui/data/dataset.hpp"
#include "taskui/deps/dependency.hpp"
#include "taskui/ui/compiler.hpp"

namespace taskui {

// Everything one workspace holds. Copies are cheap: data values share storage.
struct Session {
    Schema schema;
    AnnotationSet annotations;
    std::vector<Dependency> dependencies;
    DataSet data;
    ViewState view;
    std::vector<std::string> prompts;  // earlier prompts, oldest first

    bool operator==(const Session&) const = default;
};

Json to_json(const Session& s);
// Errors: session-syntax, plus whatever the schema/data decoders raise.
Session session_from_json(const Json& j);

// Schema, annotations, dependency graph and data together.
ValidationReport validate_session(const Session& s);

UIDocument compile_session(const Session& s);

}  // namespace taskui
