#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taskui/core/error.hpp"
#include "taskui/core/path.hpp"

namespace taskui {

enum class Mechanism { Validate, Update };

// Exactly one of code / natural is set on a well-formed relationship.
struct Relationship {
    std::optional<std::string> code;
    std::optional<std::string> natural;

    static Relationship of_code(std::string c) { return {std::move(c), std::nullopt}; }
    static Relationship of_text(std::string t) { return {std::nullopt, std::move(t)}; }
    bool operator==(const Relationship&) const = default;
};

// Expressions see `source` and `target` bound to instances:
//   target  the owner, an instance of the target path's entity
//   source  the owner again when both paths start at the same entity, the root
//           instance when the source starts at the root, otherwise the list of
//           all instances of the source entity.
struct Dependency {
    Path source;
    Path target;
    Mechanism mechanism = Mechanism::Update;
    Relationship relationship;

    bool operator==(const Dependency&) const = default;
};

std::string to_string(Mechanism m);
Json to_json(const Dependency& d);
Json to_json(const std::vector<Dependency>& deps);
Dependency dependency_from_json(const Json& j);
std::vector<Dependency> dependencies_from_json(const Json& j);

}  // namespace taskui
