#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace taskui {

// One step after the leading entity name.
struct PathStep {
    enum class Kind { Attr, Index, All, Id };

    Kind kind = Kind::Attr;
    std::string name;        // attribute name (Attr) or id value (Id)
    std::size_t index = 0;   // Index only

    static PathStep attr(std::string n) { return {Kind::Attr, std::move(n), 0}; }
    static PathStep at(std::size_t i) { return {Kind::Index, {}, i}; }
    static PathStep all() { return {Kind::All, {}, 0}; }
    static PathStep id(std::string v) { return {Kind::Id, std::move(v), 0}; }

    bool operator==(const PathStep&) const = default;
};

// Address into a schema or data set:
//   ENTITY(.attr | [<index>] | [*] | [id=<value>])*
// Entity names are UPPER_SNAKE, attributes lower_snake.
class Path {
public:
    Path() = default;
    explicit Path(std::string entity, std::vector<PathStep> steps = {})
        : entity_(std::move(entity)), steps_(std::move(steps)) {}

    // Throws Error("path-syntax") on malformed input.
    static Path parse(std::string_view text);

    const std::string& entity() const { return entity_; }
    const std::vector<PathStep>& steps() const { return steps_; }
    bool empty() const { return entity_.empty(); }

    Path attr(std::string name) const;
    Path at(std::size_t index) const;
    Path all() const;
    Path id(std::string value) const;
    Path parent() const;

    std::string str() const;

    bool operator==(const Path&) const = default;
    bool operator<(const Path& other) const { return str() < other.str(); }

private:
    std::string entity_;
    std::vector<PathStep> steps_;
};

bool is_entity_name(std::string_view s);
bool is_attribute_name(std::string_view s);

}  // namespace taskui
