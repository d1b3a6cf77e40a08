#include "taskui/core/path.hpp"

#include <cctype>

#include "taskui/core/error.hpp"

namespace taskui {

namespace {

bool upper_ident_char(char c) {
    return std::isupper(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
}
bool lower_ident_char(char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
}

[[noreturn]] void syntax(std::string_view text, std::size_t pos, const std::string& what) {
    throw Error("path-syntax", "invalid path '" + std::string(text) + "' at " + std::to_string(pos) + ": " + what,
                {{"path", std::string(text)}, {"position", pos}});
}

}  // namespace

bool is_entity_name(std::string_view s) {
    if (s.empty() || !std::isupper(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!upper_ident_char(c)) return false;
    return true;
}

bool is_attribute_name(std::string_view s) {
    if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!lower_ident_char(c)) return false;
    return true;
}

Path Path::parse(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && upper_ident_char(text[i])) ++i;
    std::string entity(text.substr(0, i));
    if (!is_entity_name(entity)) syntax(text, 0, "expected an UPPER_SNAKE entity name");

    std::vector<PathStep> steps;
    while (i < text.size()) {
        if (text[i] == '.') {
            std::size_t start = ++i;
            while (i < text.size() && lower_ident_char(text[i])) ++i;
            auto name = text.substr(start, i - start);
            if (!is_attribute_name(name)) syntax(text, start, "expected a lower_snake attribute name");
            steps.push_back(PathStep::attr(std::string(name)));
        } else if (text[i] == '[') {
            auto close = text.find(']', i);
            if (close == std::string_view::npos) syntax(text, i, "unterminated '['");
            auto inner = text.substr(i + 1, close - i - 1);
            if (inner == "*") {
                steps.push_back(PathStep::all());
            } else if (inner.substr(0, 3) == "id=") {
                auto value = inner.substr(3);
                if (value.empty()) syntax(text, i, "empty id selector");
                steps.push_back(PathStep::id(std::string(value)));
            } else {
                if (inner.empty()) syntax(text, i, "empty index");
                std::size_t n = 0;
                for (char c : inner) {
                    if (!std::isdigit(static_cast<unsigned char>(c))) syntax(text, i, "index must be a number, '*', or id=<value>");
                    n = n * 10 + static_cast<std::size_t>(c - '0');
                }
                steps.push_back(PathStep::at(n));
            }
            i = close + 1;
        } else {
            syntax(text, i, "unexpected character");
        }
    }
    return Path(std::move(entity), std::move(steps));
}

Path Path::attr(std::string name) const {
    Path p = *this;
    p.steps_.push_back(PathStep::attr(std::move(name)));
    return p;
}
Path Path::at(std::size_t index) const {
    Path p = *this;
    p.steps_.push_back(PathStep::at(index));
    return p;
}
Path Path::all() const {
    Path p = *this;
    p.steps_.push_back(PathStep::all());
    return p;
}
Path Path::id(std::string value) const {
    Path p = *this;
    p.steps_.push_back(PathStep::id(std::move(value)));
    return p;
}
Path Path::parent() const {
    Path p = *this;
    if (!p.steps_.empty()) p.steps_.pop_back();
    return p;
}

std::string Path::str() const {
    std::string out = entity_;
    for (const auto& s : steps_) {
        switch (s.kind) {
            case PathStep::Kind::Attr: out += '.'; out += s.name; break;
            case PathStep::Kind::Index: out += '[' + std::to_string(s.index) + ']'; break;
            case PathStep::Kind::All: out += "[*]"; break;
            case PathStep::Kind::Id: out += "[id=" + s.name + ']'; break;
        }
    }
    return out;
}

}  // namespace taskui
