#include "taskui/llm/repair.hpp"

#include <optional>
#include <vector>

namespace taskui {

namespace {

bool shape_ok(const Json& j, const std::string& expect) {
    if (expect == "object") return j.is_object();
    if (expect == "array") return j.is_array();
    return !j.is_discarded();
}

std::optional<Json> try_parse(const std::string& text, const std::string& expect, std::string& diagnostic) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        try {
            auto strict = Json::parse(text);
            (void)strict;
        } catch (const std::exception& e) {
            diagnostic = e.what();
        }
        return std::nullopt;
    }
    if (!shape_ok(j, expect)) {
        diagnostic = "expected a JSON " + expect + ", got " + std::string(j.type_name());
        return std::nullopt;
    }
    return j;
}

std::optional<std::string> fence_body(const std::string& raw) {
    auto fence = raw.find("```");
    if (fence == std::string::npos) return std::nullopt;
    auto body = raw.find('\n', fence);
    if (body == std::string::npos) return std::nullopt;
    auto end = raw.find("```", body);
    return raw.substr(body + 1, end == std::string::npos ? std::string::npos : end - body - 1);
}

std::size_t first_opener(const std::string& raw, const std::string& expect) {
    return raw.find_first_of(expect == "object" ? "{" : expect == "array" ? "[" : "{[");
}

// Body of the first ``` fence, or the span from the first opening bracket to the last closing one.
std::string strip_wrapping(const std::string& raw, const std::string& expect) {
    if (auto body = fence_body(raw)) return *body;
    auto start = first_opener(raw, expect);
    if (start == std::string::npos) return raw;
    char close = raw[start] == '{' ? '}' : ']';
    auto stop = raw.find_last_of(close);
    if (stop == std::string::npos || stop < start) return raw.substr(start);
    return raw.substr(start, stop - start + 1);
}

// Drops trailing commas and closes whatever is still open, string-aware.
std::string balance(const std::string& text) {
    std::string out;
    std::string stack;
    bool in_string = false, escaped = false;
    for (char c : text) {
        if (in_string) {
            out += c;
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{' || c == '[') {
            stack += c == '{' ? '}' : ']';
        } else if (c == '}' || c == ']') {
            auto last = out.find_last_not_of(" \t\r\n");
            if (last != std::string::npos && out[last] == ',') out.erase(last, 1);
            if (stack.empty() || stack.back() != c) continue;  // stray closer
            stack.pop_back();
        }
        out += c;
    }
    if (in_string) out += '"';
    auto last = out.find_last_not_of(" \t\r\n");
    if (last != std::string::npos && (out[last] == ',' || out[last] == ':')) {
        if (out[last] == ':') out += "null";
        else out.erase(last, 1);
    }
    while (!stack.empty()) {
        out += stack.back();
        stack.pop_back();
    }
    return out;
}

}  // namespace

RepairOutcome repair_json(const std::string& raw, const std::string& expect) {
    Json attempts = Json::array();
    std::string diag;
    if (auto j = try_parse(raw, expect, diag)) return {*j, raw, {}};
    attempts.push_back({{"step", "parse"}, {"error", diag}});

    std::string stripped = strip_wrapping(raw, expect);
    if (auto j = try_parse(stripped, expect, diag)) return {*j, stripped, {"strip-wrapping"}};
    attempts.push_back({{"step", "strip-wrapping"}, {"error", diag}});

    // A truncated answer keeps everything after its opener; cutting at the last
    // closer would lose a tail whose brackets sit inside strings.
    std::vector<std::string> candidates;
    if (auto body = fence_body(raw)) candidates.push_back(*body);
    else if (auto start = first_opener(raw, expect); start != std::string::npos) candidates.push_back(raw.substr(start));
    candidates.push_back(stripped);
    for (const auto& c : candidates) {
        std::string balanced = balance(c);
        if (auto j = try_parse(balanced, expect, diag)) return {*j, balanced, {"strip-wrapping", "balance"}};
        attempts.push_back({{"step", "balance"}, {"error", diag}});
    }

    throw Error("irreparable-response", "response is not usable JSON: " + diag, {{"attempts", attempts}});
}

}  // namespace taskui
