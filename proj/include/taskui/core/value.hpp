#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "taskui/core/error.hpp"

namespace taskui {

using ObjectId = std::string;

// Reference to an entity instance. An empty id is the null-pointer marker.
struct Ref {
    ObjectId id;

    static Ref null() { return Ref{}; }
    bool is_null() const { return id.empty(); }
    bool operator==(const Ref&) const = default;
};

// Immutable data value. Lists and dicts share their storage, so copying a
// Value (and therefore a whole DataSet snapshot) is cheap.
class Value {
public:
    using List = std::vector<Value>;
    using Dict = std::map<std::string, Value, std::less<>>;

    Value() = default;  // the empty marker
    Value(bool b) : v_(b) {}
    Value(double d) : v_(d) {}
    Value(int i) : v_(static_cast<double>(i)) {}
    Value(long long i) : v_(static_cast<double>(i)) {}
    Value(std::string s) : v_(std::move(s)) {}
    Value(const char* s) : v_(std::string(s)) {}
    Value(Ref r) : v_(std::move(r)) {}
    Value(List l) : v_(std::make_shared<const List>(std::move(l))) {}
    Value(Dict d) : v_(std::make_shared<const Dict>(std::move(d))) {}

    static Value empty() { return Value(); }

    bool is_empty() const { return v_.index() == 0; }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_number() const { return std::holds_alternative<double>(v_); }
    bool is_text() const { return std::holds_alternative<std::string>(v_); }
    bool is_ref() const { return std::holds_alternative<Ref>(v_); }
    bool is_list() const { return std::holds_alternative<ListPtr>(v_); }
    bool is_dict() const { return std::holds_alternative<DictPtr>(v_); }

    bool as_bool() const { return std::get<bool>(v_); }
    double as_number() const { return std::get<double>(v_); }
    const std::string& as_text() const { return std::get<std::string>(v_); }
    const Ref& as_ref() const { return std::get<Ref>(v_); }
    const List& as_list() const { return *std::get<ListPtr>(v_); }
    const Dict& as_dict() const { return *std::get<DictPtr>(v_); }

    // Dict lookup; nullptr when absent or not a dict.
    const Value* find(std::string_view key) const;

    std::string type_name() const;

    bool operator==(const Value& other) const;
    bool operator!=(const Value& other) const { return !(*this == other); }

private:
    using ListPtr = std::shared_ptr<const List>;
    using DictPtr = std::shared_ptr<const Dict>;
    std::variant<std::monostate, bool, double, std::string, Ref, ListPtr, DictPtr> v_;
};

// Plain JSON encoding: refs become their id string (null ref -> null),
// integral numbers are emitted as integers.
Json to_json(const Value& v);

// Schema-less decoding: strings decode as text, never as refs.
Value value_from_json(const Json& j);

std::string to_display(const Value& v);

}  // namespace taskui
