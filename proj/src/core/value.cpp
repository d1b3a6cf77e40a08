#include "taskui/core/value.hpp"

#include <cmath>

namespace taskui {

const Value* Value::find(std::string_view key) const {
    if (!is_dict()) return nullptr;
    const auto& d = as_dict();
    auto it = d.find(key);
    return it == d.end() ? nullptr : &it->second;
}

std::string Value::type_name() const {
    switch (v_.index()) {
        case 0: return "empty";
        case 1: return "bool";
        case 2: return "number";
        case 3: return "text";
        case 4: return "ref";
        case 5: return "list";
        default: return "dict";
    }
}

bool Value::operator==(const Value& other) const {
    if (v_.index() != other.v_.index()) return false;
    switch (v_.index()) {
        case 0: return true;
        case 1: return as_bool() == other.as_bool();
        case 2: return as_number() == other.as_number();
        case 3: return as_text() == other.as_text();
        case 4: return as_ref() == other.as_ref();
        case 5: {
            const auto& a = std::get<ListPtr>(v_);
            const auto& b = std::get<ListPtr>(other.v_);
            return a == b || *a == *b;
        }
        default: {
            const auto& a = std::get<DictPtr>(v_);
            const auto& b = std::get<DictPtr>(other.v_);
            return a == b || *a == *b;
        }
    }
}

Json to_json(const Value& v) {
    if (v.is_empty()) return nullptr;
    if (v.is_bool()) return v.as_bool();
    if (v.is_number()) {
        double d = v.as_number();
        if (std::isfinite(d) && std::floor(d) == d && std::fabs(d) < 9007199254740992.0)
            return static_cast<std::int64_t>(d);
        return d;
    }
    if (v.is_text()) return v.as_text();
    if (v.is_ref()) {
        if (v.as_ref().is_null()) return nullptr;
        return v.as_ref().id;
    }
    if (v.is_list()) {
        Json arr = Json::array();
        for (const auto& item : v.as_list()) arr.push_back(to_json(item));
        return arr;
    }
    Json obj = Json::object();
    for (const auto& [k, item] : v.as_dict()) obj[k] = to_json(item);
    return obj;
}

Value value_from_json(const Json& j) {
    switch (j.type()) {
        case Json::value_t::null: return Value::empty();
        case Json::value_t::boolean: return Value(j.get<bool>());
        case Json::value_t::number_integer:
        case Json::value_t::number_unsigned:
        case Json::value_t::number_float: return Value(j.get<double>());
        case Json::value_t::string: return Value(j.get<std::string>());
        case Json::value_t::array: {
            Value::List list;
            for (const auto& item : j) list.push_back(value_from_json(item));
            return Value(std::move(list));
        }
        case Json::value_t::object: {
            Value::Dict dict;
            for (const auto& [k, item] : j.items()) dict.emplace(k, value_from_json(item));
            return Value(std::move(dict));
        }
        default: throw Error("type-mismatch", "unsupported JSON value");
    }
}

std::string to_display(const Value& v) {
    if (v.is_text()) return v.as_text();
    if (v.is_ref()) return v.as_ref().is_null() ? std::string() : v.as_ref().id;
    if (v.is_empty()) return "";
    return to_json(v).dump();
}

}  // namespace taskui
