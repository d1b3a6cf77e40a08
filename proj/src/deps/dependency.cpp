#include "taskui/deps/dependency.hpp"

#include <algorithm>
#include <cctype>

namespace taskui {

std::string to_string(Mechanism m) { return m == Mechanism::Validate ? "Validate" : "Update"; }

Json to_json(const Dependency& d) {
    Json rel = Json::object();
    if (d.relationship.code) rel["code"] = *d.relationship.code;
    if (d.relationship.natural) rel["natural"] = *d.relationship.natural;
    return {{"source", d.source.str()}, {"target", d.target.str()}, {"mechanism", to_string(d.mechanism)},
            {"relationship", rel}};
}

Json to_json(const std::vector<Dependency>& deps) {
    Json arr = Json::array();
    for (const auto& d : deps) arr.push_back(to_json(d));
    return arr;
}

Dependency dependency_from_json(const Json& j) {
    if (!j.is_object()) throw Error("dependency-syntax", "dependency must be an object");
    for (const char* key : {"source", "target", "mechanism"})
        if (!j.contains(key) || !j[key].is_string())
            throw Error("dependency-syntax", std::string("dependency needs a string '") + key + "'");
    Dependency d;
    d.source = Path::parse(j["source"].get<std::string>());
    d.target = Path::parse(j["target"].get<std::string>());
    std::string mech = j["mechanism"].get<std::string>();
    std::transform(mech.begin(), mech.end(), mech.begin(), [](unsigned char c) { return std::tolower(c); });
    if (mech == "validate") d.mechanism = Mechanism::Validate;
    else if (mech == "update") d.mechanism = Mechanism::Update;
    else throw Error("dependency-syntax", "mechanism must be Validate or Update");
    if (!j.contains("relationship")) throw Error("dependency-syntax", "dependency needs a 'relationship'");
    const auto& r = j["relationship"];
    if (r.is_string()) {
        d.relationship.natural = r.get<std::string>();
    } else if (r.is_object()) {
        if (r.contains("code") && r["code"].is_string()) d.relationship.code = r["code"].get<std::string>();
        if (r.contains("natural") && r["natural"].is_string()) d.relationship.natural = r["natural"].get<std::string>();
    } else {
        throw Error("dependency-syntax", "relationship must be an object with 'code' or 'natural'");
    }
    return d;
}

std::vector<Dependency> dependencies_from_json(const Json& j) {
    const Json& arr = j.is_object() && j.contains("dependencies") ? j["dependencies"] : j;
    if (!arr.is_array()) throw Error("dependency-syntax", "dependencies must be a list");
    std::vector<Dependency> out;
    for (const auto& d : arr) out.push_back(dependency_from_json(d));
    return out;
}

}  // namespace taskui
