#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "taskui/core/combined.hpp"
#include "taskui/data/dataset.hpp"

namespace taskui::test {

inline std::string fixture_path(const std::string& name) { return std::string(TASKUI_FIXTURES) + "/" + name; }

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline OrderedJson fixture_json(const std::string& name) { return OrderedJson::parse(read_text(fixture_path(name))); }

inline ModelSpec dinner_spec() { return combined_from_json(fixture_json("dinner_model.json")); }
inline ModelSpec stores_spec() { return combined_from_json(fixture_json("dinner_stores.json")); }

inline DataSet dinner_data(const Schema& s) {
    return dataset_from_json(s, Json::parse(read_text(fixture_path("dinner_data.json"))));
}
inline DataSet stores_data(const Schema& s) {
    return dataset_from_json(s, Json::parse(read_text(fixture_path("dinner_stores_data.json"))));
}

}  // namespace taskui::test
