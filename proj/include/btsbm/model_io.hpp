#pragma once

// JSON model files:
//   {"tree": node}
//   node := {"p": number, "children": [node, node]} | {"p": number, "size": integer}

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "btsbm/error.hpp"
#include "btsbm/tree_model.hpp"

namespace btsbm {

namespace detail {

inline TreeSpec parse_tree_node(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw DataError(where + ": tree node must be a JSON object");
  if (!j.contains("p") || !j["p"].is_number()) {
    throw DataError(where + ": node requires numeric \"p\"");
  }
  const bool has_children = j.contains("children");
  const bool has_size = j.contains("size");
  if (has_children == has_size) {
    throw DataError(where + ": node must have exactly one of \"children\" or \"size\"");
  }
  TreeSpec spec;
  spec.p = j["p"].get<double>();
  if (has_size) {
    const auto& s = j["size"];
    if (!s.is_number_integer() || s.get<long long>() < 1) {
      throw DataError(where + ": \"size\" must be a positive integer");
    }
    spec.size = s.get<std::size_t>();
    return spec;
  }
  const auto& c = j["children"];
  if (!c.is_array() || c.size() != 2) {
    throw DataError(where + ": \"children\" must be an array of exactly two nodes");
  }
  spec.children.push_back(parse_tree_node(c[0], where + "0"));
  spec.children.push_back(parse_tree_node(c[1], where + "1"));
  return spec;
}

inline nlohmann::json tree_node_json(const TreeSpec& s) {
  nlohmann::json j;
  j["p"] = s.p;
  if (s.children.empty()) {
    j["size"] = s.size;
  } else {
    j["children"] = nlohmann::json::array({tree_node_json(s.children[0]),
                                           tree_node_json(s.children[1])});
  }
  return j;
}

}  // namespace detail

inline TreeModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("tree")) {
    throw DataError("model file: top level must be an object with a \"tree\" member");
  }
  return TreeModel(detail::parse_tree_node(doc["tree"], "node "));
}

inline TreeModel parse_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("model file: invalid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

inline TreeModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

inline nlohmann::json model_to_json(const TreeModel& model) {
  return nlohmann::json{{"tree", detail::tree_node_json(model.to_spec())}};
}

}  // namespace btsbm
