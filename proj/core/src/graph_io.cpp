#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dcolor/graph.hpp"

namespace dcolor {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text << '\n';
}

NodeId node_key(const std::string& key, NodeId n) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(key, &used);
  } catch (const std::logic_error&) {
    throw ParseError("bad node key '" + key + "'");
  }
  if (used != key.size() || v >= n) throw ParseError("bad node key '" + key + "'");
  return static_cast<NodeId>(v);
}

}  // namespace

ListColoringInstance parse_instance(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
  try {
    const auto n = doc.at("n").get<NodeId>();
    std::vector<Edge> edges;
    for (const auto& e : doc.value("edges", json::array())) {
      if (!e.is_array() || e.size() != 2) throw ParseError("edge entries must be [u,v] pairs");
      edges.push_back({e[0].get<NodeId>(), e[1].get<NodeId>()});
    }
    Graph graph(n, edges);

    ListColoringInstance inst;
    if (doc.contains("lists")) {
      inst.lists.resize(n);
      std::vector<bool> seen(n, false);
      for (const auto& [key, value] : doc["lists"].items()) {
        const NodeId v = node_key(key, n);
        auto list = value.get<std::vector<Color>>();
        std::sort(list.begin(), list.end());
        if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
          throw ValidationError("node " + key + ": duplicate color in list");
        }
        inst.lists[v] = std::move(list);
        seen[v] = true;
      }
      for (NodeId v = 0; v < n; ++v) {
        if (!seen[v]) throw ValidationError("node " + std::to_string(v) + ": missing list");
      }
      Color max_color = 0;
      for (const auto& list : inst.lists) {
        if (!list.empty()) max_color = std::max(max_color, list.back() + 1);
      }
      inst.C = doc.contains("C") ? doc["C"].get<Color>() : max_color;
      inst.graph = std::move(graph);
    } else {
      inst = attach_default_lists(std::move(graph));
      if (doc.contains("C")) {
        const auto c = doc["C"].get<Color>();
        if (c < inst.C) throw ValidationError("C smaller than max degree + 1 for default lists");
        inst.C = c;
      }
    }
    if (doc.contains("psi")) {
      InputColoring psi;
      psi.colors.assign(n, 0);
      std::vector<bool> seen(n, false);
      for (const auto& [key, value] : doc["psi"].items()) {
        const NodeId v = node_key(key, n);
        psi.colors[v] = value.get<Color>();
        psi.classes = std::max(psi.classes, psi.colors[v] + 1);
        seen[v] = true;
      }
      for (NodeId v = 0; v < n; ++v) {
        if (!seen[v]) throw ValidationError("node " + std::to_string(v) + ": missing psi value");
      }
      inst.psi = std::move(psi);
    }
    validate_instance(inst);
    return inst;
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
}

ListColoringInstance load_instance(const std::filesystem::path& path) { return parse_instance(read_file(path)); }

std::string instance_to_json(const ListColoringInstance& inst) {
  json doc;
  doc["n"] = inst.graph.size();
  json edges = json::array();
  for (const Edge& e : inst.graph.edges()) edges.push_back({e.u, e.v});
  doc["edges"] = std::move(edges);
  doc["C"] = inst.C;
  json lists = json::object();
  for (NodeId v = 0; v < inst.graph.size(); ++v) lists[std::to_string(v)] = inst.lists[v];
  doc["lists"] = std::move(lists);
  if (inst.psi) {
    json psi = json::object();
    for (NodeId v = 0; v < inst.graph.size(); ++v) psi[std::to_string(v)] = inst.psi->colors[v];
    doc["psi"] = std::move(psi);
  }
  return doc.dump();
}

void save_instance(const ListColoringInstance& inst, const std::filesystem::path& path) {
  write_file(path, instance_to_json(inst));
}

PartialColoring parse_coloring(const std::string& json_text, NodeId n) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("coloring JSON: ") + e.what());
  }
  PartialColoring coloring(n);
  try {
    const auto& colors = doc.at("colors");
    if (colors.is_array()) {
      if (colors.size() != n) throw ParseError("coloring has " + std::to_string(colors.size()) + " entries, expected " + std::to_string(n));
      for (NodeId v = 0; v < n; ++v) {
        if (!colors[v].is_null()) coloring.assignment[v] = colors[v].get<Color>();
      }
    } else {
      for (const auto& [key, value] : colors.items()) {
        if (!value.is_null()) coloring.assignment[node_key(key, n)] = value.get<Color>();
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("coloring JSON: ") + e.what());
  }
  return coloring;
}

PartialColoring load_coloring(const std::filesystem::path& path, NodeId n) {
  return parse_coloring(read_file(path), n);
}

std::string coloring_to_json(const PartialColoring& coloring) {
  json colors = json::array();
  for (const auto& c : coloring.assignment) {
    if (c) colors.push_back(*c);
    else colors.push_back(nullptr);
  }
  json doc;
  doc["n"] = coloring.assignment.size();
  doc["colors"] = std::move(colors);
  return doc.dump();
}

}  // namespace dcolor
