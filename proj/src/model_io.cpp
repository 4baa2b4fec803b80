#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fcfs/model.hpp"

namespace fcfs {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ModelError(where + ": unknown field '" + it.key() + "'");
}

std::vector<std::pair<std::string, double>> read_types(const json& doc, const char* field) {
  if (!doc.contains(field)) throw ModelError(std::string("missing field '") + field + "'");
  const json& arr = doc.at(field);
  if (!arr.is_array()) throw ModelError(std::string(field) + ": expected an array");
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    std::string where = std::string(field) + "[" + std::to_string(k) + "]";
    const json& e = arr[k];
    if (!e.is_object()) throw ModelError(where + ": expected an object {name, prob}");
    reject_unknown(e, {"name", "prob"}, where);
    if (!e.contains("name") || !e["name"].is_string())
      throw ModelError(where + ".name: expected a string");
    if (!e.contains("prob") || !e["prob"].is_number())
      throw ModelError(where + ".prob: expected a number");
    out.emplace_back(e["name"].get<std::string>(), e["prob"].get<double>());
  }
  return out;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

RawModel parse_model_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte points one past the offending character
    std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw ModelError("malformed JSON at " + line_col(text, at) + ": " + e.what());
  }
  if (!doc.is_object()) throw ModelError("model file: expected a JSON object at top level");
  reject_unknown(doc, {"customers", "servers", "edges"}, "model file");

  RawModel raw;
  raw.customers = read_types(doc, "customers");
  raw.servers = read_types(doc, "servers");
  if (!doc.contains("edges")) throw ModelError("missing field 'edges'");
  const json& edges = doc["edges"];
  if (!edges.is_array()) throw ModelError("edges: expected an array");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const json& e = edges[k];
    std::string where = "edges[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw ModelError(where + ": expected [customer, server]");
    raw.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return raw;
}

MatchingModel load_model_json(const std::string& text) { return validate_model(parse_model_json(text)); }

MatchingModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot read model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model_json(ss.str());
}

std::string model_to_json(const MatchingModel& model) {
  json doc;
  doc["customers"] = json::array();
  for (int i = 0; i < model.num_customers(); ++i)
    doc["customers"].push_back({{"name", model.customer_name(i)}, {"prob", model.alpha(i)}});
  doc["servers"] = json::array();
  for (int j = 0; j < model.num_servers(); ++j)
    doc["servers"].push_back({{"name", model.server_name(j)}, {"prob", model.beta(j)}});
  doc["edges"] = json::array();
  for (auto [i, j] : model.edges())
    doc["edges"].push_back({model.customer_name(i), model.server_name(j)});
  return doc.dump(2);
}

}  // namespace fcfs
