#include "gm/dataset_io.hpp"

#include "gm/errors.hpp"
#include "gm/graph.hpp"

namespace gm {

namespace {

constexpr const char* kFormat = "graphmatch.dataset";
constexpr int kVersion = 1;

template <typename T>
T get_number(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = require_key(j, key, where);
  if (!v.is_number()) throw DataError(where + ": '" + key + "' must be a number");
  return v.get<T>();
}

}  // namespace

Json synthetic_config_to_json(const SyntheticConfig& cfg) {
  Json j;
  j["n_inliers"] = cfg.n_inliers;
  j["n_outliers_source"] = cfg.n_outliers_source;
  j["n_outliers_target"] = cfg.n_outliers_target;
  j["feature_dim"] = cfg.feature_dim;
  j["coord_noise_sigma"] = cfg.coord_noise_sigma;
  j["feature_noise_sigma"] = cfg.feature_noise_sigma;
  j["n_classes"] = cfg.n_classes;
  j["pairs_per_class"] = cfg.pairs_per_class;
  j["seed"] = cfg.seed;
  j["include_coords_in_features"] = cfg.include_coords_in_features;
  return j;
}

SyntheticConfig synthetic_config_from_json(const Json& j) {
  const std::string where = "synthetic config";
  if (!j.is_object()) throw DataError(where + ": expected an object");
  SyntheticConfig cfg;
  cfg.n_inliers = get_number<int>(j, "n_inliers", where);
  cfg.n_outliers_source = get_number<int>(j, "n_outliers_source", where);
  cfg.n_outliers_target = get_number<int>(j, "n_outliers_target", where);
  cfg.feature_dim = get_number<int>(j, "feature_dim", where);
  cfg.coord_noise_sigma = get_number<double>(j, "coord_noise_sigma", where);
  cfg.feature_noise_sigma = get_number<double>(j, "feature_noise_sigma", where);
  cfg.n_classes = get_number<int>(j, "n_classes", where);
  cfg.pairs_per_class = get_number<int>(j, "pairs_per_class", where);
  cfg.seed = get_number<std::uint64_t>(j, "seed", where);
  const Json& inc = require_key(j, "include_coords_in_features", where);
  if (!inc.is_boolean()) throw DataError(where + ": 'include_coords_in_features' must be a bool");
  cfg.include_coords_in_features = inc.get<bool>();
  return cfg;
}

Json graph_to_json(const Graph& g) {
  Json j;
  j["graph_id"] = g.graph_id;
  j["class_id"] = g.class_id;
  j["n"] = g.num_nodes();
  j["features"] = matrix_to_json(g.features);
  Json edges = Json::array();
  for (const auto& [a, b] : edges_of(g.adjacency)) edges.push_back(Json::array({a, b}));
  j["edges"] = std::move(edges);
  if (g.coords) j["coords"] = matrix_to_json(*g.coords);
  return j;
}

Graph graph_from_json(const Json& j) {
  const std::string where = "graph";
  if (!j.is_object()) throw DataError(where + ": expected an object");
  Graph g;
  const Json& id = require_key(j, "graph_id", where);
  if (!id.is_string()) throw DataError(where + ": 'graph_id' must be a string");
  g.graph_id = id.get<std::string>();
  g.class_id = get_number<int>(j, "class_id", where);
  const int n = get_number<int>(j, "n", where);
  if (n < 1) throw DataError(where + " '" + g.graph_id + "': n must be >= 1");
  g.features = matrix_from_json(require_key(j, "features", where), where + " features");
  if (g.features.rows() != n)
    throw DataError(where + " '" + g.graph_id + "': features row count disagrees with n");

  const Json& edges = require_key(j, "edges", where);
  if (!edges.is_array()) throw DataError(where + ": 'edges' must be an array");
  std::vector<std::pair<int, int>> edge_list;
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw DataError(where + " '" + g.graph_id + "': each edge must be an [i, j] pair");
    edge_list.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  g.adjacency = adjacency_from_edges(n, edge_list);

  if (j.contains("coords")) g.coords = matrix_from_json(j["coords"], where + " coords", 2);
  g.validate();
  return g;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  Json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["config"] = synthetic_config_to_json(ds.config);
  Json classes = Json::array();
  for (const auto& c : ds.classes) {
    Json cj;
    cj["class_id"] = c.class_id;
    Json tj;
    tj["coords"] = matrix_to_json(c.tmpl.coords);
    tj["features"] = matrix_to_json(c.tmpl.features);
    cj["template"] = std::move(tj);
    Json pairs = Json::array();
    for (const auto& p : c.pairs) {
      Json pj;
      pj["source"] = graph_to_json(p.source);
      pj["target"] = graph_to_json(p.target);
      Json gt = Json::array();
      for (const auto& [s, t] : p.gt_matching) gt.push_back(Json::array({s, t}));
      pj["gt"] = std::move(gt);
      pairs.push_back(std::move(pj));
    }
    cj["pairs"] = std::move(pairs);
    classes.push_back(std::move(cj));
  }
  j["classes"] = std::move(classes);
  write_json_file(path, j);
}

Dataset load_dataset(const std::string& path) {
  const Json j = read_json_file(path);
  if (!j.is_object() || !j.contains("format") || !j["format"].is_string() ||
      j["format"].get<std::string>() != kFormat)
    throw DataError(path + ": not a dataset file (bad or missing format marker)");
  const int version = get_number<int>(j, "version", path);
  if (version != kVersion)
    throw DataError(path + ": unsupported dataset schema version " + std::to_string(version));

  Dataset ds;
  ds.config = synthetic_config_from_json(require_key(j, "config", path));
  const Json& classes = require_key(j, "classes", path);
  if (!classes.is_array()) throw DataError(path + ": 'classes' must be an array");
  for (const auto& cj : classes) {
    Dataset::ClassEntry entry;
    entry.class_id = get_number<int>(cj, "class_id", path);
    const Json& tj = require_key(cj, "template", path);
    entry.tmpl.coords = matrix_from_json(require_key(tj, "coords", path), "template coords", 2);
    entry.tmpl.features = matrix_from_json(require_key(tj, "features", path), "template features");
    const Json& pairs = require_key(cj, "pairs", path);
    if (!pairs.is_array()) throw DataError(path + ": 'pairs' must be an array");
    for (const auto& pj : pairs) {
      GraphPair p;
      p.source = graph_from_json(require_key(pj, "source", path));
      p.target = graph_from_json(require_key(pj, "target", path));
      const Json& gt = require_key(pj, "gt", path);
      if (!gt.is_array()) throw DataError(path + ": 'gt' must be an array");
      for (const auto& m : gt) {
        if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() ||
            !m[1].is_number_integer())
          throw DataError(path + ": each gt entry must be an [i, j] pair");
        p.gt_matching.emplace_back(m[0].get<int>(), m[1].get<int>());
      }
      p.validate();
      entry.pairs.push_back(std::move(p));
    }
    ds.classes.push_back(std::move(entry));
  }
  return ds;
}

}  // namespace gm
