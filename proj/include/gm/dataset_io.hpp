#pragma once

#include <string>

#include "gm/json_util.hpp"
#include "gm/synthetic.hpp"

namespace gm {

// JSON (de)serialization of synthetic configs, graphs and datasets. Saving a
// loaded dataset reproduces the original file byte-for-byte (doubles are
// written in shortest-round-trip form, edge lists sorted, key order fixed).

Json synthetic_config_to_json(const SyntheticConfig& cfg);
SyntheticConfig synthetic_config_from_json(const Json& j);  // throws DataError

Json graph_to_json(const Graph& g);
Graph graph_from_json(const Json& j);  // throws DataError (validates)

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);  // throws DataError

}  // namespace gm
