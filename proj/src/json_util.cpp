#include "gm/json_util.hpp"

#include <fstream>
#include <sstream>

#include "gm/errors.hpp"

namespace gm {

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what, int expected_cols) {
  if (!j.is_array()) throw DataError(what + ": expected an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = expected_cols;
  if (n == 0) {
    if (cols < 0) cols = 0;
    return Eigen::MatrixXd(0, cols);
  }
  if (!j[0].is_array()) throw DataError(what + ": expected an array of rows");
  if (cols < 0) cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw DataError(what + ": row " + std::to_string(i) + " has the wrong length");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw DataError(what + ": non-numeric entry");
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open file for writing: " + path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

const Json& require_key(const Json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(where + ": missing key '" + key + "'");
  return *it;
}

}  // namespace gm
