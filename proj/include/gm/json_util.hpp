#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <string>

namespace gm {

using Json = nlohmann::ordered_json;

// Dense matrix as a JSON array of row arrays. Doubles survive the round trip
// bit-for-bit (shortest-round-trip formatting on write).
Json matrix_to_json(const Eigen::MatrixXd& m);

// Parses an array of row arrays; all rows must have equal length. When
// expected_cols >= 0 the column count must match. Throws DataError.
Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what, int expected_cols = -1);

// Reads and parses a JSON file. Throws DataError on a missing/unreadable file
// or malformed JSON (the message includes the parser's position info).
Json read_json_file(const std::string& path);

// Writes with 2-space indentation and a trailing newline. Throws DataError on
// I/O failure.
void write_json_file(const std::string& path, const Json& j);

// Writes a string to a file (throws DataError on failure).
void write_text_file(const std::string& path, const std::string& text);

// Field access helpers: missing key or wrong type -> DataError naming the key.
const Json& require_key(const Json& j, const std::string& key, const std::string& where);

// Shortest decimal representation that round-trips the double exactly; used
// wherever numbers land in text logs so equal values print identically.
inline std::string format_double(double x) { return Json(x).dump(); }

}  // namespace gm
