#pragma once

// JSON formats shared by the command-line tools.
//
// Matrix collection:
//   {"m": 2, "kind": "spd" | "block",
//    "items": [{"rows": 2, "data": [[1, 0], [0, 1]]}, ...]}
// Draw line (one JSON object per line):
//   {"family": "beta2", "index": 0, "matrices": [[[...]], ...]}

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mmv/matrix_core.hpp"
#include "mmv/samplers.hpp"

namespace mmv::io {

// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CollectionKind { spd, block };

struct MatrixCollection {
  int m = 1;
  CollectionKind kind = CollectionKind::spd;
  std::vector<Matrix> items;
};

// Validates shapes, symmetry and positive definiteness (kind spd) and
// rows >= m (kind block). Syntax errors report line and column.
MatrixCollection parse_collection(std::string_view text);
std::string dump_collection(const MatrixCollection& c);

// Observations for density evaluation. Accepts a matrix collection (each
// item one single-matrix observation, or an item {"matrices": [...]}) or
// draw lines as written by `sample`.
std::vector<Draw> parse_observations(std::string_view text);

std::string dump_draw(std::string_view family, std::size_t index, const Draw& draw);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace mmv::io
