#include "mmv/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mmv::io {

namespace {

using nlohmann::json;

std::string position(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  std::ostringstream os;
  os << "line " << line << ", column " << column;
  return os.str();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte counts the offending character itself.
    throw DataError("malformed JSON at " + position(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                    e.what());
  }
}

Matrix matrix_from_rows(const json& rows_json, const std::string& what) {
  if (!rows_json.is_array() || rows_json.empty()) {
    throw DataError(what + ": data must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(rows_json.size());
  const auto& first = rows_json[0];
  if (!first.is_array() || first.empty()) throw DataError(what + ": each row must be an array");
  const auto cols = static_cast<Eigen::Index>(first.size());
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = rows_json[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DataError(what + ": ragged rows");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw DataError(what + ": entries must be numbers");
      out(i, j) = v.get<double>();
    }
  }
  return out;
}

json rows_json(const Matrix& x) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < x.cols(); ++j) row.push_back(x(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Draw draw_from_json(const json& matrices, const std::string& what) {
  if (!matrices.is_array() || matrices.empty()) {
    throw DataError(what + ": \"matrices\" must be a non-empty array");
  }
  Draw d;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    d.push_back(matrix_from_rows(matrices[i], what + " matrix " + std::to_string(i)));
  }
  return d;
}

}  // namespace

MatrixCollection parse_collection(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw DataError("collection: top level must be an object");
  MatrixCollection c;
  if (!doc.contains("m") || !doc["m"].is_number_integer() || doc["m"].get<int>() < 1) {
    throw DataError("collection: \"m\" must be a positive integer");
  }
  c.m = doc["m"].get<int>();
  const std::string kind = doc.value("kind", std::string("spd"));
  if (kind == "spd") {
    c.kind = CollectionKind::spd;
  } else if (kind == "block") {
    c.kind = CollectionKind::block;
  } else {
    throw DataError("collection: \"kind\" must be \"spd\" or \"block\"");
  }
  if (!doc.contains("items") || !doc["items"].is_array()) {
    throw DataError("collection: \"items\" must be an array");
  }
  const auto& items = doc["items"];
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string what = "item " + std::to_string(i);
    const auto& item = items[i];
    const json* data = &item;
    if (item.is_object()) {
      if (!item.contains("data")) throw DataError(what + ": missing \"data\"");
      data = &item["data"];
    }
    Matrix x = matrix_from_rows(*data, what);
    if (item.is_object() && item.contains("rows")) {
      if (!item["rows"].is_number_integer() || item["rows"].get<Eigen::Index>() != x.rows()) {
        throw DataError(what + ": \"rows\" does not match the data");
      }
    }
    if (x.cols() != c.m) {
      throw DataError(what + ": expected " + std::to_string(c.m) + " columns");
    }
    if (c.kind == CollectionKind::spd) {
      if (x.rows() != c.m) throw DataError(what + ": spd items must be m x m");
      if (!is_symmetric(x)) throw DataError(what + ": not symmetric");
      if (!is_spd(x)) throw DataError(what + ": not positive definite");
      x = symmetrize(x);
    } else if (x.rows() < c.m) {
      throw DataError(what + ": block items need rows >= m");
    }
    c.items.push_back(std::move(x));
  }
  return c;
}

std::string dump_collection(const MatrixCollection& c) {
  json doc;
  doc["m"] = c.m;
  doc["kind"] = c.kind == CollectionKind::spd ? "spd" : "block";
  doc["items"] = json::array();
  for (const auto& x : c.items) {
    doc["items"].push_back({{"rows", x.rows()}, {"data", rows_json(x)}});
  }
  return doc.dump() + "\n";
}

std::vector<Draw> parse_observations(std::string_view text) {
  // A single document first; otherwise one draw per line.
  bool single = true;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error&) {
    single = false;
  }
  std::vector<Draw> out;
  if (single && doc.is_object() && doc.contains("items")) {
    if (!doc["items"].is_array()) throw DataError("collection: \"items\" must be an array");
    const auto& items = doc["items"];
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string what = "item " + std::to_string(i);
      const auto& item = items[i];
      if (item.is_object() && item.contains("matrices")) {
        out.push_back(draw_from_json(item["matrices"], what));
      } else {
        const json& data = item.is_object() ? item.at("data") : item;
        out.push_back({matrix_from_rows(data, what)});
      }
    }
    return out;
  }
  if (single && doc.is_object() && doc.contains("matrices")) {
    out.push_back(draw_from_json(doc["matrices"], "draw 0"));
    return out;
  }
  if (single) throw DataError("observations: expected a collection or draw lines");

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    ++line_no;
    const std::string_view line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      json j;
      try {
        j = json::parse(line.begin(), line.end());
      } catch (const json::parse_error& e) {
        std::ostringstream os;
        os << "malformed JSON at line " << line_no << ", column " << (e.byte > 0 ? e.byte : 1)
           << ": " << e.what();
        throw DataError(os.str());
      }
      if (!j.is_object() || !j.contains("matrices")) {
        throw DataError("line " + std::to_string(line_no) + ": expected an object with \"matrices\"");
      }
      out.push_back(draw_from_json(j["matrices"], "line " + std::to_string(line_no)));
    }
    start = end + 1;
  }
  return out;
}

std::string dump_draw(std::string_view family, std::size_t index, const Draw& draw) {
  json j;
  j["family"] = std::string(family);
  j["index"] = index;
  j["matrices"] = json::array();
  for (const auto& x : draw) j["matrices"].push_back(rows_json(x));
  return j.dump();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << contents;
}

}  // namespace mmv::io
