// csv.hpp — locale-independent CSV tables with shortest round-trip numbers

#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace cjt {

// Shortest decimal representation that parses back to the same double.
std::string format_number(double value);

class CsvTable {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<Cell> row);  // throws std::invalid_argument on width mismatch

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  std::string str() const;
  void write(const std::filesystem::path& path) const;
  // Array of objects keyed by header.
  nlohmann::json to_json() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace cjt
