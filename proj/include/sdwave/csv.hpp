#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sdwave {

/// Shortest decimal that round-trips to the same double ("inf", "-inf" and
/// "nan" for non-finite values).
std::string format_double(double value);

/// Encloses `field` in double quotes (doubling inner quotes) when it holds a
/// comma, quote, CR or LF.
std::string quote_field(std::string_view field);

/// Streams one CSV artifact: header first, then rows of exactly the header
/// width. Lines end in '\n'.
class CsvWriter {
 public:
  using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string_view>;

  CsvWriter(const std::filesystem::path& path, std::span<const std::string_view> header);

  void row(std::initializer_list<Cell> cells) { row(std::span<const Cell>(cells.begin(), cells.size())); }
  void row(std::span<const Cell> cells);

  std::size_t rows() const noexcept { return rows_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t width_;
  std::size_t rows_ = 0;
};

}  // namespace sdwave
