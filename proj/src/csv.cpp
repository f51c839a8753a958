#include "sdwave/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "sdwave/errors.hpp"

namespace sdwave {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string quote_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::span<const std::string_view> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), width_(header.size()) {
  if (!out_) throw ConfigError(fmt::format("cannot write {}", path.string()));
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote_field(header[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(std::span<const Cell> cells) {
  if (cells.size() != width_) {
    throw ConfigError(fmt::format("{}: row has {} cells, header has {}", path_.string(),
                                  cells.size(), width_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_double(v);
          } else if constexpr (std::is_same_v<T, std::string_view>) {
            out_ << quote_field(v);
          } else {
            out_ << v;
          }
        },
        cells[i]);
  }
  out_ << '\n';
  ++rows_;
}

}  // namespace sdwave
