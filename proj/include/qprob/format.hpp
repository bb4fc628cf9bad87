#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qprob {

// 17 significant digits, round-trips through strtod.
std::string format_double(double v);

double parse_double(std::string_view text, std::string_view field);
std::int64_t parse_int(std::string_view text, std::string_view field);
std::uint64_t parse_u64(std::string_view text, std::string_view field);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// "a=1,b=2" -> {a:1, b:2}; duplicate or malformed entries are parse errors.
std::map<std::string, double> parse_named_values(std::string_view text, std::string_view context);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  int column(std::string_view name) const;  // -1 when absent
};

CsvTable read_csv(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace qprob
