#include "qprob/format.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qprob/error.hpp"

namespace qprob {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view text, std::string_view field) {
  text = trim(text);
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  if (!text.empty() && *b == '+') ++b;
  auto r = std::from_chars(b, e, v);
  if (text.empty() || r.ec != std::errc() || r.ptr != e) {
    fail(ErrorKind::Parse, std::string(field) + ": expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view text, std::string_view field) {
  text = trim(text);
  std::int64_t v = 0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    fail(ErrorKind::Parse, std::string(field) + ": expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view text, std::string_view field) {
  text = trim(text);
  std::uint64_t v = 0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    fail(ErrorKind::InvalidParameter,
         std::string(field) + ": expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::map<std::string, double> parse_named_values(std::string_view text, std::string_view context) {
  std::map<std::string, double> out;
  for (auto& item : split(text, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Parse, "expected key=value in '" + std::string(context) + "'");
    std::string key(trim(std::string_view(item).substr(0, eq)));
    double v = parse_double(std::string_view(item).substr(eq + 1), key);
    if (!out.emplace(key, v).second) fail(ErrorKind::Parse, "duplicate key '" + key + "' in '" + std::string(context) + "'");
  }
  return out;
}

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Schema, path.string() + ": empty file");
  t.header = split(line, ',');
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != t.header.size()) {
      fail(ErrorKind::Schema, path.string() + ":" + std::to_string(lineno) + ": wrong number of columns");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto& c : cells) row.push_back(parse_double(c, path.string()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << content;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

}  // namespace qprob
