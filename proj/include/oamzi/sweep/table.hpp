#pragma once

// Result tables and their CSV/JSON serialization.

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "oamzi/errors.hpp"
#include "oamzi/sweep/config.hpp"
#include "oamzi/version.hpp"

namespace oamzi::sweep {

/// A table cell: a number, an integer, text, or empty (a failed point).
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct PointMeta {
  int cutoff = 0;
  double leakage = 0.0;
};

struct ResultTable {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
  std::vector<PointMeta> points;  // parallel to rows
  std::string config_hash;
  std::string experiment;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    fail(ErrorKind::InvalidArgument, "no column '" + name + "'");
  }

  bool rectangular() const {
    for (const auto& r : rows)
      if (r.size() != header.size()) return false;
    return points.size() == rows.size();
  }

  std::size_t error_count() const {
    const std::size_t e = column("error");
    std::size_t n = 0;
    for (const auto& r : rows)
      if (const auto* s = std::get_if<std::string>(&r[e]); s && !s->empty()) ++n;
    return n;
  }
};

/// Shortest text that reads back to the same double: 17 significant digits,
/// with infinities as "inf" / "-inf".
inline std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(long long x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

inline std::string to_csv(const ResultTable& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << csv_quote(t.header[i]);
  os << "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_quote(format_cell(row[i]));
    os << "\r\n";
  }
  return os.str();
}

/// Parses RFC-4180 CSV into rows of fields.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\r' || ch == '\n') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json cell_json(const Cell& c) {
  struct V {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(double x) const {
      if (std::isfinite(x)) return x;
      return format_double(x);
    }
    nlohmann::json operator()(long long x) const { return x; }
    nlohmann::json operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

inline nlohmann::json metadata(const ResultTable& t) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : t.points) pts.push_back({{"cutoff", p.cutoff}, {"leakage", p.leakage}});
  return {{"config_hash", t.config_hash}, {"engine_version", kVersion}, {"experiment", t.experiment},
          {"columns", t.header},          {"row_count", t.rows.size()}, {"points", pts}};
}

inline std::string to_json(const ResultTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < r.size(); ++i) obj[t.header[i]] = cell_json(r[i]);
    rows.push_back(std::move(obj));
  }
  return nlohmann::json{{"metadata", metadata(t)}, {"rows", rows}}.dump(2) + "\n";
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, data.data(), data.size()) == 1 && EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) fail(ErrorKind::IoError, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

/// Hash of the resolved configuration with the output section removed, so
/// only the computation itself is identified.
inline std::string config_hash(const SweepSpec& s) {
  Json doc = s.canonical;
  doc.erase("output");
  return sha256_hex(doc.dump());
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) fail(ErrorKind::IoError, "failed writing '" + path + "'");
}

/// Writes the table in the requested format plus the `<path>.meta.json`
/// sidecar. Returns the sidecar path.
inline std::string emit(const ResultTable& t, const std::string& path, OutputFormat format) {
  if (path.empty()) fail(ErrorKind::IoError, "no output path given");
  write_file(path, format == OutputFormat::Csv ? to_csv(t) : to_json(t));
  const std::string meta = path + ".meta.json";
  write_file(meta, metadata(t).dump(2) + "\n");
  return meta;
}

}  // namespace oamzi::sweep
