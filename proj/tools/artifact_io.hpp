// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dpsqkd::cli {

/// Floats in CSV artifacts carry 17 significant digits so a round trip
/// through text is lossless.
inline std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

/// Writes an artifact atomically (temp file in the same directory, then
/// rename). An empty path means stdout.
inline void write_artifact(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + temp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + temp.string());
  }
  fs::rename(temp, target);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string serialize() const {
    std::ostringstream out;
    auto emit_row = [&out](const std::vector<std::string>& row) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out << ',';
        const bool needs_quotes = row[i].find_first_of(",\"\n") != std::string::npos;
        if (needs_quotes) {
          out << '"';
          for (char c : row[i]) {
            if (c == '"') out << '"';
            out << c;
          }
          out << '"';
        } else {
          out << row[i];
        }
      }
      out << "\r\n";
    };
    emit_row(header);
    for (const auto& row : rows) emit_row(row);
    return out.str();
  }
};

/// Minimal RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF.
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  CsvTable table;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool has_header = false;
  auto end_field = [&]() {
    row.push_back(field);
    field.clear();
  };
  auto end_row = [&]() {
    end_field();
    if (!has_header) {
      table.header = row;
      has_header = true;
    } else {
      table.rows.push_back(row);
    }
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_row();
    } else {
      field += c;
    }
  }
  if (!field.empty() || !row.empty()) end_row();
  if (!has_header) throw std::invalid_argument("CSV file " + path + " has no header row");
  return table;
}

/// FNV-1a over a byte span, for reproducibility digests of parameter sets.
inline std::uint64_t fnv1a(const unsigned char* data, std::size_t size) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= data[i];
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

inline std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

/// Worker-count override; results are worker-count independent, this only
/// changes wall time.
inline int workers_from_env() {
  if (const char* raw = std::getenv("DPSQKD_WORKERS")) {
    const int value = std::atoi(raw);
    if (value >= 1) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(hw == 0 ? 1u : hw, 8u));
}

}  // namespace dpsqkd::cli
