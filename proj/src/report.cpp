#include "gblab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gblab {

bool Report::all_pass() const {
  for (const Quantity& q : quantities)
    if (!q.pass) return false;
  return true;
}

uint64_t fnv1a64(std::string_view text) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Quantity compare_quantity(std::string name, double mean, double std_error, double exact,
                          double sigma_level) {
  Quantity q;
  q.name = std::move(name);
  q.mean = mean;
  q.std_error = std_error;
  q.exact = exact;
  const double diff = std::abs(mean - exact);
  // rounding floor: zero-variance estimators still carry float roundoff
  const double floor = 1e-9 * (1.0 + std::abs(exact));
  if (std_error > 0) {
    q.z = diff / std_error;
    q.pass = q.z <= sigma_level || diff <= floor;
  } else {
    q.z = (diff <= floor) ? 0.0 : INFINITY;
    q.pass = diff <= floor;
  }
  return q;
}

namespace {

void put_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  out += buf;
}

void put_string(std::string& out, std::string_view s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

}  // namespace

std::string to_json(const Report& r) {
  std::string out;
  out.reserve(4096);
  out += "{\n  \"scenario_hash\": ";
  put_string(out, r.scenario_hash);
  out += ",\n  \"seed\": ";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(r.seed));
  out += buf;
  out += ",\n  \"quantities\": [";
  for (size_t i = 0; i < r.quantities.size(); ++i) {
    const Quantity& q = r.quantities[i];
    out += (i ? ",\n    " : "\n    ");
    out += "{\"name\": ";
    put_string(out, q.name);
    out += ", \"mean\": ";
    put_number(out, q.mean);
    out += ", \"stderr\": ";
    put_number(out, q.std_error);
    out += ", \"exact\": ";
    if (q.exact)
      put_number(out, *q.exact);
    else
      out += "null";
    out += ", \"z\": ";
    if (q.exact)
      put_number(out, q.z);
    else
      out += "null";
    out += ", \"pass\": ";
    out += q.pass ? "true" : "false";
    out += "}";
  }
  out += r.quantities.empty() ? "],\n" : "\n  ],\n";
  out += "  \"tables\": [";
  for (size_t t = 0; t < r.tables.size(); ++t) {
    const Table& tb = r.tables[t];
    out += (t ? ",\n    " : "\n    ");
    out += "{\"name\": ";
    put_string(out, tb.name);
    out += ", \"columns\": [";
    for (size_t c = 0; c < tb.columns.size(); ++c) {
      if (c) out += ", ";
      put_string(out, tb.columns[c]);
    }
    out += "], \"rows\": [";
    for (size_t i = 0; i < tb.rows.size(); ++i) {
      out += (i ? ", [" : "[");
      for (size_t c = 0; c < tb.rows[i].size(); ++c) {
        if (c) out += ", ";
        put_number(out, tb.rows[i][c]);
      }
      out += "]";
    }
    out += "]}";
  }
  out += r.tables.empty() ? "],\n" : "\n  ],\n";
  out += "  \"diagnostics\": {";
  for (size_t i = 0; i < r.diagnostics.size(); ++i) {
    out += (i ? ", " : "");
    put_string(out, r.diagnostics[i].first);
    out += ": ";
    put_string(out, r.diagnostics[i].second);
  }
  out += "}\n}\n";
  return out;
}

std::string scan_table_csv(const Report& r, const std::string& name) {
  const Table* pick = nullptr;
  for (const Table& t : r.tables) {
    if (name.empty() ? t.columns.size() >= 2 : t.name == name) {
      pick = &t;
      break;
    }
  }
  if (!pick) throw std::runtime_error("report has no matching table for csv output");
  std::string out;
  for (size_t c = 0; c < pick->columns.size(); ++c) {
    if (c) out += ',';
    out += pick->columns[c];
  }
  out += '\n';
  for (const auto& row : pick->rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.12g", row[c]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace gblab
