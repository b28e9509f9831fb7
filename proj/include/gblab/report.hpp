#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gblab {

// One measured quantity with its exact companion when an oracle exists.
// Quantities without an oracle keep exact empty and always count as passing.
struct Quantity {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
  std::optional<double> exact;
  double z = 0.0;
  bool pass = true;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Machine-readable run record. Serialization is byte-stable: fixed key
// order, 12 significant digits, no timing fields.
struct Report {
  std::string scenario_hash;  // 16 hex digits of the scenario text
  uint64_t seed = 0;
  std::vector<Quantity> quantities;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, std::string>> diagnostics;

  bool all_pass() const;
};

uint64_t fnv1a64(std::string_view text);
std::string hash_hex(uint64_t h);

// Builds a compared quantity; pass at |z| <= sigma_level, with agreement up
// to float rounding demanded when the standard error is zero.
Quantity compare_quantity(std::string name, double mean, double std_error, double exact,
                          double sigma_level);

std::string to_json(const Report& r);

// epsilon,delta,mean,stderr,lines,resampled rows of the named table; the
// first scan table when name is empty.
std::string scan_table_csv(const Report& r, const std::string& name = "");

void write_text_file(const std::string& path, const std::string& content);

}  // namespace gblab
