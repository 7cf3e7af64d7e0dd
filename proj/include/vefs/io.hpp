#pragma once

#include <string>
#include <vector>

#include "vefs/field.hpp"

namespace vefs {

// Columns are a stable contract: order is fixed, new columns only append.
class CsvWriter {
public:
  CsvWriter(const std::string &path, const std::vector<std::string> &columns);
  void row(const std::vector<double> &values);
  ~CsvWriter();

private:
  struct Impl;
  Impl *impl_;
};

std::string format_double(double v); // shortest round-trip decimal

// Row-major binary block with a plain-text header (dims, dt, field name,
// byte order, element width).
void write_snapshot(const std::string &path, const std::string &field_name,
                    const Scal &data, double dt);
Scal read_snapshot(const std::string &path, std::string &field_name, double &dt);

void write_text_file(const std::string &path, const std::string &content);

// gnuplot script regenerating the run figures from the CSV outputs.
std::string plot_script_text(const std::string &csv_name);

} // namespace vefs
