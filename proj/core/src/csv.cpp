#include "avmarket/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "avmarket/errors.hpp"

namespace avmarket {

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw ContractViolation("csv header must be non-empty");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvWriter::begin_row() {
  if (in_row_) throw ContractViolation("csv row already open");
  in_row_ = true;
  row_cells_ = 0;
}

void CsvWriter::add(double value) { add(format_number(value)); }

void CsvWriter::add(int value) { add(std::to_string(value)); }

void CsvWriter::add(const std::string& value) {
  if (!in_row_) throw ContractViolation("csv cell outside a row");
  if (row_cells_ >= columns_) throw ContractViolation("csv row has too many cells");
  if (row_cells_) text_ += ',';
  text_ += value;
  ++row_cells_;
}

void CsvWriter::end_row() {
  if (!in_row_) throw ContractViolation("csv row not open");
  if (row_cells_ != columns_) throw ContractViolation("csv row has too few cells");
  text_ += '\n';
  in_row_ = false;
  ++rows_;
}

void CsvWriter::write_file(const std::string& path) const {
  if (in_row_) throw ContractViolation("csv row still open");
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text_;
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string CsvWriter::format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

}  // namespace avmarket
