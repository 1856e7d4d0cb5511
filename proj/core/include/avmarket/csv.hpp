#pragma once

#include <string>
#include <vector>

namespace avmarket {

// Deterministic CSV assembly: "%.12g" numbers, '.' decimal separator, LF rows.
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);

  void begin_row();
  void add(double value);
  void add(int value);
  void add(const std::string& value);
  void end_row();

  const std::string& text() const { return text_; }
  std::size_t rows() const { return rows_; }

  // Writes via a temp file + rename so readers never observe partial output.
  void write_file(const std::string& path) const;

  static std::string format_number(double value);

private:
  std::string text_;
  std::size_t columns_ = 0;
  std::size_t row_cells_ = 0;
  std::size_t rows_ = 0;
  bool in_row_ = false;
};

}  // namespace avmarket
