#pragma once

#include <string>
#include <vector>

#include "cvsel/types.hpp"

namespace cvsel {

struct Dataset {
  std::string response_name;
  Vector response;
  Matrix predictors;  // header order, response column removed
  std::vector<std::string> predictor_names;
};

// Comma-separated, header row, decimal reals, no quoting. Errors carry the
// offending row/column; non-finite or empty cells are missing-value errors.
Dataset load_csv(const std::string& path, const std::string& response_column);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

// Dataset back to CSV text (response first), in round-trip form.
std::string to_csv(const Dataset& ds);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cvsel
