#include "cvsel/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cvsel/errors.hpp"

namespace cvsel {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string cell = trim(raw);
  const std::string where =
      " at data row " + std::to_string(row) + ", column " + std::to_string(col);
  if (cell.empty()) throw DataError("missing value" + where);
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DataError("cannot parse '" + cell + "' as a real number" + where);
  }
  if (!std::isfinite(value)) throw DataError("missing value (non-finite)" + where);
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& response_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  const std::vector<std::string> raw_header = split_line(line);
  std::vector<std::string> header;
  header.reserve(raw_header.size());
  for (const std::string& h : raw_header) header.push_back(trim(h));

  std::size_t response_idx = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == response_column) {
      response_idx = j;
      break;
    }
  }
  if (response_idx == header.size()) {
    throw DataError("response column '" + response_column + "' not found in " + path);
  }

  std::vector<std::vector<double>> rows;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError("expected " + std::to_string(header.size()) + " cells but found " +
                      std::to_string(cells.size()) + " at data row " +
                      std::to_string(row_no));
    }
    std::vector<double> parsed(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      parsed[j] = parse_cell(cells[j], row_no, j + 1);
    }
    rows.push_back(std::move(parsed));
  }
  if (rows.empty()) throw DataError("no data rows in " + path);

  Dataset ds;
  ds.response_name = header[response_idx];
  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(header.size() - 1);
  ds.response.resize(n);
  ds.predictors.resize(n, p);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != response_idx) ds.predictor_names.push_back(header[j]);
  }
  for (Index i = 0; i < n; ++i) {
    Index jj = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j == response_idx) {
        ds.response[i] = rows[static_cast<std::size_t>(i)][j];
      } else {
        ds.predictors(i, jj++) = rows[static_cast<std::size_t>(i)][j];
      }
    }
  }
  return ds;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ComputeError("number formatting failed");
  return std::string(buf, ptr);
}

std::string to_csv(const Dataset& ds) {
  std::ostringstream out;
  out << ds.response_name;
  for (const std::string& name : ds.predictor_names) out << ',' << name;
  out << '\n';
  for (Index i = 0; i < ds.response.size(); ++i) {
    out << format_double(ds.response[i]);
    for (Index j = 0; j < ds.predictors.cols(); ++j) {
      out << ',' << format_double(ds.predictors(i, j));
    }
    out << '\n';
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace cvsel
