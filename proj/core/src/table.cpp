#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ctmdp/formats.hpp"

namespace ctmdp {

const std::vector<std::string>& result_table_columns() {
  static const std::vector<std::string> cols = {
      "Name",       "states",    "prod.",  "Sat. Prob.", "Est. Sat.",
      "Time 1",     "Exp. Prob.", "Est. Exp.", "Time 2"};
  return cols;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // also folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

std::vector<std::string> cells(const BenchmarkRow& r) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string("-");
  };
  return {r.name,         std::to_string(r.states), std::to_string(r.product_states),
          opt(r.sat_prob), opt(r.est_sat),          opt(r.time_sat),
          opt(r.exp_prob), opt(r.est_exp),          opt(r.time_exp)};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string emit_result_table(const std::vector<BenchmarkRow>& rows, TableFormat format) {
  std::vector<std::vector<std::string>> table;
  table.push_back(result_table_columns());
  for (const auto& r : rows) table.push_back(cells(r));

  std::ostringstream out;
  if (format == TableFormat::Csv) {
    for (const auto& line : table) {
      for (std::size_t i = 0; i < line.size(); ++i) out << (i ? "," : "") << csv_field(line[i]);
      out << '\n';
    }
    return out.str();
  }
  std::vector<std::size_t> width(table.front().size(), 0);
  for (const auto& line : table) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  for (const auto& line : table) {
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i > 0) text += "  ";
      // names left-aligned, numbers right-aligned
      const std::string pad(width[i] - line[i].size(), ' ');
      text += i == 0 ? line[i] + pad : pad + line[i];
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << '\n';
  }
  return out.str();
}

}  // namespace ctmdp
