#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctmdp/automaton.hpp"
#include "ctmdp/model.hpp"

namespace ctmdp {

/// Model text and where it came from (a path or an inline tag), used in diagnostics.
struct ModelSource {
  std::string text;
  std::string origin;
};

struct HoaSource {
  std::string text;
  std::string origin;
};

ModelSource read_model_file(const std::string& path);
HoaSource read_hoa_file(const std::string& path);

/// Parses the `.ctmdp` language (see docs/model-format.md) and explores the
/// state space reachable from the initial valuation. Throws ParseError for
/// syntax errors and ValidationError for semantic ones.
Ctmdp parse_model(const ModelSource& src);

/// Renders a model as a single-variable `.ctmdp` document that parse_model
/// reads back to an isomorphic model. Action and proposition names that are
/// not identifiers are rewritten.
std::string write_model(const Ctmdp& m, const std::string& module_name = "m");

/// Parses the supported HOA subset: state-based Büchi acceptance
/// (`Acceptance: 1 Inf(0)`) with explicit edge labels.
BuchiAutomaton parse_hoa(const HoaSource& src);

std::string write_hoa(const BuchiAutomaton& a);

/// One line of the result table. Missing measurements render as `-`.
struct BenchmarkRow {
  std::string name;
  std::size_t states = 0;
  std::size_t product_states = 0;
  std::optional<double> sat_prob;
  std::optional<double> est_sat;
  std::optional<double> time_sat;
  std::optional<double> exp_prob;
  std::optional<double> est_exp;
  std::optional<double> time_exp;
};

enum class TableFormat { Csv, Text };

/// Column headers, in output order.
const std::vector<std::string>& result_table_columns();

/// Deterministic rendering with 6 significant digits, `.` decimal separator, LF endings.
std::string emit_result_table(const std::vector<BenchmarkRow>& rows, TableFormat format);

/// `%.6g`-style number formatting used by every CSV writer in the project.
std::string format_number(double value);

}  // namespace ctmdp
