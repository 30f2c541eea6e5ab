#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctmdp/automaton.hpp"
#include "ctmdp/check.hpp"
#include "ctmdp/formats.hpp"
#include "ctmdp/learn.hpp"
#include "ctmdp/model.hpp"
#include "ctmdp/product.hpp"

namespace ctmdp::cli {

enum class Semantics { Sat, Exp };

Semantics parse_semantics(const std::string& text);
const char* semantics_name(Semantics s);

/// Everything a learning experiment needs.
struct RunConfig {
  std::string model_path;
  std::string automaton_path;
  Semantics semantics = Semantics::Sat;
  Hyperparams hp;
  std::uint64_t seed = 1;
  std::size_t runs = 1;
  std::string output;               // empty: caller prints
  TableFormat format = TableFormat::Csv;
  std::string name;                 // row name; defaults to the model file stem
  bool timing = true;               // false: time columns render as `-`

  void validate() const;
};

/// One seeded learning run, graded by the exact checker at the initial state.
struct RunOutcome {
  std::uint64_t seed = 0;
  double value = 0.0;
  double seconds = 0.0;
  std::size_t discovered = 0;
  Schedule schedule;  // on the materialized product
};

struct LearnReport {
  BenchmarkRow row;
  double optimum = 0.0;
  std::vector<RunOutcome> runs;  // sorted by seed
};

/// Seeds of the `runs` independent runs derived from the base seed.
std::vector<std::uint64_t> run_seeds(std::uint64_t seed, std::size_t runs);

/// Loaded inputs and their product.
struct Instance {
  Ctmdp model;
  BuchiAutomaton automaton;
  ProductCtmdp product;
};

Instance load_instance(const std::string& model_path, const std::string& automaton_path);

/// Learns under the configured semantics over `runs` seeds and fills the
/// matching half of a result-table row.
LearnReport cmd_learn(const RunConfig& cfg);
LearnReport learn_instance(const Instance& inst, const RunConfig& cfg);

struct CheckConfig {
  std::string model_path;
  std::string automaton_path;
  Semantics semantics = Semantics::Sat;
  std::optional<std::string> schedule_path;
  double tol = 1e-10;
};

struct CheckOutput {
  std::string values_csv;    // state,s,q,value
  std::string schedule_csv;  // state,s,q,action
  std::vector<double> values;
  Schedule schedule;
};

CheckOutput cmd_check(const CheckConfig& cfg);

/// CSV `state,s,q,action` for a product schedule.
std::string schedule_to_csv(const ProductCtmdp& p, const Schedule& sigma);
/// Reads a schedule written by schedule_to_csv. Unlisted states get their
/// first choice; rows naming unknown states or actions are errors.
Schedule schedule_from_csv(const ProductCtmdp& p, const std::string& text,
                           const std::string& origin);

struct SimulateConfig {
  std::string model_path;
  std::string automaton_path;
  Semantics semantics = Semantics::Exp;  // picks the optimal schedule when none is given
  std::optional<std::string> schedule_path;
  std::size_t steps = 1000;
  std::uint64_t seed = 1;
};

/// Trajectory CSV `step,state,action,next,dwell,reward` on the product, with
/// the expectation reward (dwell time in accepting states).
std::string cmd_simulate(const SimulateConfig& cfg);

/// The product as a `.ctmdp` document, with an extra label "accepting".
std::string cmd_product(const std::string& model_path, const std::string& automaton_path);

struct BenchConfig {
  std::string models_dir;
  Hyperparams hp;
  std::uint64_t seed = 1;
  std::size_t runs = 3;
  std::vector<std::string> only;  // benchmark names; empty means all
  bool timing = true;
};

struct BenchEntry {
  std::string name;
  std::string model_file;
  std::string automaton_file;
};

const std::vector<BenchEntry>& bench_entries();

struct BenchReport {
  std::vector<BenchmarkRow> rows;
  std::vector<LearnReport> sat;
  std::vector<LearnReport> exp;
};

BenchReport cmd_bench(const BenchConfig& cfg);

/// Quotes a CSV field when needed.
std::string csv_field(const std::string& s);

}  // namespace ctmdp::cli
