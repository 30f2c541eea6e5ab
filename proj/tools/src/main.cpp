#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "ctmdp/errors.hpp"
#include "ctmdp_cli/commands.hpp"

#ifndef CTMDP_DEFAULT_MODELS_DIR
#define CTMDP_DEFAULT_MODELS_DIR "models"
#endif

namespace {

using namespace ctmdp;
using namespace ctmdp::cli;

void add_hyperparams(CLI::App* app, Hyperparams& hp, bool& decay) {
  app->add_option("--episodes", hp.ep_n, "number of training episodes")->capture_default_str();
  app->add_option("--ep-len", hp.ep_len, "episode length guard")->capture_default_str();
  app->add_option("--beta", hp.beta, "learning rate")->capture_default_str();
  app->add_option("--epsilon", hp.epsilon, "exploration rate")->capture_default_str();
  app->add_option("--gamma", hp.gamma,
                  "discount factor of the uniformized model (default 0.99999 for sat, 0.99 for exp)");
  app->add_option("--alpha", hp.alpha, "continuous discount rate (overrides --gamma)");
  app->add_option("--zeta", hp.zeta, "satisfaction coin parameter")->capture_default_str();
  app->add_option("--tol", hp.tol, "numeric tolerance")->capture_default_str();
  app->add_flag("--visit-decay", decay, "use learning rate max(beta, 1/visits)");
}

TableFormat parse_format(const std::string& s) {
  if (s == "csv") return TableFormat::Csv;
  if (s == "table") return TableFormat::Text;
  throw ValidationError("unknown format '" + s + "' (expected csv or table)");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn and verify schedules of CTMDPs against Büchi objectives"};
  app.require_subcommand(1);

  Hyperparams hp;
  bool decay = false;
  std::string model, automaton, semantics = "sat", format = "csv", output;
  std::uint64_t seed = 1;
  std::size_t runs = 1;
  std::string name;
  bool no_timing = false;

  auto* learn = app.add_subcommand("learn", "learn a schedule and grade it exactly");
  learn->add_option("-m,--model", model, "model file (.ctmdp)")->required();
  learn->add_option("-a,--automaton", automaton, "automaton file (.hoa)")->required();
  learn->add_option("-s,--semantics", semantics, "sat or exp")->capture_default_str();
  learn->add_option("--seed", seed, "base seed")->capture_default_str();
  learn->add_option("--runs", runs, "independent seeded runs")->capture_default_str();
  learn->add_option("--format", format, "csv or table")->capture_default_str();
  learn->add_option("--name", name, "row name");
  learn->add_option("-o,--output", output, "output file");
  learn->add_flag("--no-timing", no_timing, "print `-` for the time columns");
  add_hyperparams(learn, hp, decay);

  std::string schedule_in, schedule_out;
  double check_tol = 1e-10;
  auto* check = app.add_subcommand("check", "exact values, optimal or for a given schedule");
  check->add_option("-m,--model", model, "model file (.ctmdp)")->required();
  check->add_option("-a,--automaton", automaton, "automaton file (.hoa)")->required();
  check->add_option("-s,--semantics", semantics, "sat or exp")->capture_default_str();
  check->add_option("--schedule", schedule_in, "schedule CSV to evaluate");
  check->add_option("--schedule-out", schedule_out, "write the schedule CSV here");
  check->add_option("--tol", check_tol, "solver tolerance")->capture_default_str();
  check->add_option("-o,--output", output, "output file");

  std::size_t steps = 1000;
  auto* sim = app.add_subcommand("simulate", "dump a product trajectory");
  sim->add_option("-m,--model", model, "model file (.ctmdp)")->required();
  sim->add_option("-a,--automaton", automaton, "automaton file (.hoa)")->required();
  sim->add_option("--schedule", schedule_in, "schedule CSV (default: optimal schedule)");
  sim->add_option("-s,--semantics", semantics, "semantics of the default schedule")
      ->capture_default_str();
  sim->add_option("--steps", steps, "number of steps")->capture_default_str();
  sim->add_option("--seed", seed, "seed")->capture_default_str();
  sim->add_option("-o,--output", output, "output file");

  double zeta = 0.0, sink_rate = 1.0;
  auto* prod = app.add_subcommand("product", "dump the product as a .ctmdp document");
  prod->add_option("-m,--model", model, "model file (.ctmdp)")->required();
  prod->add_option("-a,--automaton", automaton, "automaton file (.hoa)")->required();
  prod->add_option("--zeta", zeta, "dump the zeta-augmented product instead");
  prod->add_option("--sink-rate", sink_rate, "self-loop rate of the sink t")->capture_default_str();
  prod->add_option("-o,--output", output, "output file");

  std::string models_dir = CTMDP_DEFAULT_MODELS_DIR;
  std::vector<std::string> only;
  std::size_t bench_runs = 3;
  auto* bench = app.add_subcommand("bench", "run all shipped models and emit the result table");
  bench->add_option("--models-dir", models_dir, "directory with the shipped models")
      ->capture_default_str();
  bench->add_option("--only", only, "restrict to these benchmark names");
  bench->add_option("--runs", bench_runs, "seeded runs per benchmark")->capture_default_str();
  bench->add_option("--seed", seed, "base seed")->capture_default_str();
  bench->add_option("--format", format, "csv or table")->capture_default_str();
  bench->add_option("-o,--output", output, "output file");
  bench->add_flag("--no-timing", no_timing, "print `-` for the time columns");
  add_hyperparams(bench, hp, decay);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (decay) hp.rate = LearningRate::VisitDecay;
    if (learn->parsed()) {
      RunConfig cfg;
      cfg.model_path = model;
      cfg.automaton_path = automaton;
      cfg.semantics = parse_semantics(semantics);
      cfg.hp = hp;
      cfg.seed = seed;
      cfg.runs = runs;
      cfg.format = parse_format(format);
      cfg.name = name;
      cfg.timing = !no_timing;
      const LearnReport r = cmd_learn(cfg);
      emit(emit_result_table({r.row}, cfg.format), output);
    } else if (check->parsed()) {
      CheckConfig cfg;
      cfg.model_path = model;
      cfg.automaton_path = automaton;
      cfg.semantics = parse_semantics(semantics);
      if (!schedule_in.empty()) cfg.schedule_path = schedule_in;
      cfg.tol = check_tol;
      const CheckOutput r = cmd_check(cfg);
      emit(r.values_csv, output);
      if (!schedule_out.empty()) emit(r.schedule_csv, schedule_out);
    } else if (sim->parsed()) {
      SimulateConfig cfg;
      cfg.model_path = model;
      cfg.automaton_path = automaton;
      cfg.semantics = parse_semantics(semantics);
      if (!schedule_in.empty()) cfg.schedule_path = schedule_in;
      cfg.steps = steps;
      cfg.seed = seed;
      emit(cmd_simulate(cfg), output);
    } else if (prod->parsed()) {
      if (zeta != 0.0) {
        const Instance inst = load_instance(model, automaton);
        AugmentedProduct aug = augment(inst.product, zeta, sink_rate);
        emit(write_model(aug.product.model, "augmented"), output);
      } else {
        emit(cmd_product(model, automaton), output);
      }
    } else if (bench->parsed()) {
      BenchConfig cfg;
      cfg.models_dir = models_dir;
      cfg.hp = hp;
      cfg.seed = seed;
      cfg.runs = bench_runs;
      cfg.only = only;
      cfg.timing = !no_timing;
      const TableFormat fmt = parse_format(format);
      const BenchReport r = cmd_bench(cfg);
      emit(emit_result_table(r.rows, fmt), output);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
