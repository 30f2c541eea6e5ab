#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ctmdp/check.hpp"
#include "ctmdp_cli/commands.hpp"
#include "paths.hpp"

using namespace ctmdp;
using namespace ctmdp::cli;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("ctmdp_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

Invocation run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = scratch();
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string("\"") + CTMDP_CLI_PATH + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Invocation r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string model_args(const std::string& stem) {
  return "-m \"" + test::model_path(stem + ".ctmdp") + "\" -a \"" + test::model_path(stem + ".hoa") + "\"";
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunConfig quick(const std::string& stem, Semantics sem) {
  RunConfig cfg;
  cfg.model_path = test::model_path(stem + ".ctmdp");
  cfg.automaton_path = test::model_path(stem + ".hoa");
  cfg.semantics = sem;
  cfg.hp.ep_n = 2000;
  return cfg;
}

}  // namespace

TEST(CmdLearn, FillsTheSatisfactionHalfOfTheRow) {
  RunConfig cfg = quick("riskreward", Semantics::Sat);
  cfg.runs = 2;
  const LearnReport r = cmd_learn(cfg);
  EXPECT_EQ(r.row.name, "riskreward");
  EXPECT_EQ(r.row.states, 4u);
  EXPECT_EQ(r.row.product_states, 8u);
  ASSERT_TRUE(r.row.sat_prob && r.row.est_sat && r.row.time_sat);
  EXPECT_NEAR(*r.row.sat_prob, 1.0, 1e-9);
  EXPECT_FALSE(r.row.exp_prob || r.row.est_exp || r.row.time_exp);
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_LT(r.runs[0].seed, r.runs[1].seed);
  for (const RunOutcome& o : r.runs) {
    EXPECT_LE(o.value, r.optimum + 1e-9);
    EXPECT_GE(o.value, 0.0);
  }
}

TEST(CmdLearn, NoTimingLeavesTimeColumnsEmpty) {
  RunConfig cfg = quick("riskreward", Semantics::Exp);
  cfg.timing = false;
  const LearnReport r = cmd_learn(cfg);
  EXPECT_TRUE(r.row.est_exp.has_value());
  EXPECT_FALSE(r.row.time_exp.has_value());
}

TEST(CmdLearn, LongExpectationRunLearnsTheOptimum) {
  RunConfig cfg = quick("riskreward", Semantics::Exp);
  cfg.hp = Hyperparams{};
  const LearnReport r = cmd_learn(cfg);
  EXPECT_NEAR(*r.row.est_exp, 0.9, 0.02);
}

TEST(RunSeeds, DistinctAndStable) {
  const auto a = run_seeds(7, 5), b = run_seeds(7, 5);
  EXPECT_EQ(a, b);
  EXPECT_EQ(std::set<std::uint64_t>(a.begin(), a.end()).size(), 5u);
}

TEST(CmdCheck, MarsOptimalValuesAndSchedule) {
  CheckConfig cfg;
  cfg.model_path = test::model_path("mars.ctmdp");
  cfg.automaton_path = test::model_path("mars.hoa");
  cfg.semantics = Semantics::Exp;
  const CheckOutput r = cmd_check(cfg);
  const ProductCtmdp p = test::load_product("mars");
  ASSERT_EQ(r.values.size(), p.num_states());
  EXPECT_NEAR(r.values[p.model.initial], 0.95, 1e-9);
  const auto rows = lines(r.values_csv);
  EXPECT_EQ(rows[0], "state,s,q,value");
  EXPECT_EQ(rows.size(), p.num_states() + 1);
  EXPECT_EQ(lines(r.schedule_csv)[0], "state,s,q,action");
}

TEST(CmdCheck, GivenScheduleIsNeverBetterThanOptimal) {
  const ProductCtmdp p = test::load_product("riskreward");
  const fs::path file = scratch() / "first_choice.csv";
  write_file(file, schedule_to_csv(p, Schedule(p.num_states(), 0)));
  for (Semantics sem : {Semantics::Sat, Semantics::Exp}) {
    CheckConfig cfg;
    cfg.model_path = test::model_path("riskreward.ctmdp");
    cfg.automaton_path = test::model_path("riskreward.hoa");
    cfg.semantics = sem;
    const CheckOutput best = cmd_check(cfg);
    cfg.schedule_path = file.string();
    const CheckOutput given = cmd_check(cfg);
    EXPECT_EQ(given.schedule, Schedule(p.num_states(), 0));
    for (StateId x = 0; x < p.num_states(); ++x) EXPECT_LE(given.values[x], best.values[x] + 1e-9);
  }
}

TEST(ScheduleCsv, RoundTrip) {
  const ProductCtmdp p = test::load_product("mars");
  const Schedule sigma = esem_optimal(p).schedule;
  EXPECT_EQ(schedule_from_csv(p, schedule_to_csv(p, sigma), "mem"), sigma);
}

TEST(ScheduleCsv, UnknownStateOrActionIsAnError) {
  const ProductCtmdp p = test::load_product("riskreward");
  EXPECT_THROW(schedule_from_csv(p, "state,s,q,action\n0,z=9,q0,a\n", "mem"), std::exception);
  EXPECT_THROW(schedule_from_csv(p, "state,s,q,action\n0,z=0,q0,zz\n", "mem"), std::exception);
  EXPECT_THROW(schedule_from_csv(p, "what,ever\n", "mem"), std::exception);
}

TEST(CmdSimulate, ZeroStepsGivesTheHeaderOnly) {
  SimulateConfig cfg;
  cfg.model_path = test::model_path("riskreward.ctmdp");
  cfg.automaton_path = test::model_path("riskreward.hoa");
  cfg.steps = 0;
  EXPECT_EQ(cmd_simulate(cfg), "step,state,action,next,dwell,reward\n");
}

TEST(CmdSimulate, FixedSeedIsByteIdentical) {
  SimulateConfig cfg;
  cfg.model_path = test::model_path("mars.ctmdp");
  cfg.automaton_path = test::model_path("mars.hoa");
  cfg.steps = 500;
  cfg.seed = 9;
  const std::string a = cmd_simulate(cfg), b = cmd_simulate(cfg);
  EXPECT_EQ(a, b);
  EXPECT_EQ(lines(a).size(), 501u);
  cfg.seed = 10;
  EXPECT_NE(cmd_simulate(cfg), a);
}

TEST(CmdProduct, DumpParsesBackWithAcceptingLabel) {
  const std::string text = cmd_product(test::model_path("mars.ctmdp"), test::model_path("mars.hoa"));
  const Ctmdp back = parse_model(ModelSource{text, "dump"});
  const ProductCtmdp p = test::load_product("mars");
  EXPECT_EQ(back.num_states(), p.num_states());
  EXPECT_NE(std::find(back.propositions.begin(), back.propositions.end(), "accepting"), back.propositions.end());
}

TEST(CmdBench, RowsForSelectedBenchmarks) {
  BenchConfig cfg;
  cfg.models_dir = CTMDP_TEST_MODELS_DIR;
  cfg.hp.ep_n = 500;
  cfg.runs = 1;
  cfg.only = {"RiskReward"};
  cfg.timing = false;
  const BenchReport r = cmd_bench(cfg);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_TRUE(r.rows[0].sat_prob && r.rows[0].exp_prob);
  EXPECT_FALSE(r.rows[0].time_sat || r.rows[0].time_exp);
  cfg.only = {"nope"};
  EXPECT_THROW(cmd_bench(cfg), ValidationError);
}

TEST(Binary, LearnPrintsTheResultTable) {
  const Invocation r = run_cli("learn " + model_args("riskreward") + " -s exp --episodes 300 --no-timing");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "Name,states,prod.,Sat. Prob.,Est. Sat.,Time 1,Exp. Prob.,Est. Exp.,Time 2");
  EXPECT_EQ(rows[1].rfind("riskreward,4,8,-,-,-,0.9,", 0), 0u) << rows[1];
}

TEST(Binary, LearnIsDeterministicWithoutTiming) {
  const std::string args = "learn " + model_args("mars") + " -s sat --episodes 300 --runs 2 --seed 4 --no-timing";
  const Invocation a = run_cli(args), b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Binary, MalformedModelExitsWithParseError) {
  const fs::path bad = scratch() / "bad.ctmdp";
  write_file(bad, "ctmdp\n\nmodule m\n  x : [0..1] init 0;\n  [a] x=0 -> 1 (x'=1);\nendmodule\n");
  const Invocation r = run_cli("check -m \"" + bad.string() + "\" -a \"" + test::model_path("riskreward.hoa") + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":5"), std::string::npos) << r.err;
}

TEST(Binary, InvalidHyperparameterExitsWithValidationError) {
  const Invocation r = run_cli("learn " + model_args("riskreward") + " --beta 2");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("beta"), std::string::npos) << r.err;
}

TEST(Binary, UsageErrorsExitWithOne) {
  EXPECT_EQ(run_cli("learn").code, 1);
  EXPECT_EQ(run_cli("nonsense").code, 1);
  EXPECT_EQ(run_cli("--help").code, 0);
}

TEST(Binary, MissingFileIsAnError) {
  const Invocation r = run_cli("check -m /nonexistent.ctmdp -a /nonexistent.hoa");
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST(Binary, CheckWritesTheScheduleAndSimulateReadsIt) {
  const fs::path sched = scratch() / "sched.csv";
  const Invocation c = run_cli("check " + model_args("riskreward") + " -s sat --schedule-out \"" + sched.string() + "\"");
  ASSERT_EQ(c.code, 0) << c.err;
  const Invocation s = run_cli("simulate " + model_args("riskreward") + " --schedule \"" + sched.string() + "\" --steps 20");
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(lines(s.out).size(), 21u);
}
