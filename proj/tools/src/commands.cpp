#include "ctmdp_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ctmdp/errors.hpp"
#include "ctmdp/simulate.hpp"

namespace ctmdp::cli {

Semantics parse_semantics(const std::string& text) {
  if (text == "sat") return Semantics::Sat;
  if (text == "exp") return Semantics::Exp;
  throw ValidationError("unknown semantics '" + text + "' (expected sat or exp)");
}

const char* semantics_name(Semantics s) { return s == Semantics::Sat ? "sat" : "exp"; }

void RunConfig::validate() const {
  if (runs == 0) throw ValidationError("runs must be at least 1");
  hp.validate();
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

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

std::string model_state_name(const ProductCtmdp& p, const Ctmdp& m, StateId x) {
  const ProductOrigin& o = p.origin[x];
  if (o.is_sink()) return "-";
  return o.model_state < m.state_names.size() ? m.state_names[o.model_state]
                                              : std::to_string(o.model_state);
}

std::string aut_state_name(const ProductCtmdp& p, const BuchiAutomaton& a, StateId x) {
  const ProductOrigin& o = p.origin[x];
  if (o.is_sink()) return "reject";
  if (o.aut_state < a.state_names.size() && !a.state_names[o.aut_state].empty()) {
    return a.state_names[o.aut_state];
  }
  return "q" + std::to_string(o.aut_state);
}

// Product state naming used by the CSV writers: model and automaton parts.
struct Namer {
  const Instance* inst = nullptr;
  std::string s(StateId x) const { return model_state_name(inst->product, inst->model, x); }
  std::string q(StateId x) const { return aut_state_name(inst->product, inst->automaton, x); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

}  // namespace

std::vector<std::uint64_t> run_seeds(std::uint64_t seed, std::size_t runs) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < runs; ++i) out.push_back(seed + i);
  return out;
}

Instance load_instance(const std::string& model_path, const std::string& automaton_path) {
  Instance inst;
  inst.model = parse_model(read_model_file(model_path));
  inst.automaton = parse_hoa(read_hoa_file(automaton_path));
  inst.product = build_product(inst.model, inst.automaton);
  return inst;
}

LearnReport learn_instance(const Instance& inst, const RunConfig& cfg) {
  cfg.validate();
  LearnReport report;
  const ProductCtmdp& p = inst.product;
  const StateId init = p.model.initial;
  const bool sat = cfg.semantics == Semantics::Sat;
  report.optimum = sat ? psem_optimal(p).values[init] : esem_optimal(p).values[init];

  std::vector<double> values, times;
  for (std::uint64_t seed : run_seeds(cfg.seed, cfg.runs)) {
    const auto start = std::chrono::steady_clock::now();
    const LearnResult lr = sat ? learn_sat(inst.model, inst.automaton, cfg.hp, seed)
                               : learn_exp(inst.model, inst.automaton, cfg.hp, seed);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    RunOutcome run;
    run.seed = seed;
    run.seconds = secs;
    run.discovered = lr.env.num_discovered();
    run.schedule = to_product_schedule(lr, p);
    run.value = sat ? psem_of(p, run.schedule)[init] : esem_of(p, run.schedule)[init];
    values.push_back(run.value);
    times.push_back(secs);
    report.runs.push_back(std::move(run));
  }

  BenchmarkRow& row = report.row;
  row.name = cfg.name.empty() ? std::filesystem::path(cfg.model_path).stem().string() : cfg.name;
  row.states = inst.model.num_states();
  row.product_states = p.num_states();
  if (sat) {
    row.sat_prob = report.optimum;
    row.est_sat = mean(values);
    if (cfg.timing) row.time_sat = mean(times);
  } else {
    row.exp_prob = report.optimum;
    row.est_exp = mean(values);
    if (cfg.timing) row.time_exp = mean(times);
  }
  return report;
}

LearnReport cmd_learn(const RunConfig& cfg) {
  cfg.validate();
  return learn_instance(load_instance(cfg.model_path, cfg.automaton_path), cfg);
}

std::string schedule_to_csv(const ProductCtmdp& p, const Schedule& sigma) {
  std::ostringstream out;
  out << "state,s,q,action\n";
  for (StateId x = 0; x < p.num_states(); ++x) {
    const std::string& name = p.model.state_names[x];
    // product state names have the form "(s,q)"; split them back for the file
    std::string s = "-", q = name;
    if (!p.origin[x].is_sink() && name.size() > 2 && name.front() == '(') {
      const auto comma = name.rfind(',');
      s = name.substr(1, comma - 1);
      q = name.substr(comma + 1, name.size() - comma - 2);
    }
    const ActionId a = p.model.choices[x][sigma.at(x)].action;
    out << x << ',' << csv_field(s) << ',' << csv_field(q) << ','
        << csv_field(p.model.action_names[a]) << '\n';
  }
  return out.str();
}

Schedule schedule_from_csv(const ProductCtmdp& p, const std::string& text,
                           const std::string& origin) {
  std::map<std::pair<std::string, std::string>, StateId> index;
  for (StateId x = 0; x < p.num_states(); ++x) {
    const std::string& name = p.model.state_names[x];
    if (p.origin[x].is_sink() || name.size() < 3 || name.front() != '(') {
      index[{"-", name}] = x;
      continue;
    }
    const auto comma = name.rfind(',');
    index[{name.substr(1, comma - 1), name.substr(comma + 1, name.size() - comma - 2)}] = x;
  }

  Schedule sigma(p.num_states(), 0);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (lineno == 1) {
      if (f.size() != 4 || f[0] != "state" || f[1] != "s" || f[2] != "q" || f[3] != "action") {
        throw ParseError(origin, lineno, 1, "expected header 'state,s,q,action'");
      }
      continue;
    }
    if (f.size() != 4) throw ParseError(origin, lineno, 1, "expected 4 fields");
    const auto it = index.find({f[1], f[2]});
    if (it == index.end()) {
      throw ValidationError(origin + ":" + std::to_string(lineno) +
                            ": schedule references unknown state (" + f[1] + "," + f[2] + ")");
    }
    const StateId x = it->second;
    const auto& choices = p.model.choices[x];
    bool found = false;
    for (std::size_t i = 0; i < choices.size(); ++i) {
      if (p.model.action_names[choices[i].action] == f[3]) {
        sigma[x] = i;
        found = true;
        break;
      }
    }
    if (!found) {
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": action '" + f[3] +
                            "' is not enabled in (" + f[1] + "," + f[2] + ")");
    }
  }
  return sigma;
}

CheckOutput cmd_check(const CheckConfig& cfg) {
  const Instance inst = load_instance(cfg.model_path, cfg.automaton_path);
  const ProductCtmdp& p = inst.product;
  CheckOutput out;
  const bool sat = cfg.semantics == Semantics::Sat;
  if (cfg.schedule_path) {
    out.schedule = schedule_from_csv(p, slurp(*cfg.schedule_path), *cfg.schedule_path);
    out.values = sat ? psem_of(p, out.schedule) : esem_of(p, out.schedule);
  } else {
    CheckResult r = sat ? psem_optimal(p, cfg.tol) : esem_optimal(p, cfg.tol);
    out.values = std::move(r.values);
    out.schedule = std::move(r.schedule);
  }
  const Namer names{&inst};
  std::ostringstream csv;
  csv << "state,s,q,value\n";
  for (StateId x = 0; x < p.num_states(); ++x) {
    csv << x << ',' << csv_field(names.s(x)) << ',' << csv_field(names.q(x)) << ','
        << format_number(out.values[x]) << '\n';
  }
  out.values_csv = csv.str();
  out.schedule_csv = schedule_to_csv(p, out.schedule);
  return out;
}

std::string cmd_simulate(const SimulateConfig& cfg) {
  const Instance inst = load_instance(cfg.model_path, cfg.automaton_path);
  const ProductCtmdp& p = inst.product;
  Schedule sigma;
  if (cfg.schedule_path) {
    sigma = schedule_from_csv(p, slurp(*cfg.schedule_path), *cfg.schedule_path);
  } else {
    sigma = cfg.semantics == Semantics::Sat ? psem_optimal(p).schedule : esem_optimal(p).schedule;
  }
  std::ostringstream out;
  out << "step,state,action,next,dwell,reward\n";
  if (cfg.steps == 0) return out.str();
  ModelEnv env(p.model, p.accepting);
  RngHandle rng(cfg.seed, Stream::Trajectory);
  const auto observe = [&](const TrajectoryStep& st) {
    const ActionId a = p.model.choices[st.state][st.action].action;
    out << st.index << ',' << st.state << ',' << csv_field(p.model.action_names[a]) << ','
        << st.next << ',' << format_number(st.dwell) << ',' << format_number(st.reward) << '\n';
  };
  run_episode(
      env, [&](StateId s) { return sigma[s]; },
      [&](const TrajectoryStep& st) { return exp_reward(p.accepting[st.state], st.dwell); }, {},
      rng, cfg.steps, observe, false);
  return out.str();
}

namespace {

std::string dump_with_acceptance(ProductCtmdp p) {
  if (p.model.propositions.size() < kMaxPropositions) {
    const std::size_t bit = p.model.propositions.size();
    p.model.propositions.push_back("accepting");
    for (StateId x = 0; x < p.num_states(); ++x) {
      if (p.accepting[x]) p.model.labels[x] |= Letter{1} << bit;
    }
  }
  return write_model(p.model, "product");
}

}  // namespace

std::string cmd_product(const std::string& model_path, const std::string& automaton_path) {
  return dump_with_acceptance(load_instance(model_path, automaton_path).product);
}

const std::vector<BenchEntry>& bench_entries() {
  static const std::vector<BenchEntry> entries = {
      {"RiskReward", "riskreward.ctmdp", "riskreward.hoa"},
      {"Mars", "mars.ctmdp", "mars.hoa"},
      {"Polling", "polling.ctmdp", "polling.hoa"},
  };
  return entries;
}

BenchReport cmd_bench(const BenchConfig& cfg) {
  BenchReport out;
  for (const std::string& name : cfg.only) {
    const auto& all = bench_entries();
    if (std::none_of(all.begin(), all.end(), [&](const BenchEntry& e) { return e.name == name; })) {
      throw ValidationError("unknown benchmark '" + name + "'");
    }
  }
  for (const BenchEntry& e : bench_entries()) {
    if (!cfg.only.empty() && std::find(cfg.only.begin(), cfg.only.end(), e.name) == cfg.only.end()) {
      continue;
    }
    const std::filesystem::path dir(cfg.models_dir);
    RunConfig rc;
    rc.model_path = (dir / e.model_file).string();
    rc.automaton_path = (dir / e.automaton_file).string();
    rc.hp = cfg.hp;
    rc.seed = cfg.seed;
    rc.runs = cfg.runs;
    rc.name = e.name;
    rc.timing = cfg.timing;
    const Instance inst = load_instance(rc.model_path, rc.automaton_path);
    rc.semantics = Semantics::Sat;
    LearnReport sat = learn_instance(inst, rc);
    rc.semantics = Semantics::Exp;
    LearnReport exp = learn_instance(inst, rc);
    BenchmarkRow row = sat.row;
    row.exp_prob = exp.row.exp_prob;
    row.est_exp = exp.row.est_exp;
    row.time_exp = exp.row.time_exp;
    out.rows.push_back(row);
    out.sat.push_back(std::move(sat));
    out.exp.push_back(std::move(exp));
  }
  return out;
}

}  // namespace ctmdp::cli
