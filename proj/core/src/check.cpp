#include "ctmdp/check.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "ctmdp/errors.hpp"
#include "ctmdp/mec.hpp"

namespace ctmdp {
namespace {

using Row = std::vector<std::pair<StateId, double>>;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

void require_schedule(const Ctmdp& m, const Schedule& sigma) {
  if (sigma.size() != m.num_states()) {
    throw ValidationError("schedule has " + std::to_string(sigma.size()) + " entries for " +
                          std::to_string(m.num_states()) + " states");
  }
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (sigma[s] >= m.choices[s].size()) {
      throw ValidationError("schedule picks choice " + std::to_string(sigma[s]) +
                            ", not enabled in state " + std::to_string(s));
    }
  }
}

void require_rewards(const Ctmdp& m, const RewardSpec& r) {
  if (!r.state_rate.empty() && r.state_rate.size() != m.num_states()) {
    throw ValidationError("reward rate table size differs from state count");
  }
  if (!r.action_reward.empty()) {
    if (r.action_reward.size() != m.num_states()) {
      throw ValidationError("action reward table size differs from state count");
    }
    for (StateId s = 0; s < m.num_states(); ++s) {
      if (r.action_reward[s].size() != m.choices[s].size()) {
        throw ValidationError("action reward row size differs in state " + std::to_string(s));
      }
    }
  }
}

// P(s,a,.) with duplicate targets merged.
Row embedded_row(const Choice& c) {
  const double lambda = exit_rate(c);
  Row out;
  for (const Transition& t : c.transitions) {
    if (t.weight <= 0.0) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == t.target; });
    if (it == out.end()) {
      out.emplace_back(t.target, t.weight / lambda);
    } else {
      it->second += t.weight / lambda;
    }
  }
  return out;
}

// P_C(s,a,.) of the model uniformized at cap.
Row uniform_row(const Choice& c, StateId s, double cap) {
  const double lambda = exit_rate(c);
  Row out;
  double self = 1.0 - lambda / cap;
  for (const Transition& t : c.transitions) {
    if (t.weight <= 0.0) continue;
    if (t.target == s) {
      self += t.weight / cap;
      continue;
    }
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == t.target; });
    if (it == out.end()) {
      out.emplace_back(t.target, t.weight / cap);
    } else {
      it->second += t.weight / cap;
    }
  }
  if (self > 0.0) out.emplace_back(s, self);
  return out;
}

Eigen::VectorXd solve(SpMat& a, const Eigen::VectorXd& b, const char* what) {
  a.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw NumericError(std::string(what) + ": singular system", NAN);
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw NumericError(std::string(what) + ": solve failed", NAN);
  }
  return x;
}

struct ChainClasses {
  std::vector<std::size_t> comp;
  std::vector<bool> bottom;  // per component
  std::size_t count = 0;
};

ChainClasses classify(const std::vector<Row>& rows) {
  std::vector<std::vector<StateId>> adj(rows.size());
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (const auto& [t, p] : rows[s]) {
      if (p > 0.0) adj[s].push_back(t);
    }
  }
  ChainClasses out;
  out.comp = strongly_connected_components(adj, out.count);
  out.bottom.assign(out.count, true);
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (StateId t : adj[s]) {
      if (out.comp[t] != out.comp[s]) out.bottom[out.comp[s]] = false;
    }
  }
  return out;
}

// Uniformized model with per-step rewards r_C(s,a) = (rew(s) + rew(s,a)·λ(s,a)) / C.
struct Uniform {
  double cap = 0.0;
  std::vector<std::vector<Row>> rows;
  std::vector<std::vector<double>> reward;

  std::size_t size() const { return rows.size(); }
};

Uniform make_uniform(const Ctmdp& m, const RewardSpec& r, double cap) {
  Uniform u;
  u.cap = cap;
  u.rows.resize(m.num_states());
  u.reward.resize(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (std::size_t i = 0; i < m.choices[s].size(); ++i) {
      const Choice& c = m.choices[s][i];
      u.rows[s].push_back(uniform_row(c, s, cap));
      u.reward[s].push_back((r.rate(s) + r.lump(s, i) * exit_rate(c)) / cap);
    }
  }
  return u;
}

struct AverageEval {
  std::vector<double> gain;
  std::vector<double> bias;
};

// Gain (and bias, normalized by Σ π h = 0 on each recurrent class) of the
// discrete chain picked out of `u` by σ.
AverageEval evaluate_average(const Uniform& u, const Schedule& sigma, bool need_bias) {
  const std::size_t n = u.size();
  std::vector<Row> rows(n);
  std::vector<double> rew(n);
  for (std::size_t s = 0; s < n; ++s) {
    rows[s] = u.rows[s][sigma[s]];
    rew[s] = u.reward[s][sigma[s]];
  }
  const ChainClasses cls = classify(rows);
  AverageEval out;
  out.gain.assign(n, 0.0);
  out.bias.assign(need_bias ? n : 0, 0.0);

  std::vector<std::vector<StateId>> members(cls.count);
  for (StateId s = 0; s < n; ++s) members[cls.comp[s]].push_back(s);
  std::vector<std::size_t> local(n, 0);
  std::vector<bool> recurrent(n, false);

  for (std::size_t c = 0; c < cls.count; ++c) {
    if (!cls.bottom[c]) continue;
    const auto& states = members[c];
    const std::size_t k = states.size();
    for (std::size_t i = 0; i < k; ++i) {
      local[states[i]] = i;
      recurrent[states[i]] = true;
    }
    Eigen::VectorXd pi(k);
    if (k == 1) {
      pi(0) = 1.0;
    } else {
      // (I - P)^T π = 0 with the last equation replaced by Σ π = 1
      std::vector<Triplet> trip;
      for (std::size_t i = 0; i < k; ++i) {
        if (i + 1 < k) trip.emplace_back(i, i, 1.0);
        for (const auto& [t, p] : rows[states[i]]) {
          const std::size_t j = local[t];
          if (j + 1 < k) trip.emplace_back(j, i, -p);
        }
        trip.emplace_back(k - 1, i, 1.0);
      }
      SpMat a(static_cast<long>(k), static_cast<long>(k));
      a.setFromTriplets(trip.begin(), trip.end());
      Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<long>(k));
      b(static_cast<long>(k) - 1) = 1.0;
      pi = solve(a, b, "stationary distribution");
    }
    double g = 0.0;
    for (std::size_t i = 0; i < k; ++i) g += pi(static_cast<long>(i)) * rew[states[i]];
    for (StateId s : states) out.gain[s] = g;

    if (need_bias) {
      if (k == 1) {
        out.bias[states[0]] = 0.0;
        continue;
      }
      // (I - P) h = r - g, first equation replaced by π·h = 0
      std::vector<Triplet> trip;
      Eigen::VectorXd b(static_cast<long>(k));
      for (std::size_t i = 0; i < k; ++i) {
        if (i == 0) {
          for (std::size_t j = 0; j < k; ++j) trip.emplace_back(0, j, pi(static_cast<long>(j)));
          b(0) = 0.0;
          continue;
        }
        trip.emplace_back(i, i, 1.0);
        for (const auto& [t, p] : rows[states[i]]) trip.emplace_back(i, local[t], -p);
        b(static_cast<long>(i)) = rew[states[i]] - g;
      }
      SpMat a(static_cast<long>(k), static_cast<long>(k));
      a.setFromTriplets(trip.begin(), trip.end());
      const Eigen::VectorXd h = solve(a, b, "bias equations");
      for (std::size_t i = 0; i < k; ++i) out.bias[states[i]] = h(static_cast<long>(i));
    }
  }

  std::vector<StateId> transient;
  for (StateId s = 0; s < n; ++s) {
    if (!recurrent[s]) {
      local[s] = transient.size();
      transient.push_back(s);
    }
  }
  if (transient.empty()) return out;
  const std::size_t k = transient.size();
  std::vector<Triplet> trip;
  Eigen::VectorXd bg = Eigen::VectorXd::Zero(static_cast<long>(k));
  for (std::size_t i = 0; i < k; ++i) {
    trip.emplace_back(i, i, 1.0);
    for (const auto& [t, p] : rows[transient[i]]) {
      if (recurrent[t]) {
        bg(static_cast<long>(i)) += p * out.gain[t];
      } else {
        trip.emplace_back(i, local[t], -p);
      }
    }
  }
  SpMat a(static_cast<long>(k), static_cast<long>(k));
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw NumericError("transient gain: singular system", NAN);
  const Eigen::VectorXd gt = lu.solve(bg);
  for (std::size_t i = 0; i < k; ++i) out.gain[transient[i]] = gt(static_cast<long>(i));
  if (need_bias) {
    Eigen::VectorXd bh(static_cast<long>(k));
    for (std::size_t i = 0; i < k; ++i) {
      const StateId s = transient[i];
      double v = rew[s] - out.gain[s];
      for (const auto& [t, p] : rows[s]) {
        if (recurrent[t]) v += p * out.bias[t];
      }
      bh(static_cast<long>(i)) = v;
    }
    const Eigen::VectorXd ht = lu.solve(bh);
    for (std::size_t i = 0; i < k; ++i) out.bias[transient[i]] = ht(static_cast<long>(i));
  }
  return out;
}

double dot(const Row& row, const std::vector<double>& v) {
  double acc = 0.0;
  for (const auto& [t, p] : row) acc += p * v[t];
  return acc;
}

// Solves v = ρ + γ P_C v on the uniformized model for a fixed schedule.
std::vector<double> solve_discounted(const Uniform& u, const std::vector<std::vector<double>>& rho,
                                     double discount, const Schedule& sigma) {
  const std::size_t n = u.size();
  std::vector<Triplet> trip;
  Eigen::VectorXd b(static_cast<long>(n));
  for (std::size_t s = 0; s < n; ++s) {
    trip.emplace_back(s, s, 1.0);
    for (const auto& [t, p] : u.rows[s][sigma[s]]) trip.emplace_back(s, t, -discount * p);
    b(static_cast<long>(s)) = rho[s][sigma[s]];
  }
  SpMat a(static_cast<long>(n), static_cast<long>(n));
  a.setFromTriplets(trip.begin(), trip.end());
  const Eigen::VectorXd x = solve(a, b, "discounted value");
  return std::vector<double>(x.data(), x.data() + n);
}

// ρ̄(s,a) = ρ(s,a)(α+λ)/(α+C): the one-step reward of the uniformized model.
std::vector<std::vector<double>> uniform_rho(const Ctmdp& m, const RewardSpec& r, double alpha,
                                             double cap) {
  std::vector<std::vector<double>> rho(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (std::size_t i = 0; i < m.choices[s].size(); ++i) {
      const double lambda = exit_rate(m.choices[s][i]);
      rho[s].push_back(one_step_reward(m, r, s, i, alpha) * (alpha + lambda) / (alpha + cap));
    }
  }
  return rho;
}

double improvement_eps(const std::vector<double>& v, double tol) {
  double scale = 1.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  return std::max(tol, 1e-13) * scale;
}

// States that reach `target` with positive probability under some choice.
std::vector<bool> can_reach(const std::vector<std::vector<Row>>& rows,
                            const std::vector<bool>& target) {
  const std::size_t n = rows.size();
  std::vector<std::vector<StateId>> pred(n);
  for (StateId s = 0; s < n; ++s) {
    for (const Row& row : rows[s]) {
      for (const auto& [t, p] : row) {
        if (p > 0.0) pred[t].push_back(s);
      }
    }
  }
  std::vector<bool> seen(n, false);
  std::deque<StateId> queue;
  for (StateId s = 0; s < n; ++s) {
    if (target[s]) {
      seen[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const StateId t = queue.front();
    queue.pop_front();
    for (StateId s : pred[t]) {
      if (!seen[s]) {
        seen[s] = true;
        queue.push_back(s);
      }
    }
  }
  return seen;
}

std::vector<std::vector<Row>> embedded_rows(const Ctmdp& m) {
  std::vector<std::vector<Row>> rows(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (const Choice& c : m.choices[s]) rows[s].push_back(embedded_row(c));
  }
  return rows;
}

struct ReachVi {
  std::vector<double> values;
  std::size_t iterations = 0;
  double residual = 0.0;
};

ReachVi reach_vi(const std::vector<std::vector<Row>>& rows, const std::vector<bool>& target,
                 const SolverOptions& opts) {
  const std::size_t n = rows.size();
  const std::vector<bool> live = can_reach(rows, target);
  ReachVi out;
  out.values.assign(n, 0.0);
  for (StateId s = 0; s < n; ++s) {
    if (target[s]) out.values[s] = 1.0;
  }
  std::vector<double> next = out.values;
  for (;;) {
    double delta = 0.0;
    for (StateId s = 0; s < n; ++s) {
      if (target[s] || !live[s]) continue;
      double best = 0.0;
      for (const Row& row : rows[s]) best = std::max(best, dot(row, out.values));
      next[s] = std::min(1.0, best);
      delta = std::max(delta, next[s] - out.values[s]);
    }
    out.values.swap(next);
    ++out.iterations;
    out.residual = delta;
    if (delta <= opts.tolerance) break;
    if (out.iterations >= opts.max_iterations) {
      throw NumericError("reachability value iteration did not converge", delta);
    }
  }
  return out;
}

// Picks, among near-optimal choices, ones that make progress towards `target`
// (backward breadth-first attractor). States outside the attractor keep their
// greedy choice.
Schedule reach_schedule(const std::vector<std::vector<Row>>& rows, const std::vector<bool>& target,
                        const std::vector<double>& v, double slack, Schedule sigma) {
  const std::size_t n = rows.size();
  std::vector<bool> in(n, false);
  std::deque<StateId> frontier;
  for (StateId s = 0; s < n; ++s) {
    if (target[s]) {
      in[s] = true;
      frontier.push_back(s);
    }
  }
  std::vector<std::vector<std::pair<StateId, std::size_t>>> pred(n);
  for (StateId s = 0; s < n; ++s) {
    if (target[s] || v[s] <= 0.0) continue;
    std::size_t greedy = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < rows[s].size(); ++i) {
      const double q = dot(rows[s][i], v);
      if (q > best + 1e-15) {
        best = q;
        greedy = i;
      }
    }
    sigma[s] = greedy;
    for (std::size_t i = 0; i < rows[s].size(); ++i) {
      if (dot(rows[s][i], v) < v[s] - slack) continue;
      for (const auto& [t, p] : rows[s][i]) {
        if (p > 0.0) pred[t].emplace_back(s, i);
      }
    }
  }
  while (!frontier.empty()) {
    const StateId t = frontier.front();
    frontier.pop_front();
    for (const auto& [s, i] : pred[t]) {
      if (in[s]) continue;
      in[s] = true;
      sigma[s] = i;
      frontier.push_back(s);
    }
  }
  return sigma;
}

}  // namespace

RewardSpec RewardSpec::indicator(const std::vector<bool>& states) {
  RewardSpec r;
  r.state_rate.reserve(states.size());
  for (bool b : states) r.state_rate.push_back(b ? 1.0 : 0.0);
  return r;
}

double discount_rate_for(double gamma, double cap) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("discount factor must lie in (0,1)");
  if (!(cap > 0.0)) throw ValidationError("uniformization constant must be positive");
  return cap * (1.0 - gamma) / gamma;
}

double one_step_reward(const Ctmdp& m, const RewardSpec& r, StateId s, std::size_t choice,
                       double alpha) {
  const double lambda = exit_rate(m.choices.at(s).at(choice));
  return r.lump(s, choice) + r.rate(s) / (alpha + lambda);
}

std::vector<double> discounted_value(const Ctmdp& m, const RewardSpec& r, const Schedule& sigma,
                                     double alpha) {
  require_schedule(m, sigma);
  require_rewards(m, r);
  if (!(alpha > 0.0)) throw ValidationError("discount rate must be positive");
  const std::size_t n = m.num_states();
  std::vector<Triplet> trip;
  Eigen::VectorXd b(static_cast<long>(n));
  for (StateId s = 0; s < n; ++s) {
    const Choice& c = m.choices[s][sigma[s]];
    const double lambda = exit_rate(c);
    const double gamma = lambda / (lambda + alpha);
    trip.emplace_back(s, s, 1.0);
    for (const auto& [t, p] : embedded_row(c)) trip.emplace_back(s, t, -gamma * p);
    b(static_cast<long>(s)) = one_step_reward(m, r, s, sigma[s], alpha);
  }
  SpMat a(static_cast<long>(n), static_cast<long>(n));
  a.setFromTriplets(trip.begin(), trip.end());
  const Eigen::VectorXd x = solve(a, b, "discounted value");
  return std::vector<double>(x.data(), x.data() + n);
}

std::vector<double> discounted_value_uniformized(const Ctmdp& m, const RewardSpec& r,
                                                 const Schedule& sigma, double alpha,
                                                 double cap) {
  require_schedule(m, sigma);
  require_rewards(m, r);
  if (!(alpha > 0.0)) throw ValidationError("discount rate must be positive");
  if (!(cap >= m.max_exit_rate())) throw ValidationError("uniformization constant too small");
  const Uniform u = make_uniform(m, r, cap);
  return solve_discounted(u, uniform_rho(m, r, alpha, cap), cap / (cap + alpha), sigma);
}

CheckResult discounted_optimal(const Ctmdp& m, const RewardSpec& r, double alpha,
                               const SolverOptions& opts) {
  require_rewards(m, r);
  if (!(alpha > 0.0)) throw ValidationError("discount rate must be positive");
  const double cap = m.max_exit_rate();
  const Uniform u = make_uniform(m, r, cap);
  const auto rho = uniform_rho(m, r, alpha, cap);
  const double discount = cap / (cap + alpha);
  CheckResult out;
  out.schedule.assign(m.num_states(), 0);
  for (;;) {
    out.values = solve_discounted(u, rho, discount, out.schedule);
    ++out.iterations;
    const double eps = improvement_eps(out.values, 1e-12);
    bool changed = false;
    double gap = 0.0;
    for (StateId s = 0; s < m.num_states(); ++s) {
      const std::size_t cur = out.schedule[s];
      double best = rho[s][cur] + discount * dot(u.rows[s][cur], out.values);
      std::size_t arg = cur;
      for (std::size_t i = 0; i < u.rows[s].size(); ++i) {
        const double q = rho[s][i] + discount * dot(u.rows[s][i], out.values);
        if (q > best + eps) {
          best = q;
          arg = i;
        }
      }
      gap = std::max(gap, best - out.values[s]);
      if (arg != cur) {
        out.schedule[s] = arg;
        changed = true;
      }
    }
    out.residual = gap;
    if (!changed) break;
    if (out.iterations >= opts.max_iterations) {
      throw NumericError("discounted policy iteration did not terminate", gap);
    }
  }
  return out;
}

std::vector<std::vector<double>> discounted_q_values(const Ctmdp& m, const RewardSpec& r,
                                                     double alpha, const SolverOptions& opts) {
  const CheckResult opt = discounted_optimal(m, r, alpha, opts);
  std::vector<std::vector<double>> q(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (std::size_t i = 0; i < m.choices[s].size(); ++i) {
      const Choice& c = m.choices[s][i];
      const double lambda = exit_rate(c);
      q[s].push_back(one_step_reward(m, r, s, i, alpha) +
                     lambda / (lambda + alpha) * dot(embedded_row(c), opt.values));
    }
  }
  return q;
}

std::vector<double> average_value_uniformized(const Ctmdp& m, const RewardSpec& r,
                                              const Schedule& sigma, double cap) {
  require_schedule(m, sigma);
  require_rewards(m, r);
  if (!(cap >= m.max_exit_rate()) || !(cap > 0.0)) {
    throw ValidationError("uniformization constant too small");
  }
  return evaluate_average(make_uniform(m, r, cap), sigma, false).gain;
}

std::vector<double> average_value(const Ctmdp& m, const RewardSpec& r, const Schedule& sigma) {
  const double cap = m.max_exit_rate();
  std::vector<double> g = average_value_uniformized(m, r, sigma, cap);
  for (double& x : g) x *= cap;
  return g;
}

CheckResult average_optimal(const Ctmdp& m, const RewardSpec& r, const SolverOptions& opts) {
  require_rewards(m, r);
  const double cap = m.max_exit_rate();
  const Uniform u = make_uniform(m, r, cap);
  const std::size_t n = m.num_states();
  CheckResult out;
  out.schedule.assign(n, 0);
  AverageEval ev;
  for (;;) {
    ev = evaluate_average(u, out.schedule, true);
    ++out.iterations;
    double scale = 1.0;
    for (double x : ev.bias) scale = std::max(scale, std::abs(x));
    const double eps_g = std::max(opts.tolerance, 1e-13) * 1e-2;
    const double eps_h = std::max(opts.tolerance, 1e-13) * 1e-2 * scale;

    // gain improvement
    bool changed = false;
    double gap = 0.0;
    std::vector<double> best_pg(n);
    for (StateId s = 0; s < n; ++s) {
      const std::size_t cur = out.schedule[s];
      double best = dot(u.rows[s][cur], ev.gain);
      std::size_t arg = cur;
      for (std::size_t i = 0; i < u.rows[s].size(); ++i) {
        const double v = dot(u.rows[s][i], ev.gain);
        if (v > best + eps_g) {
          best = v;
          arg = i;
        }
      }
      best_pg[s] = best;
      gap = std::max(gap, best - ev.gain[s]);
      if (arg != cur) {
        out.schedule[s] = arg;
        changed = true;
      }
    }
    if (!changed) {
      // bias improvement among gain-maximizing choices
      for (StateId s = 0; s < n; ++s) {
        const std::size_t cur = out.schedule[s];
        double best = u.reward[s][cur] + dot(u.rows[s][cur], ev.bias);
        std::size_t arg = cur;
        for (std::size_t i = 0; i < u.rows[s].size(); ++i) {
          if (dot(u.rows[s][i], ev.gain) < best_pg[s] - eps_g) continue;
          const double v = u.reward[s][i] + dot(u.rows[s][i], ev.bias);
          if (v > best + eps_h) {
            best = v;
            arg = i;
          }
        }
        gap = std::max(gap, best - ev.gain[s] - ev.bias[s]);
        if (arg != cur) {
          out.schedule[s] = arg;
          changed = true;
        }
      }
    }
    out.residual = gap * cap;
    if (!changed) break;
    if (out.iterations >= std::min<std::size_t>(opts.max_iterations, 100000)) {
      throw NumericError("average-reward policy iteration did not terminate", out.residual);
    }
  }
  out.values = ev.gain;
  for (double& x : out.values) x *= cap;
  out.residual = 0.0;
  return out;
}

std::vector<double> reachability_of(const Ctmdp& m, const std::vector<bool>& target,
                                    const Schedule& sigma) {
  require_schedule(m, sigma);
  const std::size_t n = m.num_states();
  if (target.size() != n) throw ValidationError("target mask size differs from state count");
  std::vector<std::vector<Row>> rows(n);
  for (StateId s = 0; s < n; ++s) rows[s].push_back(embedded_row(m.choices[s][sigma[s]]));
  const std::vector<bool> live = can_reach(rows, target);
  std::vector<double> out(n, 0.0);
  std::vector<std::size_t> local(n, 0);
  std::vector<StateId> maybe;
  for (StateId s = 0; s < n; ++s) {
    if (target[s]) {
      out[s] = 1.0;
    } else if (live[s]) {
      local[s] = maybe.size();
      maybe.push_back(s);
    }
  }
  if (maybe.empty()) return out;
  const std::size_t k = maybe.size();
  std::vector<Triplet> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<long>(k));
  for (std::size_t i = 0; i < k; ++i) {
    trip.emplace_back(i, i, 1.0);
    for (const auto& [t, p] : rows[maybe[i]][0]) {
      if (target[t]) {
        b(static_cast<long>(i)) += p;
      } else if (live[t]) {
        trip.emplace_back(i, local[t], -p);
      }
    }
  }
  SpMat a(static_cast<long>(k), static_cast<long>(k));
  a.setFromTriplets(trip.begin(), trip.end());
  const Eigen::VectorXd x = solve(a, b, "reachability");
  for (std::size_t i = 0; i < k; ++i) {
    out[maybe[i]] = std::clamp(x(static_cast<long>(i)), 0.0, 1.0);
  }
  return out;
}

CheckResult max_reachability(const Ctmdp& m, const std::vector<bool>& target,
                             const SolverOptions& opts) {
  require_valid(m);
  if (target.size() != m.num_states()) {
    throw ValidationError("target mask size differs from state count");
  }
  const auto rows = embedded_rows(m);
  const ReachVi vi = reach_vi(rows, target, opts);
  CheckResult out;
  const double slack = std::max(1e-9, 1e3 * opts.tolerance);
  out.schedule = reach_schedule(rows, target, vi.values, slack, Schedule(m.num_states(), 0));
  out.values = reachability_of(m, target, out.schedule);
  out.iterations = vi.iterations;
  out.residual = vi.residual;
  return out;
}

std::vector<double> bounded_reachability(const Ctmdp& m, const std::vector<bool>& target,
                                         std::size_t jumps) {
  require_valid(m);
  if (target.size() != m.num_states()) {
    throw ValidationError("target mask size differs from state count");
  }
  const auto rows = embedded_rows(m);
  const std::size_t n = rows.size();
  std::vector<double> v(n, 0.0);
  for (StateId s = 0; s < n; ++s) {
    if (target[s]) v[s] = 1.0;
  }
  std::vector<double> next = v;
  for (std::size_t k = 0; k < jumps; ++k) {
    for (StateId s = 0; s < n; ++s) {
      if (target[s]) continue;
      double best = 0.0;
      for (const Row& row : rows[s]) best = std::max(best, dot(row, v));
      next[s] = std::min(1.0, best);
    }
    v.swap(next);
  }
  return v;
}

std::vector<double> psem_of(const ProductCtmdp& p, const Schedule& sigma) {
  const Ctmdp& m = p.model;
  require_schedule(m, sigma);
  std::vector<Row> rows(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) rows[s] = embedded_row(m.choices[s][sigma[s]]);
  const ChainClasses cls = classify(rows);
  std::vector<bool> good(cls.count, false);
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (cls.bottom[cls.comp[s]] && p.accepting[s]) good[cls.comp[s]] = true;
  }
  std::vector<bool> target(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) target[s] = good[cls.comp[s]];
  return reachability_of(m, target, sigma);
}

std::vector<double> esem_of(const ProductCtmdp& p, const Schedule& sigma) {
  return average_value(p.model, RewardSpec::indicator(p.accepting), sigma);
}

CheckResult psem_optimal(const ProductCtmdp& p, double tol) {
  const Ctmdp& m = p.model;
  require_valid(m);
  const EmbeddedMdp e = embed(m);
  const MecSet mecs = mec_decompose(e, p.accepting);
  const std::size_t n = m.num_states();

  std::vector<bool> target(n, false);
  Schedule sigma(n, 0);
  for (const EndComponent& c : mecs.components) {
    if (!c.accepting) continue;
    // attractor towards the accepting states using only component choices
    std::vector<bool> in(n, false);
    std::deque<StateId> frontier;
    for (std::size_t i = 0; i < c.states.size(); ++i) {
      const StateId s = c.states[i];
      target[s] = true;
      sigma[s] = c.choices[i].front();
      if (p.accepting[s]) {
        in[s] = true;
        frontier.push_back(s);
      }
    }
    while (!frontier.empty()) {
      const StateId t = frontier.front();
      frontier.pop_front();
      for (std::size_t i = 0; i < c.states.size(); ++i) {
        const StateId s = c.states[i];
        if (in[s]) continue;
        for (std::size_t ch : c.choices[i]) {
          const auto& tr = e.choices[s][ch].transitions;
          if (std::any_of(tr.begin(), tr.end(),
                          [&](const Transition& x) { return x.target == t && x.weight > 0.0; })) {
            in[s] = true;
            sigma[s] = ch;
            frontier.push_back(s);
            break;
          }
        }
      }
    }
  }

  std::vector<std::vector<Row>> rows(n);
  for (StateId s = 0; s < n; ++s) {
    for (const Choice& c : e.choices[s]) rows[s].push_back(embedded_row(c));
  }
  SolverOptions opts;
  opts.tolerance = tol;
  const ReachVi vi = reach_vi(rows, target, opts);
  const double slack = std::max(1e-9, 1e3 * tol);
  sigma = reach_schedule(rows, target, vi.values, slack, sigma);

  CheckResult out;
  out.schedule = std::move(sigma);
  out.values = psem_of(p, out.schedule);
  out.iterations = vi.iterations;
  out.residual = vi.residual;
  return out;
}

CheckResult esem_optimal(const ProductCtmdp& p, double tol) {
  SolverOptions opts;
  opts.tolerance = tol;
  return average_optimal(p.model, RewardSpec::indicator(p.accepting), opts);
}

BlackwellReport blackwell_probe(const Ctmdp& m, const RewardSpec& r,
                                const std::vector<double>& gammas) {
  BlackwellReport out;
  out.average = average_optimal(m, r);
  const double cap = m.max_exit_rate();
  double prev_gamma = 0.0;
  for (double gamma : gammas) {
    if (!(gamma > prev_gamma && gamma < 1.0)) {
      throw ValidationError("discount factors must increase strictly within (0,1)");
    }
    prev_gamma = gamma;
    BlackwellStep step;
    step.gamma = gamma;
    step.alpha = discount_rate_for(gamma, cap);
    step.schedule = discounted_optimal(m, r, step.alpha).schedule;
    step.same_as_previous = !out.steps.empty() && out.steps.back().schedule == step.schedule;
    const std::vector<double> g = average_value(m, r, step.schedule);
    for (StateId s = 0; s < m.num_states(); ++s) {
      step.gain_gap = std::max(step.gain_gap, out.average.values[s] - g[s]);
    }
    out.steps.push_back(std::move(step));
  }
  out.stabilized = out.steps.size() < 2 || out.steps.back().same_as_previous;
  out.final_average_optimal = !out.steps.empty() && out.steps.back().gain_gap < 1e-6;
  return out;
}

}  // namespace ctmdp
