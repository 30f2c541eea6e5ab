#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <set>

#include "ctmdp/errors.hpp"
#include "ctmdp/model.hpp"
#include "generators.hpp"
#include "paths.hpp"

using namespace ctmdp;
using ctmdp::test::Edge;
using ctmdp::test::make_model;

namespace {

StateId state(const Ctmdp& m, const std::string& name) {
  const auto s = m.find_state(name);
  EXPECT_TRUE(s.has_value()) << name;
  return s.value_or(0);
}

ActionId action(const Ctmdp& m, const std::string& name) {
  const auto a = m.find_action(name);
  EXPECT_TRUE(a.has_value()) << name;
  return a.value_or(0);
}

double weight_to(const Choice& c, StateId t) {
  double w = 0.0;
  for (const Transition& x : c.transitions) {
    if (x.target == t) w += x.weight;
  }
  return w;
}

}  // namespace

TEST(ExitRate, RiskRewardZoneZeroActionB) {
  const Ctmdp m = test::load_model("riskreward.ctmdp");
  EXPECT_DOUBLE_EQ(exit_rate(m, state(m, "z=0"), action(m, "b")), 10.0);
}

TEST(ExitRate, SingleTransition) {
  const Ctmdp m = make_model(2, {{0, "a", 1, 3.0}, {1, "a", 1, 1.0}});
  EXPECT_DOUBLE_EQ(exit_rate(m, 0, 0), 3.0);
}

TEST(ExitRate, UniformizationExampleActionA2) {
  const Ctmdp m = test::load_model("uniformization.ctmdp");
  EXPECT_DOUBLE_EQ(exit_rate(m, state(m, "q=0"), action(m, "a2")), 6.0);
}

TEST(ExitRate, DisabledActionThrows) {
  const Ctmdp m = test::load_model("riskreward.ctmdp");
  EXPECT_THROW(exit_rate(m, state(m, "z=1"), action(m, "b")), ValidationError);
}

TEST(Embed, RiskRewardSplitsNineToOne) {
  const Ctmdp m = test::load_model("riskreward.ctmdp");
  const EmbeddedMdp e = embed(m);
  const StateId s0 = state(m, "z=0");
  const Choice& b = e.choices[s0][*m.choice_index(s0, action(m, "b"))];
  EXPECT_DOUBLE_EQ(weight_to(b, state(m, "z=2")), 0.9);
  EXPECT_DOUBLE_EQ(weight_to(b, state(m, "z=1")), 0.1);
}

TEST(Embed, DiracTransitionHasProbabilityOne) {
  const Ctmdp m = make_model(2, {{0, "a", 1, 7.5}, {1, "a", 0, 0.3}});
  const EmbeddedMdp e = embed(m);
  ASSERT_EQ(e.choices[0][0].transitions.size(), 1u);
  EXPECT_DOUBLE_EQ(e.choices[0][0].transitions[0].weight, 1.0);
}

TEST(Embed, EndComponentExampleStateOneActionA) {
  const Ctmdp m = test::load_model("end_components.ctmdp");
  const EmbeddedMdp e = embed(m);
  const StateId s1 = state(m, "s=1");
  const Choice& a = e.choices[s1][*m.choice_index(s1, action(m, "a"))];
  EXPECT_NEAR(weight_to(a, state(m, "s=5")), 2.0 / 11.0, 1e-15);
  EXPECT_NEAR(weight_to(a, state(m, "s=3")), 9.0 / 11.0, 1e-15);
}

TEST(Embed, RowsAreStochasticWithSupportOfPositiveRates) {
  test::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Ctmdp m = test::random_model(rng, {.states = 1 + trial % 9, .max_actions = 3, .max_successors = 4});
    const EmbeddedMdp e = embed(m);
    for (StateId s = 0; s < m.num_states(); ++s) {
      ASSERT_EQ(e.choices[s].size(), m.choices[s].size());
      for (std::size_t c = 0; c < m.choices[s].size(); ++c) {
        double sum = 0.0;
        for (const Transition& t : e.choices[s][c].transitions) {
          EXPECT_GT(t.weight, 0.0);
          sum += t.weight;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
        std::set<StateId> a, b;
        for (const Transition& t : m.choices[s][c].transitions) a.insert(t.target);
        for (const Transition& t : e.choices[s][c].transitions) b.insert(t.target);
        EXPECT_EQ(a, b);
      }
    }
  }
}

TEST(Embed, ZeroRateEdgesLeaveTheSupport) {
  const Ctmdp m = make_model(3, {{0, "a", 1, 2.0}, {0, "a", 2, 0.0}, {1, "a", 1, 1.0}, {2, "a", 2, 1.0}});
  const EmbeddedMdp e = embed(m);
  ASSERT_EQ(e.choices[0][0].transitions.size(), 1u);
  EXPECT_EQ(e.choices[0][0].transitions[0].target, 1u);
}

TEST(Uniformize, NonUniformExampleAtCapSix) {
  const Ctmdp m = test::load_model("uniformization.ctmdp");
  const Ctmdp u = uniformize(m, 6.0);
  const StateId q0 = state(m, "q=0"), q1 = state(m, "q=1");
  const Choice& a3 = u.choices[q1][*u.choice_index(q1, action(u, "a3"))];
  EXPECT_DOUBLE_EQ(weight_to(a3, q1), 6.0);
  const Choice& a1 = u.choices[q0][*u.choice_index(q0, action(u, "a1"))];
  EXPECT_DOUBLE_EQ(weight_to(a1, q0), 3.0);
  EXPECT_DOUBLE_EQ(weight_to(a1, q1), 3.0);
  const Choice& a2 = u.choices[q0][*u.choice_index(q0, action(u, "a2"))];
  EXPECT_DOUBLE_EQ(weight_to(a2, q0), 0.0);
  EXPECT_DOUBLE_EQ(weight_to(a2, q1), 6.0);
}

TEST(Uniformize, DefaultCapIsMaximalExitRate) {
  const Ctmdp m = test::load_model("uniformization.ctmdp");
  EXPECT_DOUBLE_EQ(m.max_exit_rate(), 6.0);
  const Ctmdp u = uniformize(m);
  for (StateId s = 0; s < u.num_states(); ++s) {
    for (const Choice& c : u.choices[s]) EXPECT_DOUBLE_EQ(exit_rate(c), 6.0);
  }
}

TEST(Uniformize, AlreadyUniformModelIsUnchanged) {
  const Ctmdp m = make_model(2, {{0, "a", 1, 2.0}, {0, "b", 0, 0.5}, {0, "b", 1, 1.5}, {1, "a", 0, 2.0}});
  const Ctmdp u = uniformize(m, 2.0);
  for (StateId s = 0; s < m.num_states(); ++s) {
    ASSERT_EQ(u.choices[s].size(), m.choices[s].size());
    for (std::size_t c = 0; c < m.choices[s].size(); ++c) {
      for (StateId t = 0; t < m.num_states(); ++t) {
        EXPECT_DOUBLE_EQ(weight_to(u.choices[s][c], t), weight_to(m.choices[s][c], t));
      }
    }
  }
}

TEST(Uniformize, RandomModelsAtTwiceTheMaximum) {
  test::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Ctmdp m = test::random_model(rng, {.states = 5});
    const double cap = 2.0 * m.max_exit_rate();
    const Ctmdp u = uniformize(m, cap);
    for (StateId s = 0; s < m.num_states(); ++s) {
      for (std::size_t c = 0; c < m.choices[s].size(); ++c) {
        EXPECT_NEAR(exit_rate(u.choices[s][c]), cap, 1e-12 * cap);
        for (StateId t = 0; t < m.num_states(); ++t) {
          if (t == s) continue;
          EXPECT_EQ(weight_to(u.choices[s][c], t), weight_to(m.choices[s][c], t));
        }
      }
    }
  }
}

TEST(Uniformize, CapBelowMaximumThrows) {
  const Ctmdp m = test::load_model("uniformization.ctmdp");
  EXPECT_THROW(uniformize(m, 5.9), ValidationError);
}

TEST(Uniformize, PreservesReachabilityUnderEverySchedule) {
  test::Rng rng(5);
  const auto reachable = [](const Ctmdp& m, const Schedule& sigma, bool skip_loops) {
    std::vector<bool> seen(m.num_states(), false);
    std::deque<StateId> todo{m.initial};
    seen[m.initial] = true;
    while (!todo.empty()) {
      const StateId s = todo.front();
      todo.pop_front();
      for (const Transition& t : m.choices[s][sigma[s]].transitions) {
        if (t.weight <= 0.0 || (skip_loops && t.target == s) || seen[t.target]) continue;
        seen[t.target] = true;
        todo.push_back(t.target);
      }
    }
    return seen;
  };
  for (int trial = 0; trial < 50; ++trial) {
    const Ctmdp m = test::random_model(rng, {.states = 6});
    const Ctmdp u = uniformize(m, 1.5 * m.max_exit_rate());
    for (int k = 0; k < 10; ++k) {
      const Schedule sigma = test::random_schedule(rng, m);
      EXPECT_EQ(reachable(m, sigma, true), reachable(u, sigma, true));
    }
  }
}

TEST(Validate, RiskRewardHasNoViolations) {
  EXPECT_TRUE(validate(test::load_model("riskreward.ctmdp")).empty());
}

TEST(Validate, StateWithoutActions) {
  const Ctmdp m = make_model(2, {{0, "a", 1, 1.0}});
  const auto v = validate(m);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].state, std::optional<StateId>(1));
  EXPECT_THROW(require_valid(m), ValidationError);
}

TEST(Validate, ZeroExitRate) {
  const Ctmdp m = make_model(2, {{0, "a", 1, 0.0}, {1, "a", 1, 1.0}});
  const auto v = validate(m);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "exit-rate");
  EXPECT_NE(v[0].message.find("zero exit rate"), std::string::npos);
  EXPECT_EQ(v[0].state, std::optional<StateId>(0));
  EXPECT_EQ(v[0].action, std::optional<ActionId>(0));
}

TEST(Validate, NegativeAndNonFiniteRates) {
  EXPECT_FALSE(validate(make_model(1, {{0, "a", 0, -1.0}})).empty());
  EXPECT_FALSE(validate(make_model(1, {{0, "a", 0, INFINITY}})).empty());
  EXPECT_FALSE(validate(make_model(1, {{0, "a", 0, NAN}})).empty());
}

TEST(Validate, DanglingTargetAndBadInitial) {
  EXPECT_FALSE(validate(make_model(1, {{0, "a", 3, 1.0}})).empty());
  Ctmdp m = make_model(1, {{0, "a", 0, 1.0}});
  m.initial = 4;
  EXPECT_FALSE(validate(m).empty());
}

TEST(Validate, LabelOutsidePropositions) {
  Ctmdp m = make_model(1, {{0, "a", 0, 1.0}}, {"p"});
  m.labels[0] = 0b10;
  EXPECT_FALSE(validate(m).empty());
}

TEST(FormatLetter, UsesPropositionNames) {
  EXPECT_EQ(format_letter({"p", "g"}, 0b11), "{p,g}");
  EXPECT_EQ(format_letter({"p", "g"}, 0), "{}");
}
