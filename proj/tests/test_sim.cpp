#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fcfs/analytic.hpp"
#include "fcfs/loynes.hpp"
#include "fcfs/reversibility.hpp"
#include "fcfs/sim.hpp"
#include "test_util.hpp"

using namespace fcfs;
using fcfs::testing::nn;

namespace {

MatchingModel single_edge() { return validate_model({{{"c1", 1.0}}, {{"s1", 1.0}}, {{"c1", "s1"}}}); }

}  // namespace

TEST(Sim, MatchesAreCompatibleAndFcfs) {
  MatchingModel m = nn();
  const Pos pairs = 20000;
  auto recs = simulate_matches(m, 5, pairs);
  ItemSequence seq;
  DrivingSequence d(m, 5);
  for (Pos p = 0; p < pairs; ++p) {
    seq.customers.push_back(d.customer(p));
    seq.servers.push_back(d.server(p));
  }
  Matching ref = fcfs_match_finite(m, seq);
  std::vector<Link> got;
  for (const auto& r : recs) {
    EXPECT_TRUE(m.compatible(r.customer, r.server));
    EXPECT_EQ(r.customer, d.customer(r.customer_pos));
    EXPECT_EQ(r.server, d.server(r.server_pos));
    got.push_back({r.customer_pos, r.server_pos});
  }
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, ref.links);
}

TEST(Sim, RegenerationRatesAgreeWithAnalytic) {
  MatchingModel m = nn();
  StationaryEvaluator ev(m);
  RateMatrix r = matching_rates(ev);
  RegenerationReport rep = regeneration_estimates(m, 11, 100000);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (m.compatible(i, j)) {
        EXPECT_LE(std::abs(z_score(r.at(i, j), rep.rate(i, j))), 4.0) << i << "," << j;
      } else {
        EXPECT_EQ(rep.match_counts[i * 3 + j], 0);
        EXPECT_EQ(rep.rate(i, j).value, 0.0);
      }
    }
  EXPECT_LE(std::abs(z_score(ev.B(), rep.pi_empty)), 4.0);
  EXPECT_LE(std::abs(z_score(1.0 / ev.B(), rep.mean_cycle_length)), 4.0);
}

TEST(Sim, KacIdentityAndSeeds) {
  MatchingModel m = nn();
  RegenerationReport a = regeneration_estimates(m, 1, 20000);
  // one empty visit per cycle
  EXPECT_NEAR(a.mean_cycle_length.value * a.pi_empty.value, 1.0, 1e-12);
  RegenerationReport b = regeneration_estimates(m, 2, 20000);
  const double diff = a.pi_empty.value - b.pi_empty.value;
  EXPECT_LE(std::abs(diff) / std::hypot(a.pi_empty.se, b.pi_empty.se), 4.0);
  RegenerationReport again = regeneration_estimates(m, 1, 20000);
  EXPECT_EQ(again.pairs, a.pairs);
  EXPECT_EQ(again.match_counts, a.match_counts);
}

TEST(Sim, LinkPmfAgreesWithMixture) {
  MatchingModel m = nn();
  StationaryEvaluator ev(m);
  RegenerationReport rep = regeneration_estimates(m, 17, 100000);
  int bins = 0;
  for (int j = 0; j < 3; ++j) {
    PmfTable t = link_length_distribution(ev, j).pmf_table();
    for (std::size_t k = 0; k < t.values.size(); ++k) {
      const long len = t.lo + static_cast<long>(k);
      if (t.values[k] * rep.server_matches[j] < 100.0) continue;
      auto it = rep.link_pmf[j].find(len);
      ASSERT_NE(it, rep.link_pmf[j].end());
      EXPECT_LE(std::abs(z_score(t.values[k], it->second)), 4.0) << j << " " << len;
      ++bins;
    }
  }
  EXPECT_GT(bins, 10);
}

TEST(Sim, ZsOccupancyMatchesProductForm) {
  MatchingModel m = nn();
  StationaryEvaluator ev(m);
  OccupancyReport rep = occupancy_estimates(m, ChainKind::Zs, 100000, 23, 3);
  int checked = 0;
  for (const auto& [s, e] : rep.states) {
    const double p = pi_detailed(ev, ChainKind::Zs, s);
    if (p < 1e-3) continue;
    EXPECT_LE(std::abs(z_score(p, e)), 4.0) << format_state(m, ChainKind::Zs, s);
    ++checked;
  }
  EXPECT_GT(checked, 5);
  EXPECT_LE(std::abs(z_score(1.0 / ev.B(), rep.mean_cycle_length)), 4.0);
}

TEST(Sim, QsEmptyFrequency) {
  ChainRun run = simulate_chain(nn(), ChainKind::Qs, 1000000, 29, 0);
  EXPECT_TRUE(run.crp_holds);
  EXPECT_NEAR(run.empty_visits / 1e6, 0.25, 0.01);
  EXPECT_EQ(run.occupancy.size(), 1u);
}

TEST(Sim, SingleEdgeAlwaysEmpty) {
  MatchingModel m = single_edge();
  for (ChainKind k : {ChainKind::Zs, ChainKind::Qs, ChainKind::D, ChainKind::O}) {
    ChainRun run = simulate_chain(m, k, 1000, 3);
    EXPECT_EQ(run.empty_visits, 1000);
    EXPECT_EQ(run.max_length, 0u);
  }
}

TEST(Sim, TransientWithoutPooling) {
  MatchingModel m = nn({0.5, 0.05, 0.45}, {0.4, 0.4, 0.2});
  EXPECT_FALSE(check_crp(m).holds);
  ChainRun run = simulate_chain(m, ChainKind::O, 1000000, 31);
  EXPECT_FALSE(run.crp_holds);
  EXPECT_LT(run.last_empty_step, 100000);
  EXPECT_GT(run.final_state.length(), 10000u);
  EXPECT_THROW(regeneration_estimates(m, 1, 10), std::domain_error);
  EXPECT_THROW(occupancy_estimates(m, ChainKind::Zs, 10, 1, 2), std::domain_error);
}

TEST(Sim, QsWordGrowsWithoutPooling) {
  ChainRun run = simulate_chain(nn({0.5, 0.05, 0.45}, {0.4, 0.4, 0.2}), ChainKind::Qs, 100000, 37, 0);
  EXPECT_LT(run.last_empty_step, 10000);
  EXPECT_GT(run.final_state.length(), 1000u);
}

TEST(Sim, ChainRunsAreDeterministic) {
  MatchingModel m = nn();
  for (ChainKind k : {ChainKind::Zs, ChainKind::Zc, ChainKind::D, ChainKind::E, ChainKind::Qs, ChainKind::O}) {
    ChainRun a = simulate_chain(m, k, 5000, 77), b = simulate_chain(m, k, 5000, 77);
    EXPECT_EQ(a.occupancy, b.occupancy);
    EXPECT_EQ(a.final_state, b.final_state);
  }
  auto t1 = chain_trajectory(m, ChainKind::D, {}, 100, 4), t2 = chain_trajectory(m, ChainKind::D, {}, 100, 4);
  EXPECT_EQ(t1, t2);
  EXPECT_EQ(t1.size(), 101u);
  EXPECT_TRUE(t1.front().empty());
}

TEST(Sim, PairwiseStateMatchesOChain) {
  // the O chain and the queue-based matcher see the same driving sequences
  MatchingModel m = nn();
  DrivingSequence d(m, 8);
  PairwiseMatcher pm(m, d, 0);
  auto traj = chain_trajectory(m, ChainKind::O, {}, 2000, 8);
  for (int k = 1; k <= 2000; ++k) {
    pm.advance(nullptr);
    ASSERT_EQ(pm.state(), traj[k]) << k;
  }
}

TEST(Sim, OChainRunMatchesGenericKernel) {
  MatchingModel m = nn();
  auto traj = chain_trajectory(m, ChainKind::O, {}, 5000, 12);
  std::map<ChainState, long> occ;
  long empties = 0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    if (traj[k].length() <= 3) ++occ[traj[k]];
    empties += traj[k].empty();
  }
  ChainRun run = simulate_chain(m, ChainKind::O, 5000, 12, 3);
  EXPECT_EQ(run.occupancy, occ);
  EXPECT_EQ(run.empty_visits, empties);
  EXPECT_EQ(run.final_state, traj.back());
}

TEST(Loynes, CouplesAndAgreesWithFiniteMatching) {
  MatchingModel m = nn();
  LoynesOptions opts;
  opts.window_begin = 1000;
  opts.window_end = 1200;
  LoynesResult res = loynes_window(m, 99, opts);
  EXPECT_LE(res.regeneration, opts.window_begin);
  EXPECT_GT(res.regeneration, -res.k);
  for (const Link& l : res.links) {
    const bool in = (l.customer >= opts.window_begin && l.customer < opts.window_end) ||
                    (l.server >= opts.window_begin && l.server < opts.window_end);
    EXPECT_TRUE(in);
  }
  // every window item appears once on its side
  std::vector<int> cseen(200, 0), sseen(200, 0);
  for (const Link& l : res.links) {
    if (l.customer >= opts.window_begin && l.customer < opts.window_end) ++cseen[l.customer - opts.window_begin];
    if (l.server >= opts.window_begin && l.server < opts.window_end) ++sseen[l.server - opts.window_begin];
  }
  EXPECT_EQ(std::count(cseen.begin(), cseen.end(), 1), 200);
  EXPECT_EQ(std::count(sseen.begin(), sseen.end(), 1), 200);

  // a start eight times further back gives the same links
  DrivingSequence d(m, 99);
  WindowRun far = window_links(m, d, -8 * res.k, opts.window_begin, opts.window_end, opts.max_run);
  EXPECT_EQ(far.links, res.links);

  // independent finite matching from the regeneration point
  Pos end = opts.window_end;
  for (const Link& l : res.links) end = std::max({end, l.customer + 1, l.server + 1});
  ItemSequence seq;
  seq.base_index = res.regeneration;
  for (Pos p = res.regeneration; p < end; ++p) {
    seq.customers.push_back(d.customer(p));
    seq.servers.push_back(d.server(p));
  }
  Matching fm = fcfs_match_finite(m, seq);
  std::vector<Link> in_window;
  for (const Link& l : fm.links)
    if ((l.customer >= opts.window_begin && l.customer < opts.window_end) ||
        (l.server >= opts.window_begin && l.server < opts.window_end))
      in_window.push_back(l);
  EXPECT_EQ(in_window, res.links);
}

TEST(Loynes, NegativeWindowsAndDeterminism) {
  MatchingModel m = nn();
  LoynesOptions opts;
  opts.window_begin = -50;
  opts.window_end = 50;
  LoynesResult a = loynes_window(m, 5, opts), b = loynes_window(m, 5, opts);
  EXPECT_EQ(a.links, b.links);
  EXPECT_EQ(a.k, b.k);
}

TEST(Loynes, RefusesWithoutPooling) {
  EXPECT_THROW(loynes_window(nn({0.5, 0.05, 0.45}, {0.4, 0.4, 0.2}), 5), std::domain_error);
  LoynesOptions bad;
  bad.window_end = bad.window_begin;
  EXPECT_THROW(loynes_window(nn(), 5, bad), std::invalid_argument);
}

TEST(Reversibility, SuitePassesOnNn) {
  ReversibilityReport rep = reversibility_suite(nn(), 41, 20000);
  EXPECT_EQ(rep.blocks, 20000);
  EXPECT_EQ(rep.link_checks, 20000);
  EXPECT_FALSE(rep.tests.empty());
  for (const auto& t : rep.tests) EXPECT_GT(t.p_value, 0.001) << t.name;
  EXPECT_TRUE(rep.passed());
}

TEST(Reversibility, SuitePassesOnRandomModels) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 5; ++t) {
    MatchingModel m = fcfs::testing::random_model(rng, 2, 4, true);
    ReversibilityReport rep = reversibility_suite(m, 100 + t, 5000);
    EXPECT_EQ(rep.link_checks, 5000);
    for (const auto& c : rep.tests) EXPECT_GT(c.p_value, 1e-4) << c.name;
  }
}

TEST(Reversibility, RefusesWithoutPooling) {
  EXPECT_THROW(reversibility_suite(nn({0.5, 0.05, 0.45}, {0.4, 0.4, 0.2}), 1, 10), std::domain_error);
}
