#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>

#include "fcfs/analytic.hpp"
#include "fcfs/augmented.hpp"
#include "fcfs/exact.hpp"
#include "test_util.hpp"

using namespace fcfs;
using fcfs::testing::nn;

namespace {

double nn_closed_form_B(const std::vector<double>& a, const std::vector<double>& b) {
  return (a[0] - b[2]) * (b[0] - a[2]) * (1.0 - a[0] - b[0]) / (a[0] * a[1] * b[0] * b[1]);
}

std::vector<std::vector<int>> permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

MarginalValue marginal(MarginalKind k, std::vector<int> perm) {
  MarginalValue v;
  v.kind = k;
  v.perm = std::move(perm);
  return v;
}

}  // namespace

TEST(Analytic, NnNormalizingConstant) {
  NormalizingConstant nc = normalizing_constant(nn());
  ASSERT_TRUE(nc.finite);
  EXPECT_NEAR(nc.B, 0.25, 1e-12);
  EXPECT_NEAR(nc.B, nn_closed_form_B({0.5, 0.3, 0.2}, {0.4, 0.4, 0.2}), 1e-12);
  EXPECT_NEAR(1.0 / nc.server_form, 0.25, 1e-12);
  EXPECT_NEAR(1.0 / nc.customer_form, 0.25, 1e-12);
  EXPECT_NEAR(nc.Bs, 0.25 * 0.4 * 0.4 * 0.2, 1e-14);
}

TEST(Analytic, NnClosedFormOverTheStableRegion) {
  std::mt19937_64 rng(31);
  int checked = 0;
  while (checked < 200) {
    auto a = fcfs::testing::random_simplex(rng, 3), b = fcfs::testing::random_simplex(rng, 3);
    MatchingModel m = nn(a, b);
    if (!check_crp(m).holds) continue;
    EXPECT_NEAR(normalizing_constant(m).B / nn_closed_form_B(a, b), 1.0, 1e-10);
    ++checked;
  }
}

TEST(Analytic, SingleEdgeConstantIsOne) {
  MatchingModel m = validate_model({{{"c1", 1.0}}, {{"s1", 1.0}}, {{"c1", "s1"}}});
  NormalizingConstant nc = normalizing_constant(m);
  EXPECT_TRUE(nc.finite);
  EXPECT_DOUBLE_EQ(nc.B, 1.0);
}

TEST(Analytic, DualFormsAgreeOnRandomModels) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 100; ++t) {
    MatchingModel m = fcfs::testing::random_model(rng, 1, 5, true);
    NormalizingConstant nc = normalizing_constant(m);
    ASSERT_TRUE(nc.finite);
    EXPECT_LE(std::abs(nc.server_form - nc.customer_form), 1e-10 * nc.server_form);
    NormalizingConstant mirror = normalizing_constant(m.mirrored());
    EXPECT_NEAR(mirror.B / nc.B, 1.0, 1e-10);
  }
}

TEST(Analytic, ExactRationalForms) {
  std::mt19937_64 rng(41);
  std::vector<MatchingModel> models{nn()};
  for (int t = 0; t < 30; ++t) models.push_back(fcfs::testing::random_model(rng, 1, 4, true));
  for (const MatchingModel& m : models) {
    ExactConstant ex = exact_normalizing_constant(m);
    ASSERT_TRUE(ex.finite);
    EXPECT_EQ(ex.server_form, ex.customer_form);
    EXPECT_NEAR(static_cast<double>(ex.B) / normalizing_constant(m).B, 1.0, 1e-13);
  }
  EXPECT_NEAR(static_cast<double>(exact_normalizing_constant(nn()).B), 0.25, 1e-15);
  EXPECT_FALSE(exact_normalizing_constant(nn({0.5, 0.1, 0.4}, {0.3, 0.5, 0.2})).finite);
}

TEST(Analytic, ExactModeRefusesLargeModels) {
  std::mt19937_64 rng(43);
  MatchingModel m = fcfs::testing::random_model(rng, 5, 5, false);
  EXPECT_THROW(exact_normalizing_constant(m), PermutationCapError);
}

TEST(Analytic, PermutationCapAndThreads) {
  RawModel r;
  r.customers = {{"c1", 1.0}};
  for (int j = 0; j < 11; ++j) {
    r.servers.push_back({"s" + std::to_string(j), 1.0 / 11});
    r.edges.push_back({"c1", "s" + std::to_string(j)});
  }
  double acc = 0.0;
  for (int j = 0; j < 10; ++j) acc += r.servers[j].second;
  r.servers[10].second = 1.0 - acc;
  MatchingModel big = validate_model(r);
  EXPECT_THROW(normalizing_constant(big), PermutationCapError);
  EXPECT_THROW(StationaryEvaluator ev(big), PermutationCapError);

  std::mt19937_64 rng(47);
  MatchingModel m = fcfs::testing::random_model(rng, 8, 8, true);
  NormalizingConstant one = normalizing_constant(m, {1, 10});
  NormalizingConstant four = normalizing_constant(m, {4, 10});
  EXPECT_EQ(one.B, four.B);
}

TEST(Analytic, FiniteIffResourcePooling) {
  for (double d : {-1e-2, -1e-6, 1e-6, 1e-2}) {
    // alpha3 = beta1 + d
    MatchingModel m = nn({0.5, 0.1 - d, 0.4 + d}, {0.4, 0.4, 0.2});
    EXPECT_EQ(check_crp(m).holds, d < 0);
    EXPECT_EQ(normalizing_constant(m).finite, d < 0) << d;
  }
  std::mt19937_64 rng(53);
  for (int t = 0; t < 300; ++t) {
    MatchingModel m = fcfs::testing::random_model(rng, 1, 5, false);
    EXPECT_EQ(normalizing_constant(m).finite, check_crp(m).holds);
  }
}

TEST(Analytic, LawsRefusedWithoutPooling) {
  StationaryEvaluator ev(nn({0.5, 0.1, 0.4}, {0.3, 0.5, 0.2}));
  EXPECT_FALSE(ev.finite());
  EXPECT_THROW(pi_detailed(ev, ChainKind::Zs, {}), std::domain_error);
  EXPECT_THROW(pi_natural(ev, ChainKind::Qs, {}), std::domain_error);
  EXPECT_THROW(matching_rates(ev), std::domain_error);
}

TEST(Analytic, DetailedSpotValues) {
  StationaryEvaluator ev(nn());
  EXPECT_NEAR(pi_detailed(ev, ChainKind::Zs, {}), 0.25, 1e-15);
  EXPECT_NEAR(pi_detailed(ev, ChainKind::Zs, {{cust(0), xserv(0)}, {}}), 0.05, 1e-15);
  EXPECT_NEAR(pi_detailed(ev, ChainKind::Zc, {{serv(0), xcust(0)}, {}}), 0.05, 1e-15);
  EXPECT_THROW(pi_detailed(ev, ChainKind::Zs, {{cust(0), xserv(1)}, {}}), std::invalid_argument);
}

TEST(Analytic, NaturalSpotValues) {
  StationaryEvaluator ev(nn());
  const double B = ev.B();
  const double a1 = 0.5, a2 = 0.3, a3 = 0.2, b1 = 0.4, b2 = 0.4, b3 = 0.2;
  using fcfs::testing::customer_word;
  using fcfs::testing::server_word;
  EXPECT_NEAR(pi_natural(ev, ChainKind::Qs, {customer_word({0, 0, 0, 0}), {}}), 0.04822530864197531, 1e-12);
  EXPECT_NEAR(pi_natural(ev, ChainKind::Qs, {customer_word({0, 0, 0, 0}), {}}),
              B * b1 * std::pow(a1 / (b2 + b3), 4), 1e-15);
  EXPECT_NEAR(pi_natural(ev, ChainKind::Qs, {}), 0.25, 1e-15);
  EXPECT_NEAR(pi_natural(ev, ChainKind::Qs, {customer_word({2, 2, 2, 2, 2}), {}}),
              B * (1 - b1) * std::pow(a3 / b1, 5), 1e-15);
  EXPECT_NEAR(pi_natural(ev, ChainKind::Qc, {server_word({2, 2, 2, 1, 2, 1}), {}}),
              B * a3 * std::pow(b3 / a1, 3) * std::pow(b2 / (a1 + a2), 2) * b3 / (a1 + a2), 1e-15);
  EXPECT_NEAR(pi_natural(ev, ChainKind::O, {customer_word({2, 2, 1, 2, 1, 2}), server_word({2, 2, 2, 2, 2, 2})}),
              B * std::pow(a3 / b1, 2) * std::pow(a2 / (b1 + b2), 2) * std::pow(a3 / (b1 + b2), 2) *
                  std::pow(b3 / a1, 6),
              1e-15);
  // compatible unmatched items cannot coexist
  EXPECT_EQ(pi_natural(ev, ChainKind::O, {customer_word({0}), server_word({1})}), 0.0);
}

TEST(Analytic, NaturalLawsAreSumsOfDetailedLaws) {
  std::mt19937_64 rng(59);
  std::vector<MatchingModel> models{nn()};
  for (int t = 0; t < 10; ++t) models.push_back(fcfs::testing::random_model(rng, 2, 4, true));
  long checked = 0, skipped = 0;
  // states whose skip runs decay too slowly for the truncation are counted, not compared
  auto compare = [&](const fcfs::testing::RunSum& r, double want, const std::string& what) {
    if (r.tail_bound > 1e-12) {
      ++skipped;
      return;
    }
    ++checked;
    EXPECT_NEAR(r.value, want, 1e-12) << what;
  };
  for (const MatchingModel& m : models) {
    StationaryEvaluator ev(m);
    for (const ChainState& q : enumerate_states(m, ChainKind::Qs, 4)) {
      std::vector<int> w;
      for (Symbol s : q.first) w.push_back(s.type);
      compare(fcfs::testing::qs_by_detailed_sum(ev, w, 300), pi_natural(ev, ChainKind::Qs, q),
              format_state(m, ChainKind::Qs, q));
    }
    for (const ChainState& q : enumerate_states(m, ChainKind::Qc, 4)) {
      std::vector<int> w;
      for (Symbol s : q.first) w.push_back(s.type);
      compare(fcfs::testing::qc_by_detailed_sum(ev, w, 300), pi_natural(ev, ChainKind::Qc, q),
              format_state(m, ChainKind::Qc, q));
    }
    for (const ChainState& o : enumerate_states(m, ChainKind::O, 4)) {
      std::vector<int> c, s;
      for (Symbol x : o.first) c.push_back(x.type);
      for (Symbol x : o.second) s.push_back(x.type);
      compare(fcfs::testing::o_by_detailed_sum(ev, c, s, 300), pi_natural(ev, ChainKind::O, o),
              format_state(m, ChainKind::O, o));
    }
  }
  EXPECT_GT(checked, 20 * skipped);
  EXPECT_GT(checked, 1000);
}

TEST(Analytic, RunSumsMatchEnumeratedDetailedStates) {
  // the run-length sums agree with pi_Zs and pi_D summed over explicitly enumerated words
  MatchingModel m = nn();
  StationaryEvaluator ev(m);
  const int L = 7;
  std::map<ChainState, double> qs, o;
  for (const ChainState& z : enumerate_states(m, ChainKind::Zs, L))
    qs[natural_projection(ChainKind::Zs, z)] += pi_detailed(ev, ChainKind::Zs, z);
  for (const ChainState& d : enumerate_states(m, ChainKind::D, L))
    o[natural_projection(ChainKind::D, d)] += pi_detailed(ev, ChainKind::D, d);
  for (const auto& [q, v] : qs) {
    std::vector<int> w;
    for (Symbol s : q.first) w.push_back(s.type);
    const int appended = L - static_cast<int>(w.size());
    EXPECT_NEAR(fcfs::testing::qs_by_detailed_sum(ev, w, appended).value, v, 1e-15);
  }
  for (const auto& [st, v] : o) {
    std::vector<int> c, s;
    for (Symbol x : st.first) c.push_back(x.type);
    for (Symbol x : st.second) s.push_back(x.type);
    const int appended = L - static_cast<int>(c.size() + s.size());
    EXPECT_NEAR(fcfs::testing::o_by_detailed_sum(ev, c, s, appended).value, v, 1e-15);
  }
  EXPECT_GT(qs.size(), 10u);
  EXPECT_GT(o.size(), 5u);
}

TEST(Analytic, PiRSumsToOne) {
  std::mt19937_64 rng(61);
  std::vector<MatchingModel> models{nn()};
  for (int t = 0; t < 20; ++t) models.push_back(fcfs::testing::random_model(rng, 1, 5, true));
  for (const MatchingModel& m : models) {
    StationaryEvaluator ev(m);
    double total = 0.0;
    for (const auto& p : permutations(m.num_servers())) total += pi_marginal(ev, marginal(MarginalKind::R, p));
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(Analytic, ConditionalXGivenR) {
  StationaryEvaluator ev(nn());
  MarginalValue x = marginal(MarginalKind::X, {0, 1, 2});
  x.n = {0, 0};
  EXPECT_NEAR(pi_conditional_on_R(ev, x), 0.1875, 1e-15);
  x.n = {2, 1};
  EXPECT_NEAR(pi_conditional_on_R(ev, x), pi_marginal(ev, x) / pi_marginal(ev, marginal(MarginalKind::R, {0, 1, 2})),
              1e-15);
  MarginalValue y = marginal(MarginalKind::Y, {1, 0, 2});
  y.m = {3, 0};
  EXPECT_NEAR(pi_conditional_on_R(ev, y), pi_marginal(ev, y) / pi_marginal(ev, marginal(MarginalKind::R, {1, 0, 2})),
              1e-15);
  MarginalValue bad = marginal(MarginalKind::X, {0, 1, 2});
  bad.n = {1};
  EXPECT_THROW(pi_marginal(ev, bad), std::invalid_argument);
  bad = marginal(MarginalKind::R, {0, 0, 2});
  EXPECT_THROW(pi_marginal(ev, bad), std::invalid_argument);
}

TEST(Analytic, AugmentedWordsSumToW) {
  // pi_W(pattern) is the augmented law summed over the types filling each slot
  MatchingModel m = nn();
  StationaryEvaluator ev(m);
  for (const auto& perm : permutations(3)) {
    for (int mask = 0; mask < 64; ++mask) {
      // two levels, up to three slots each; bits 0-1 and 2-3 choose lengths, 4-5 the kinds
      std::vector<std::vector<bool>> pattern(2);
      pattern[0].assign(mask & 1 ? 1 : 0, (mask >> 4) & 1);
      pattern[1].assign((mask >> 2) & 3, (mask >> 5) & 1);
      MarginalValue w = marginal(MarginalKind::W, perm);
      w.pattern = pattern;
      PermutationContext ctx = make_context(m, perm);
      // fill the slots with every admissible type
      double total = 0.0;
      Word word{xserv(perm[0])};
      std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t l, std::size_t k) {
        if (l == 2) {
          word.push_back(xserv(perm[2]));
          if (is_valid_state(m, ChainKind::ZsAugmented, {word, {}})) {
            // a filled slot may move a last occurrence; keep words that decompose as intended
            MarginalValue got = project(MarginalKind::W, to_augmented(m, word));
            if (got.perm == perm && got.pattern == pattern) total += pi_detailed(ev, ChainKind::ZsAugmented, {word, {}});
          }
          word.pop_back();
          return;
        }
        if (k == pattern[l].size()) {
          if (l == 0) word.push_back(xserv(perm[1]));
          fill(l + 1, 0);
          if (l == 0) word.pop_back();
          return;
        }
        if (pattern[l][k]) {
          for (int j = 0; j < 3; ++j) {
            word.push_back(xserv(j));
            fill(l, k + 1);
            word.pop_back();
          }
        } else {
          for (int i = 0; i < 3; ++i) {
            word.push_back(cust(i));
            fill(l, k + 1);
            word.pop_back();
          }
        }
      };
      fill(0, 0);
      EXPECT_NEAR(total, pi_marginal(ev, w), 1e-15);
    }
  }
}

TEST(Analytic, MarginalSummationChain) {
  StationaryEvaluator ev(nn());
  const int N = 200;
  for (const auto& perm : permutations(3)) {
    const double piR = pi_marginal(ev, marginal(MarginalKind::R, perm));
    // W -> U: sum over the orders of n customer and m server slots
    for (int n0 = 0; n0 <= 2; ++n0)
      for (int m0 = 0; m0 <= 2; ++m0) {
        MarginalValue u = marginal(MarginalKind::U, perm);
        u.n = {n0, 1};
        u.m = {m0, 0};
        double total = 0.0;
        const int len = n0 + m0;
        for (int bits = 0; bits < (1 << len); ++bits) {
          if (__builtin_popcount(bits) != m0) continue;
          MarginalValue w = marginal(MarginalKind::W, perm);
          std::vector<bool> p;
          for (int k = 0; k < len; ++k) p.push_back((bits >> k) & 1);
          w.pattern = {p, {false}};
          total += pi_marginal(ev, w);
        }
        EXPECT_NEAR(total, pi_marginal(ev, u), 1e-15);
      }
    // U -> X and U -> Y, truncated
    for (int n0 = 0; n0 <= 3; ++n0)
      for (int n1 = 0; n1 <= 3; ++n1) {
        MarginalValue x = marginal(MarginalKind::X, perm);
        x.n = {n0, n1};
        MarginalValue y = marginal(MarginalKind::Y, perm);
        y.m = {n0, n1};
        double sx = 0.0, sy = 0.0;
        for (int m0 = 0; m0 <= N; ++m0)
          for (int m1 = 0; m1 <= N - m0; ++m1) {
            MarginalValue u = marginal(MarginalKind::U, perm);
            u.n = {n0, n1};
            u.m = {m0, m1};
            sx += pi_marginal(ev, u);
            u.n = {m0, m1};
            u.m = {n0, n1};
            sy += pi_marginal(ev, u);
          }
        EXPECT_NEAR(sx, pi_marginal(ev, x), 1e-12);
        EXPECT_NEAR(sy, pi_marginal(ev, y), 1e-12);
      }
    // U -> V exactly, V -> R truncated
    double sr = 0.0;
    for (int r0 = 0; r0 <= 2 * N; ++r0)
      for (int r1 = 0; r1 <= 2 * N - r0; ++r1) {
        MarginalValue v = marginal(MarginalKind::V, perm);
        v.r = {r0, r1};
        const double pv = pi_marginal(ev, v);
        sr += pv;
        if (r0 <= 3 && r1 <= 3) {
          double su = 0.0;
          for (int a = 0; a <= r0; ++a)
            for (int b = 0; b <= r1; ++b) {
              MarginalValue u = marginal(MarginalKind::U, perm);
              u.n = {a, b};
              u.m = {r0 - a, r1 - b};
              su += pi_marginal(ev, u);
            }
          EXPECT_NEAR(su, pv, 1e-15);
        }
      }
    EXPECT_NEAR(sr, piR, 1e-12);
  }
}

TEST(Analytic, RateMarginals) {
  std::mt19937_64 rng(67);
  std::vector<MatchingModel> models{nn()};
  for (int t = 0; t < 30; ++t) models.push_back(fcfs::testing::random_model(rng, 1, 5, true));
  for (const MatchingModel& m : models) {
    RateMatrix r = matching_rates(StationaryEvaluator(m));
    double total = 0.0;
    for (int i = 0; i < m.num_customers(); ++i) {
      double row = 0.0;
      for (int j = 0; j < m.num_servers(); ++j) {
        EXPECT_GE(r.at(i, j), 0.0);
        if (!m.compatible(i, j)) {
          EXPECT_EQ(r.at(i, j), 0.0);
        }
        row += r.at(i, j);
      }
      EXPECT_NEAR(row, m.alpha(i), 1e-10);
      total += row;
    }
    for (int j = 0; j < m.num_servers(); ++j) {
      double col = 0.0;
      for (int i = 0; i < m.num_customers(); ++i) col += r.at(i, j);
      EXPECT_NEAR(col, m.beta(j), 1e-10);
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(Analytic, NnRates) {
  RateMatrix r = matching_rates(StationaryEvaluator(nn()));
  EXPECT_EQ(r.at(0, 0), 0.0);
  // NN is a path graph, so the marginals pin every rate
  EXPECT_NEAR(r.at(2, 0), 0.2, 1e-12);
  EXPECT_NEAR(r.at(1, 0), 0.2, 1e-12);
  EXPECT_NEAR(r.at(1, 1), 0.1, 1e-12);
  EXPECT_NEAR(r.at(0, 1), 0.3, 1e-12);
  EXPECT_NEAR(r.at(0, 2), 0.2, 1e-12);
}
