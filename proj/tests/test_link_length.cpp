#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "fcfs/analytic.hpp"
#include "test_util.hpp"

using namespace fcfs;
using fcfs::testing::nn;

namespace {

double table_mass(const PmfTable& t) {
  double s = t.truncated;
  for (double v : t.values) s += v;
  return s;
}

}  // namespace

TEST(LinkLength, UnconditionalMassIsOne) {
  StationaryEvaluator ev(nn());
  for (int j = 0; j < 3; ++j) {
    SignedGeometricMixture mix = link_length_distribution(ev, j);
    EXPECT_NEAR(mix.total_mass(), 1.0, 1e-12);
    PmfTable t = mix.pmf_table();
    EXPECT_NEAR(table_mass(t), 1.0, 1e-12);
    EXPECT_LT(t.truncated, 1e-9);
    for (const auto& c : mix.components()) {
      EXPECT_GT(c.weight, 0.0);
      EXPECT_EQ(static_cast<int>(c.pos_ratios.size()), c.level);
      EXPECT_EQ(c.shift, 3 - c.level);
    }
  }
}

TEST(LinkLength, ConditionalMassGivesRates) {
  std::mt19937_64 rng(71);
  std::vector<MatchingModel> models{nn()};
  for (int t = 0; t < 20; ++t) models.push_back(fcfs::testing::random_model(rng, 1, 4, true));
  for (const MatchingModel& m : models) {
    StationaryEvaluator ev(m);
    RateMatrix r = matching_rates(ev);
    for (auto [i, j] : m.edges()) {
      SignedGeometricMixture mix = link_length_distribution(ev, j, i);
      EXPECT_NEAR(mix.total_mass() * m.beta(j), r.at(i, j), 1e-10);
      EXPECT_NEAR(mix.normalized().total_mass(), 1.0, 1e-12);
    }
    // the conditional laws mix back into the unconditional one
    for (int j = 0; j < m.num_servers(); ++j) {
      PmfTable all = link_length_distribution(ev, j).pmf_table();
      std::vector<PmfTable> parts;
      for (int i = 0; i < m.num_customers(); ++i)
        if (m.compatible(i, j)) parts.push_back(link_length_distribution(ev, j, i).pmf_table());
      for (long k = all.lo; k < all.lo + static_cast<long>(all.values.size()); ++k) {
        double s = 0.0;
        for (const PmfTable& p : parts) s += p.at(k);
        EXPECT_NEAR(s, all.at(k), 1e-12);
      }
    }
  }
}

TEST(LinkLength, IncompatiblePairRejected) {
  StationaryEvaluator ev(nn());
  EXPECT_THROW(link_length_distribution(ev, 0, 0), std::invalid_argument);
  EXPECT_THROW(pgf_eval(ev, 0, 0, 0.5), std::invalid_argument);
  EXPECT_THROW(link_length_distribution(ev, 5), std::invalid_argument);
}

TEST(LinkLength, RefusedWithoutPooling) {
  StationaryEvaluator ev(nn({0.5, 0.1, 0.4}, {0.3, 0.5, 0.2}));
  EXPECT_THROW(link_length_distribution(ev, 0), std::domain_error);
  EXPECT_THROW(pgf_eval(ev, 0, std::nullopt, 0.5), std::domain_error);
}

TEST(LinkLength, PgfAgreesWithMixture) {
  std::mt19937_64 rng(73);
  std::vector<MatchingModel> models{nn()};
  for (int t = 0; t < 10; ++t) models.push_back(fcfs::testing::random_model(rng, 2, 4, true));
  for (const MatchingModel& m : models) {
    StationaryEvaluator ev(m);
    for (int j = 0; j < m.num_servers(); ++j) {
      SignedGeometricMixture mix = link_length_distribution(ev, j);
      for (double z : {0.5, 0.9, 1.0}) {
        std::complex<double> a, b;
        try {
          a = pgf_eval(ev, j, std::nullopt, z);
        } catch (const std::domain_error&) {
          EXPECT_THROW(mix.pgf(z), std::domain_error);  // outside the annulus of this model
          continue;
        }
        b = mix.pgf(z);
        EXPECT_NEAR(std::abs(a - b), 0.0, 1e-9) << z;
      }
      EXPECT_NEAR(std::abs(pgf_eval(ev, j, std::nullopt, 1.0) - 1.0), 0.0, 1e-10);
      for (int i = 0; i < m.num_customers(); ++i) {
        if (!m.compatible(i, j)) continue;
        SignedGeometricMixture cm = link_length_distribution(ev, j, i).normalized();
        EXPECT_NEAR(std::abs(pgf_eval(ev, j, i, 1.0) - 1.0), 0.0, 1e-10);
        for (double z : {0.9, 0.97, 1.02}) {
          try {
            EXPECT_NEAR(std::abs(pgf_eval(ev, j, i, z) - cm.pgf(z)), 0.0, 1e-9) << z;
          } catch (const std::domain_error&) {
            EXPECT_THROW(cm.pgf(z), std::domain_error);  // both paths agree on the annulus
          }
        }
      }
    }
  }
}

TEST(LinkLength, PgfMatchesPmfSeries) {
  StationaryEvaluator ev(nn());
  for (int j = 0; j < 3; ++j) {
    // the negative tail is weighted by z^k, so truncate far below the default
    PmfTable t = link_length_distribution(ev, j).pmf_table(1e-40);
    for (std::complex<double> z : {std::complex<double>(0.9, 0.0), std::complex<double>(0.95, 0.2),
                                   std::polar(1.0, 0.7), std::complex<double>(1.05, -0.1)}) {
      std::complex<double> series = 0.0;
      for (long k = t.lo; k < t.lo + static_cast<long>(t.values.size()); ++k) series += t.at(k) * std::pow(z, k);
      EXPECT_NEAR(std::abs(series - pgf_eval(ev, j, std::nullopt, z)), 0.0, 1e-9) << z;
    }
  }
}

TEST(LinkLength, DerivativeAtOneIsTheMean) {
  StationaryEvaluator ev(nn());
  for (int j = 0; j < 3; ++j) {
    SignedGeometricMixture mix = link_length_distribution(ev, j);
    const double h = 1e-6;
    const double d = (pgf_eval(ev, j, std::nullopt, 1.0 + h) - pgf_eval(ev, j, std::nullopt, 1.0 - h)).real() / (2 * h);
    EXPECT_NEAR(d, mix.mean(), 1e-6);
    PmfTable t = mix.pmf_table();
    double mean = 0.0;
    for (long k = t.lo; k < t.lo + static_cast<long>(t.values.size()); ++k) mean += k * t.at(k);
    EXPECT_NEAR(mean, mix.mean(), 1e-9);
  }
}

TEST(LinkLength, AnnulusViolationsThrow) {
  StationaryEvaluator ev(nn());
  EXPECT_THROW(pgf_eval(ev, 0, std::nullopt, 0.0), std::domain_error);
  EXPECT_THROW(pgf_eval(ev, 0, std::nullopt, 100.0), std::domain_error);
  EXPECT_THROW(pgf_eval(ev, 0, std::nullopt, 1e-3), std::domain_error);
  // two-sided law: on NN the negative side needs |z| > 0.75 for s1, 0.8 for s2 and s3
  for (int j = 0; j < 3; ++j) EXPECT_THROW(pgf_eval(ev, j, std::nullopt, 0.5), std::domain_error);
  EXPECT_THROW(pgf_eval(ev, 0, std::nullopt, 0.74), std::domain_error);
  EXPECT_NO_THROW(pgf_eval(ev, 0, std::nullopt, 0.76));
  EXPECT_THROW(pgf_eval(ev, 0, std::nullopt, 1.21), std::domain_error);
  EXPECT_NO_THROW(pgf_eval(ev, 0, std::nullopt, 1.19));
  EXPECT_THROW(link_length_distribution(ev, 0).pgf(100.0), std::domain_error);
}

TEST(LinkLength, PrintedFormDiffersWhereCustomersShareLevels) {
  StationaryEvaluator ev(nn());
  // (c1, s2): c2 also takes s2, so renormalizing per level changes the law
  SignedGeometricMixture derived = link_length_distribution(ev, 1, 0, ConditionalForm::Derived).normalized();
  SignedGeometricMixture printed = link_length_distribution(ev, 1, 0, ConditionalForm::Printed).normalized();
  EXPECT_GT(std::abs(derived.mean() - printed.mean()), 1e-3);
  // (c2, s1) and (c1, s3): no other compatible customer shares the levels, the forms coincide
  for (auto [i, j] : {std::pair{1, 0}, std::pair{0, 2}}) {
    SignedGeometricMixture a = link_length_distribution(ev, j, i, ConditionalForm::Derived).normalized();
    SignedGeometricMixture b = link_length_distribution(ev, j, i, ConditionalForm::Printed).normalized();
    EXPECT_NEAR(a.mean(), b.mean(), 1e-12);
    EXPECT_NEAR(std::abs(a.pgf(0.95) - b.pgf(0.95)), 0.0, 1e-12);
  }
}

TEST(LinkLength, SingleEdgeLinksHaveLengthZero) {
  StationaryEvaluator ev(validate_model({{{"c1", 1.0}}, {{"s1", 1.0}}, {{"c1", "s1"}}}));
  PmfTable t = link_length_distribution(ev, 0).pmf_table();
  EXPECT_NEAR(t.at(0), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(pgf_eval(ev, 0, std::nullopt, 0.3) - 1.0), 0.0, 1e-15);
}
