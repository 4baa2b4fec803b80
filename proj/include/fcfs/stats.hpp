#ifndef FCFS_STATS_HPP
#define FCFS_STATS_HPP

#include <string>
#include <vector>

namespace fcfs {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Renewal-reward ratio sum(Y)/sum(X) over i.i.d. cycles, with a delta-method standard error.
// The denominator moments may be shared by several numerators, so they are kept apart.
struct RatioMoments {
  double sy = 0.0, syy = 0.0, sxy = 0.0;
  void add(double y, double x) {
    sy += y;
    syy += y * y;
    sxy += x * y;
  }
};

struct DenominatorMoments {
  long n = 0;
  double sx = 0.0, sxx = 0.0;
  void add(double x) {
    ++n;
    sx += x;
    sxx += x * x;
  }
};

Estimate ratio_estimate(const RatioMoments& num, const DenominatorMoments& den);

double z_score(double analytic, const Estimate& e);

struct ChiSquareResult {
  std::string name;
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  long n = 0;
};

// Goodness of fit against `probs`. Cells with expected count below min_expected are pooled
// into one cell; zero-probability cells must be empty.
ChiSquareResult chi_square_gof(const std::string& name, const std::vector<long>& observed,
                               const std::vector<double>& probs, double min_expected = 5.0);

}  // namespace fcfs

#endif  // FCFS_STATS_HPP
