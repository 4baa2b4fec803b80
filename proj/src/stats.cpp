#include "fcfs/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fcfs {

Estimate ratio_estimate(const RatioMoments& num, const DenominatorMoments& den) {
  Estimate e;
  if (den.n == 0 || den.sx <= 0.0) return e;
  e.value = num.sy / den.sx;
  const double r = e.value;
  double ss = num.syy - 2.0 * r * num.sxy + r * r * den.sxx;
  ss = std::max(ss, 0.0);
  double corr = den.n > 1 ? static_cast<double>(den.n) / (den.n - 1) : 1.0;
  e.se = std::sqrt(ss * corr) / den.sx;
  return e;
}

double z_score(double analytic, const Estimate& e) {
  double d = e.value - analytic;
  if (e.se > 0.0) return d / e.se;
  if (d == 0.0) return 0.0;
  return d > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

ChiSquareResult chi_square_gof(const std::string& name, const std::vector<long>& observed,
                               const std::vector<double>& probs, double min_expected) {
  if (observed.size() != probs.size()) throw std::invalid_argument("chi-square: size mismatch");
  ChiSquareResult res;
  res.name = name;
  res.n = std::accumulate(observed.begin(), observed.end(), 0L);
  const double n = static_cast<double>(res.n);
  double pooled_obs = 0.0, pooled_exp = 0.0;
  int cells = 0;
  bool impossible = false;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    double ex = n * probs[k];
    if (probs[k] <= 0.0) {
      if (observed[k] > 0) impossible = true;
      continue;
    }
    if (ex < min_expected) {
      pooled_obs += static_cast<double>(observed[k]);
      pooled_exp += ex;
      continue;
    }
    double d = static_cast<double>(observed[k]) - ex;
    res.statistic += d * d / ex;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    double d = pooled_obs - pooled_exp;
    res.statistic += d * d / pooled_exp;
    ++cells;
  }
  res.dof = cells - 1;
  if (impossible) {
    res.statistic = std::numeric_limits<double>::infinity();
    res.p_value = 0.0;
  } else if (res.dof > 0) {
    boost::math::chi_squared dist(res.dof);
    res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
  }
  return res;
}

}  // namespace fcfs
