#include "fcfs/exact.hpp"

#include "fcfs/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace fcfs {

namespace {

Rational to_rational(double x) {
  int e = 0;
  double f = std::frexp(x, &e);
  // 53 significant bits
  auto mant = static_cast<long long>(std::ldexp(f, 53));
  Rational r(mant);
  e -= 53;
  Rational p2(boost::multiprecision::cpp_int(1) << std::abs(e));
  if (e >= 0) return Rational(r * p2);
  return Rational(r / p2);
}

// Binary values of the probabilities; the largest one absorbs the residual so the side sums to 1.
std::vector<Rational> exact_side(const std::vector<double>& probs) {
  std::vector<Rational> out;
  for (double x : probs) out.push_back(to_rational(x));
  const auto big = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  Rational others = 0;
  for (std::size_t k = 0; k < out.size(); ++k)
    if (k != big) others += out[k];
  out[big] = 1 - others;
  return out;
}

Rational mass(const std::vector<Rational>& w, TypeMask m) {
  Rational s = 0;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (has(m, static_cast<int>(k))) s += w[k];
  return s;
}

}  // namespace

ExactConstant exact_normalizing_constant(const MatchingModel& model) {
  const int I = model.num_customers();
  const int J = model.num_servers();
  if (I > kExactCap || J > kExactCap)
    throw PermutationCapError("exact mode supports at most " + std::to_string(kExactCap) + " types per side");
  std::vector<Rational> a = exact_side(model.alphas()), b = exact_side(model.betas());

  ExactConstant out;
  bool ok = true;

  std::vector<int> perm(J);
  std::iota(perm.begin(), perm.end(), 0);
  Rational sum = 0;
  do {
    Rational term = 1;
    TypeMask prefix = 0;
    for (int l = 0; l + 1 < J; ++l) {
      prefix |= bit(perm[l]);
      Rational d = mass(b, prefix) - mass(a, model.unique_customers(prefix));
      if (d <= 0) ok = false;
      else term /= d;
    }
    sum += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  Rational prod = 1;
  for (const auto& x : b) prod *= x;
  out.server_form = prod * sum;

  std::vector<int> cperm(I);
  std::iota(cperm.begin(), cperm.end(), 0);
  sum = 0;
  do {
    Rational term = 1;
    TypeMask prefix = 0;
    for (int l = 0; l + 1 < I; ++l) {
      prefix |= bit(cperm[l]);
      Rational d = mass(b, model.servers_of(prefix)) - mass(a, prefix);
      if (d <= 0) ok = false;
      else term /= d;
    }
    sum += term;
  } while (std::next_permutation(cperm.begin(), cperm.end()));
  prod = 1;
  for (const auto& x : a) prod *= x;
  out.customer_form = prod * sum;

  out.finite = ok;
  if (ok) out.B = 1 / out.server_form;
  return out;
}

}  // namespace fcfs
