#ifndef FCFS_ANALYTIC_HPP
#define FCFS_ANALYTIC_HPP

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fcfs/augmented.hpp"
#include "fcfs/chains.hpp"
#include "fcfs/model.hpp"

namespace fcfs {

class PermutationCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvaluatorOptions {
  int threads = 0;     // 0: hardware concurrency
  int perm_cap = 10;   // refuse models with more types on either side
};

struct NormalizingConstant {
  bool finite = false;        // false when resource pooling fails and the sums diverge
  double B = 0.0;
  double Bs = 0.0;            // B times the product of all beta
  double server_form = 0.0;   // 1/B from server permutations
  double customer_form = 0.0; // 1/B from customer permutations
};

NormalizingConstant normalizing_constant(const MatchingModel& model, const EvaluatorOptions& opts = {});

// Per-permutation aggregates. Index k-1 holds level k = 1..J.
struct PermutationContext {
  std::vector<int> perm;
  std::vector<TypeMask> prefix;   // {S_1..S_k}
  std::vector<TypeMask> unique;   // U(prefix)
  std::vector<double> alpha;      // alpha_(k)
  std::vector<double> beta;       // beta_(k)
};

PermutationContext make_context(const MatchingModel& model, const std::vector<int>& perm);

// Split of the unique customers at each level relative to a focal pair (c_i, s_j):
// phi = c_i itself (zero unless compatible with s_j), psi = other customers s_j can take,
// chi = customers s_j skips. 0/0 = 0.
struct FocalSplit {
  std::vector<double> phi, psi, chi;
};

FocalSplit focal_split(const MatchingModel& model, const PermutationContext& ctx, int i, int j);

class StationaryEvaluator {
 public:
  explicit StationaryEvaluator(MatchingModel model, EvaluatorOptions opts = {});

  const MatchingModel& model() const { return model_; }
  const EvaluatorOptions& options() const { return opts_; }
  const NormalizingConstant& constant() const { return nc_; }
  bool finite() const { return nc_.finite; }
  double B() const { return nc_.B; }
  double Bs() const { return nc_.Bs; }

  // pi_R for one permutation: Bs / prod_{k<J} (beta_(k) - alpha_(k)).
  double pi_R(const PermutationContext& ctx) const;

 private:
  MatchingModel model_;
  EvaluatorOptions opts_;
  NormalizingConstant nc_;
};

// Product-form law of Zs, Zc, D, E and the augmented words. Throws std::invalid_argument
// on an invalid state and std::domain_error when B diverges.
double pi_detailed(const StationaryEvaluator& ev, ChainKind kind, const ChainState& state);

// Laws of the natural chains Qs, Qc and O. Unreachable O states get 0.
double pi_natural(const StationaryEvaluator& ev, ChainKind kind, const ChainState& state);

double pi_marginal(const StationaryEvaluator& ev, const MarginalValue& value);
// X or Y given R, as a product of geometric probabilities.
double pi_conditional_on_R(const StationaryEvaluator& ev, const MarginalValue& value);

struct RateMatrix {
  int customers = 0;
  int servers = 0;
  std::vector<double> r;  // row-major, customers x servers
  double at(int i, int j) const { return r[static_cast<std::size_t>(i) * servers + j]; }
};

RateMatrix matching_rates(const StationaryEvaluator& ev);

// Conditional link-length law given the customer type. Derived uses the exact path
// probabilities (its mass is r_ij / beta_j); Printed renormalizes every level by the
// probability of not meeting another compatible customer.
enum class ConditionalForm { Derived, Printed };

struct MixtureComponent {
  double weight = 0.0;
  std::vector<double> pos_ratios;  // G_1..G_l, P(G = r) = (1 - p) p^r
  std::vector<double> neg_ratios;  // H_l..H_J
  int shift = 0;                   // L = sum G - shift - sum H
  std::vector<int> perm;
  int level = 0;
};

struct PmfTable {
  long lo = 0;                 // value of values[0]
  std::vector<double> values;  // unnormalized, same scale as the weights
  double truncated = 0.0;      // mass dropped by truncating the geometric tails
  double at(long k) const {
    if (k < lo || k >= lo + static_cast<long>(values.size())) return 0.0;
    return values[static_cast<std::size_t>(k - lo)];
  }
};

class SignedGeometricMixture {
 public:
  SignedGeometricMixture() = default;
  explicit SignedGeometricMixture(std::vector<MixtureComponent> comps) : comps_(std::move(comps)) {}

  const std::vector<MixtureComponent>& components() const { return comps_; }
  double total_mass() const;
  SignedGeometricMixture normalized() const;

  // Truncates each geometric term once its tail drops below `tail`.
  PmfTable pmf_table(double tail = 1e-13) const;
  double pmf(long k) const { return pmf_table().at(k); }
  std::complex<double> pgf(std::complex<double> z) const;
  double mean() const;  // of the normalized law

 private:
  std::vector<MixtureComponent> comps_;
};

inline constexpr int kMixtureCap = 8;

SignedGeometricMixture link_length_distribution(const StationaryEvaluator& ev, int server,
                                                std::optional<int> customer = std::nullopt,
                                                ConditionalForm form = ConditionalForm::Derived);

// Generating function E[Z^L] evaluated straight from the per-permutation product formula.
// The conditional version is normalized to a probability law. Throws std::domain_error
// outside the convergence annulus.
std::complex<double> pgf_eval(const StationaryEvaluator& ev, int server, std::optional<int> customer,
                              std::complex<double> z, ConditionalForm form = ConditionalForm::Derived);

}  // namespace fcfs

#endif  // FCFS_ANALYTIC_HPP
