#ifndef FCFS_EXACT_HPP
#define FCFS_EXACT_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include "fcfs/model.hpp"

namespace fcfs {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr int kExactCap = 4;

struct ExactConstant {
  bool finite = false;
  Rational server_form;    // 1/B, server permutations
  Rational customer_form;  // 1/B, customer permutations
  Rational B;
};

// Probabilities are taken at their exact binary values, except that the largest on each side is
// replaced by one minus the others. Throws PermutationCapError above kExactCap types per side.
ExactConstant exact_normalizing_constant(const MatchingModel& model);

}  // namespace fcfs

#endif  // FCFS_EXACT_HPP
