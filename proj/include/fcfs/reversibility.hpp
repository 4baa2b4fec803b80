#ifndef FCFS_REVERSIBILITY_HPP
#define FCFS_REVERSIBILITY_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcfs/fcfs_core.hpp"
#include "fcfs/stats.hpp"

namespace fcfs {

class ReversibilityError : public std::runtime_error {
 public:
  ReversibilityError(const std::string& msg, ItemSequence block)
      : std::runtime_error(msg), block(std::move(block)) {}
  ItemSequence block;
};

struct ReversibilityReport {
  std::uint64_t seed = 0;
  long blocks = 0;
  long pairs = 0;
  long link_checks = 0;  // blocks whose reversed rematch reproduced the links
  std::vector<ChiSquareResult> tests;
  bool passed(double level = 0.001) const;
};

// Perfect blocks of the pair-by-pair matching started empty at 0. Each block is exchanged,
// reversed and rematched; a link mismatch throws. The exchanged sequences of all blocks,
// concatenated, are tested for marginals alpha and beta, lag-1 independence on each line and
// independence across the lines.
ReversibilityReport reversibility_suite(const MatchingModel& model, std::uint64_t seed, long blocks);

}  // namespace fcfs

#endif  // FCFS_REVERSIBILITY_HPP
