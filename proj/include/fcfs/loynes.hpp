#ifndef FCFS_LOYNES_HPP
#define FCFS_LOYNES_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fcfs/fcfs_core.hpp"
#include "fcfs/rng.hpp"

namespace fcfs {

struct LoynesOptions {
  Pos window_begin = 0;
  Pos window_end = 100;  // exclusive
  Pos k0 = 64;
  int max_doublings = 24;
  Pos max_run = Pos{1} << 32;  // pairs processed past the window before giving up
};

struct LoynesResult {
  std::vector<Link> links;  // every link with an end in the window, sorted
  Pos k = 0;                // start of the accepted run is -k
  Pos regeneration = 0;     // last empty-state cut in (-k, window_begin]
  int doublings = 0;
};

class LoynesError : public std::runtime_error {
 public:
  LoynesError(const std::string& msg, std::vector<Link> previous, std::vector<Link> last)
      : std::runtime_error(msg), previous(std::move(previous)), last(std::move(last)) {}
  std::vector<Link> previous;
  std::vector<Link> last;
};

struct WindowRun {
  std::vector<Link> links;
  bool regenerated = false;
  Pos regeneration = 0;
};

// Pair-by-pair matching started empty at `start`, run until every item in the window is linked.
WindowRun window_links(const MatchingModel& model, const DrivingSequence& seq, Pos start, Pos window_begin,
                       Pos window_end, Pos max_run);

// Backward coupling: starts at -k0, -2k0, ... on the same driving sequences until the window links
// agree for two successive doublings and the accepted run visits the empty state before the window.
LoynesResult loynes_window(const MatchingModel& model, std::uint64_t seed, const LoynesOptions& opts = {});

}  // namespace fcfs

#endif  // FCFS_LOYNES_HPP
