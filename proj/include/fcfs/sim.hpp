#ifndef FCFS_SIM_HPP
#define FCFS_SIM_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <vector>

#include "fcfs/chains.hpp"
#include "fcfs/fcfs_core.hpp"
#include "fcfs/rng.hpp"
#include "fcfs/stats.hpp"

namespace fcfs {

struct MatchRecord {
  Pos customer_pos = 0;
  Pos server_pos = 0;
  int customer = 0;
  int server = 0;
  long length() const { return static_cast<long>(customer_pos - server_pos); }
};

// Pair-by-pair FCFS matching of the driving sequences from an empty start, with one queue
// per item type.
class PairwiseMatcher {
 public:
  PairwiseMatcher(const MatchingModel& model, const DrivingSequence& seq, Pos start);

  // Adds the pair at position(); appends the links it creates. True when nothing is left unmatched.
  bool advance(std::vector<MatchRecord>* out);
  Pos position() const { return next_; }
  bool empty() const { return waiting_c_ == 0 && waiting_s_ == 0; }
  std::size_t backlog() const { return waiting_c_ + waiting_s_; }
  // Earliest unmatched position on either line, or position() when none.
  Pos earliest_unmatched() const;
  // Current O state.
  ChainState state() const;

 private:
  const MatchingModel& model_;
  const DrivingSequence& seq_;
  Pos next_;
  std::vector<std::deque<Pos>> cq_, sq_;
  std::size_t waiting_c_ = 0, waiting_s_ = 0;
};

std::vector<MatchRecord> simulate_matches(const MatchingModel& model, std::uint64_t seed, Pos pairs);

// Trajectory of any kind with a kernel, starting from `initial`; includes the initial state.
std::vector<ChainState> chain_trajectory(const MatchingModel& model, ChainKind kind, const ChainState& initial,
                                         long steps, std::uint64_t seed);

struct ChainRun {
  ChainKind kind = ChainKind::O;
  std::uint64_t seed = 0;
  long steps = 0;
  bool crp_holds = true;  // runs are allowed without it, to witness transience
  ChainState final_state;
  std::map<ChainState, long> occupancy;  // visits after each step, states up to max_len only
  long empty_visits = 0;
  long last_empty_step = -1;  // 1-based step after which the state was empty
  std::size_t max_length = 0;
};

ChainRun simulate_chain(const MatchingModel& model, ChainKind kind, long steps, std::uint64_t seed, int max_len = 4);

struct RegenerationReport {
  std::uint64_t seed = 0;
  long cycles = 0;
  long pairs = 0;
  int customers = 0;
  int servers = 0;
  Estimate mean_cycle_length;
  Estimate pi_empty;
  std::vector<Estimate> rates;     // customers x servers, row-major
  std::vector<long> match_counts;  // customers x servers
  std::vector<std::map<long, Estimate>> link_pmf;       // per server type
  std::vector<std::map<long, Estimate>> pair_link_pmf;  // per (customer, server), row-major
  std::vector<long> server_matches;                     // per server type
  std::size_t max_backlog = 0;
  const Estimate& rate(int i, int j) const { return rates[static_cast<std::size_t>(i) * servers + j]; }
};

// Cycles between visits of the pair-by-pair chain to the empty state, started empty at 0.
RegenerationReport regeneration_estimates(const MatchingModel& model, std::uint64_t seed, long cycles);

struct OccupancyReport {
  std::uint64_t seed = 0;
  long cycles = 0;
  long steps = 0;
  Estimate mean_cycle_length;
  std::vector<std::pair<ChainState, Estimate>> states;  // sorted by state
};

// Long-run fraction of steps spent in each visited state of length at most max_len.
OccupancyReport occupancy_estimates(const MatchingModel& model, ChainKind kind, long cycles, std::uint64_t seed,
                                    int max_len);

}  // namespace fcfs

#endif  // FCFS_SIM_HPP
