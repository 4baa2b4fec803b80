#ifndef FCFS_FCFS_CORE_HPP
#define FCFS_FCFS_CORE_HPP

#include <cstdint>
#include <vector>

#include "fcfs/model.hpp"

namespace fcfs {

using Pos = std::int64_t;

// Two finite words of type indices; position k of either word sits at base_index + k.
struct ItemSequence {
  std::vector<int> customers;
  std::vector<int> servers;
  Pos base_index = 0;
};

struct Link {
  Pos customer = 0;
  Pos server = 0;
  friend bool operator==(const Link&, const Link&) = default;
  friend auto operator<=>(const Link&, const Link&) = default;
};

struct Matching {
  std::vector<Link> links;  // sorted by customer position
  std::vector<Pos> unmatched_customers;
  std::vector<Pos> unmatched_servers;

  bool perfect() const { return unmatched_customers.empty() && unmatched_servers.empty(); }
};

enum class BuildOrder { ServerByServer, CustomerByCustomer, PairByPair };

// Complete FCFS matching built by letting items arrive in the given order.
Matching fcfs_match_ordered(const MatchingModel& model, const ItemSequence& seq, BuildOrder order);

// Server by server: each server takes the earliest compatible unmatched customer.
Matching fcfs_match_finite(const MatchingModel& model, const ItemSequence& seq);

// Brute-force check of completeness and both FCFS clauses. Throws std::out_of_range
// on link positions outside the words.
bool verify_fcfs(const MatchingModel& model, const ItemSequence& seq, const Matching& matching);

// One slot of a line after exchange: either the original unmatched item, or the partner's
// type moved across.
struct LineItem {
  bool exchanged = false;
  int type = 0;
  friend bool operator==(const LineItem&, const LineItem&) = default;
};

struct ExchangedPath {
  std::vector<LineItem> customer_line;  // unmatched customers and exchanged servers
  std::vector<LineItem> server_line;    // unmatched servers and exchanged customers
  std::vector<Link> links;
  Pos base_index = 0;
};

ExchangedPath exchange_transform(const ItemSequence& seq, const Matching& matching);
// Exchanging again swaps the items back.
ExchangedPath exchange_transform(const ExchangedPath& path);
ItemSequence restore_sequence(const ExchangedPath& path);

// Exchanged words of a perfect block read in reversed time, as an ordinary sequence.
ItemSequence reversed_exchanged_sequence(const ItemSequence& seq, const Matching& matching);

bool reversed_rematch_check(const MatchingModel& model, const ItemSequence& seq,
                            const Matching& matching);
// Reversal without exchange; generally not FCFS.
bool naive_reversed_rematch_check(const MatchingModel& model, const ItemSequence& seq,
                                  const Matching& matching);

struct Block {
  Pos begin = 0;
  Pos end = 0;  // exclusive
  friend bool operator==(const Block&, const Block&) = default;
};

// Maximal perfectly matched blocks: cut points t where every item before t is linked
// to an item before t. A trailing unfinished segment is not reported.
std::vector<Block> decompose_perfect_blocks(const ItemSequence& seq, const Matching& matching);

}  // namespace fcfs

#endif  // FCFS_FCFS_CORE_HPP
