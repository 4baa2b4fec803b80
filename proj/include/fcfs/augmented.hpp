#ifndef FCFS_AUGMENTED_HPP
#define FCFS_AUGMENTED_HPP

#include <optional>
#include <vector>

#include "fcfs/chains.hpp"

namespace fcfs {

// (S_1, w_1, ..., w_{J-1}, S_J): server types ordered by last occurrence, and the words
// between consecutive last occurrences. `tail` holds the customers after S_J when present.
struct AugmentedState {
  std::vector<int> perm;
  std::vector<Word> between;
  Word tail;
};

// Requires every server type to occur as an exchanged server and the word to begin with
// the earliest of the last occurrences.
AugmentedState to_augmented(const MatchingModel& model, const Word& word);

enum class MarginalKind { W, X, Y, U, V, R };

const char* marginal_kind_name(MarginalKind k);
MarginalKind parse_marginal_kind(const std::string& name);

// Shape depends on kind: W uses `pattern` (false = customer, true = server per slot),
// X uses n, Y uses m, U uses both, V uses r, R only the permutation.
struct MarginalValue {
  MarginalKind kind = MarginalKind::R;
  std::vector<int> perm;
  std::vector<std::vector<bool>> pattern;
  std::vector<long> n;
  std::vector<long> m;
  std::vector<long> r;
};

MarginalValue project(MarginalKind kind, const AugmentedState& aug);

// Throws std::invalid_argument when the value does not match its kind.
void check_marginal_shape(int num_servers, const MarginalValue& v);

}  // namespace fcfs

#endif  // FCFS_AUGMENTED_HPP
