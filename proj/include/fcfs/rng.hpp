#ifndef FCFS_RNG_HPP
#define FCFS_RNG_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "fcfs/chains.hpp"
#include "fcfs/fcfs_core.hpp"
#include "fcfs/model.hpp"

namespace fcfs {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter block(Counter ctr, Key key);
};

inline constexpr const char* kGeneratorName = "philox4x32-10";

// Uniform in [0, 1) with 53 random bits.
double uniform53(std::uint32_t hi, std::uint32_t lo);

// Inverse-CDF sampler over a fixed probability vector.
class Categorical {
 public:
  Categorical() = default;
  explicit Categorical(const std::vector<double>& probs);
  int operator()(double u) const;
  int size() const { return static_cast<int>(cdf_.size()); }

 private:
  std::vector<double> cdf_;
};

// The bi-infinite driving sequences: customer and server types at every position, drawn
// from independent sub-streams and readable in any order.
class DrivingSequence {
 public:
  DrivingSequence(const MatchingModel& model, std::uint64_t seed);
  int customer(Pos m) const;
  int server(Pos n) const;
  std::uint64_t seed() const { return seed_; }

 private:
  static double draw(Philox4x32::Key key, Pos pos);
  std::uint64_t seed_;
  Philox4x32::Key ckey_, skey_;
  Categorical alpha_, beta_;
};

// Reads the driving sequences forward from a start position.
class SeededStream : public InnovationSource {
 public:
  SeededStream(const MatchingModel& model, std::uint64_t seed, Pos start = 0)
      : seq_(model, seed), next_c_(start), next_s_(start) {}
  int next_customer() override { return seq_.customer(next_c_++); }
  int next_server() override { return seq_.server(next_s_++); }
  const DrivingSequence& sequence() const { return seq_; }

 private:
  DrivingSequence seq_;
  Pos next_c_, next_s_;
};

}  // namespace fcfs

#endif  // FCFS_RNG_HPP
