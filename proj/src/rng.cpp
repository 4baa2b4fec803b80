#include "fcfs/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace fcfs {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// Sub-stream tags folded into the key.
constexpr std::uint32_t kCustomerTag = 0x63757374u;
constexpr std::uint32_t kServerTag = 0x73657276u;

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double uniform53(std::uint32_t hi, std::uint32_t lo) {
  std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return static_cast<double>(bits) * 0x1.0p-53;
}

Categorical::Categorical(const std::vector<double>& probs) {
  if (probs.empty()) throw std::invalid_argument("empty categorical law");
  double acc = 0.0;
  for (double p : probs) {
    acc += p;
    cdf_.push_back(acc);
  }
  for (double& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

int Categorical::operator()(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<int>(it - cdf_.begin());
}

DrivingSequence::DrivingSequence(const MatchingModel& model, std::uint64_t seed)
    : seed_(seed), alpha_(model.alphas()), beta_(model.betas()) {
  auto lo = static_cast<std::uint32_t>(seed);
  auto hi = static_cast<std::uint32_t>(seed >> 32);
  ckey_ = {lo, hi ^ kCustomerTag};
  skey_ = {lo, hi ^ kServerTag};
}

double DrivingSequence::draw(Philox4x32::Key key, Pos pos) {
  auto u = static_cast<std::uint64_t>(pos);
  Philox4x32::Counter c{static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(u >> 32), 0u, 0u};
  Philox4x32::Counter out = Philox4x32::block(c, key);
  return uniform53(out[0], out[1]);
}

int DrivingSequence::customer(Pos m) const { return alpha_(draw(ckey_, m)); }
int DrivingSequence::server(Pos n) const { return beta_(draw(skey_, n)); }

}  // namespace fcfs
