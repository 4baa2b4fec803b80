#ifndef FCFS_SUMMATION_HPP
#define FCFS_SUMMATION_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <vector>

namespace fcfs {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  void add(const CompensatedSum& o) {
    add(o.sum_);
    add(o.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Visits every permutation of 0..n-1, one accumulator per leading element. Leading elements are
// dealt to worker threads round-robin; the caller merges the returned accumulators in order, so
// results do not depend on the thread count.
template <class Acc, class Visit>
std::vector<Acc> permutation_reduce(int n, int threads, const Acc& init, Visit visit) {
  if (n == 0) {
    std::vector<Acc> out(1, init);
    std::vector<int> empty;
    visit(empty, out[0]);
    return out;
  }
  std::vector<Acc> out(n, init);
  auto work = [&](int first) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::rotate(perm.begin(), perm.begin() + first, perm.begin() + first + 1);
    do {
      visit(perm, out[first]);
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
  };
  int t = std::clamp(threads, 1, n);
  if (t == 1) {
    for (int f = 0; f < n; ++f) work(f);
    return out;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      for (int f = w; f < n; f += t) work(f);
    });
  for (auto& th : pool) th.join();
  return out;
}

inline int resolve_threads(int requested, int n) {
  if (n < 8) return 1;
  if (requested > 0) return requested;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

}  // namespace fcfs

#endif  // FCFS_SUMMATION_HPP
