#include "fcfs/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace fcfs {

namespace {

// Earliest front among the queues selected by `mask`, or -1.
int earliest(const std::vector<std::deque<Pos>>& qs, TypeMask mask) {
  int best = -1;
  Pos at = std::numeric_limits<Pos>::max();
  for (int t = 0; t < static_cast<int>(qs.size()); ++t)
    if (has(mask, t) && !qs[t].empty() && qs[t].front() < at) {
      at = qs[t].front();
      best = t;
    }
  return best;
}

void require_stable(const MatchingModel& model) {
  if (!check_crp(model).holds)
    throw std::domain_error("complete resource pooling fails: regeneration cycles are not finite");
}

}  // namespace

PairwiseMatcher::PairwiseMatcher(const MatchingModel& model, const DrivingSequence& seq, Pos start)
    : model_(model), seq_(seq), next_(start), cq_(model.num_customers()), sq_(model.num_servers()) {}

bool PairwiseMatcher::advance(std::vector<MatchRecord>* out) {
  const Pos p = next_++;
  const int c = seq_.customer(p);
  const int s = seq_.server(p);
  auto emit = [&](Pos cm, Pos sn, int ct, int st) {
    if (out) out->push_back({cm, sn, ct, st});
  };
  bool c_done = false, s_done = false;
  if (int t = earliest(sq_, model_.servers_of_customer(c)); t >= 0) {
    emit(p, sq_[t].front(), c, t);
    sq_[t].pop_front();
    --waiting_s_;
    c_done = true;
  }
  if (int t = earliest(cq_, model_.customers_of_server(s)); t >= 0) {
    emit(cq_[t].front(), p, t, s);
    cq_[t].pop_front();
    --waiting_c_;
    s_done = true;
  }
  if (!c_done && !s_done && model_.compatible(c, s)) {
    emit(p, p, c, s);
    c_done = s_done = true;
  }
  if (!c_done) {
    cq_[c].push_back(p);
    ++waiting_c_;
  }
  if (!s_done) {
    sq_[s].push_back(p);
    ++waiting_s_;
  }
  return empty();
}

Pos PairwiseMatcher::earliest_unmatched() const {
  Pos best = next_;
  for (const auto& q : cq_)
    if (!q.empty()) best = std::min(best, q.front());
  for (const auto& q : sq_)
    if (!q.empty()) best = std::min(best, q.front());
  return best;
}

ChainState PairwiseMatcher::state() const {
  std::vector<std::pair<Pos, int>> cs, ss;
  for (int t = 0; t < static_cast<int>(cq_.size()); ++t)
    for (Pos p : cq_[t]) cs.emplace_back(p, t);
  for (int t = 0; t < static_cast<int>(sq_.size()); ++t)
    for (Pos p : sq_[t]) ss.emplace_back(p, t);
  std::sort(cs.begin(), cs.end());
  std::sort(ss.begin(), ss.end());
  ChainState st;
  for (auto [p, t] : cs) st.first.push_back(cust(t));
  for (auto [p, t] : ss) st.second.push_back(serv(t));
  return st;
}

std::vector<MatchRecord> simulate_matches(const MatchingModel& model, std::uint64_t seed, Pos pairs) {
  DrivingSequence seq(model, seed);
  PairwiseMatcher pm(model, seq, 0);
  std::vector<MatchRecord> out;
  for (Pos k = 0; k < pairs; ++k) pm.advance(&out);
  return out;
}

std::vector<ChainState> chain_trajectory(const MatchingModel& model, ChainKind kind, const ChainState& initial,
                                         long steps, std::uint64_t seed) {
  if (!has_kernel(kind))
    throw std::invalid_argument(std::string(chain_kind_name(kind)) + " has no simulation kernel");
  SeededStream src(model, seed);
  std::vector<ChainState> out{initial};
  for (long k = 0; k < steps; ++k) out.push_back(step(model, kind, out.back(), src));
  return out;
}

ChainRun simulate_chain(const MatchingModel& model, ChainKind kind, long steps, std::uint64_t seed, int max_len) {
  if (!has_kernel(kind))
    throw std::invalid_argument(std::string(chain_kind_name(kind)) + " has no simulation kernel");
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  ChainRun run;
  run.kind = kind;
  run.seed = seed;
  run.steps = steps;
  run.crp_holds = check_crp(model).holds;
  if (kind == ChainKind::O) {
    // queue form of the same kernel: O(1) per step however long the state grows
    DrivingSequence seq(model, seed);
    PairwiseMatcher pm(model, seq, 0);
    for (long k = 1; k <= steps; ++k) {
      pm.advance(nullptr);
      run.max_length = std::max(run.max_length, pm.backlog());
      if (static_cast<int>(pm.backlog()) <= max_len) ++run.occupancy[pm.state()];
      if (pm.empty()) {
        ++run.empty_visits;
        run.last_empty_step = k;
      }
    }
    run.final_state = pm.state();
    return run;
  }
  SeededStream src(model, seed);
  ChainState st;
  for (long k = 1; k <= steps; ++k) {
    st = step(model, kind, st, src);
    run.max_length = std::max(run.max_length, st.length());
    if (static_cast<int>(st.length()) <= max_len) ++run.occupancy[st];
    if (st.empty()) {
      ++run.empty_visits;
      run.last_empty_step = k;
    }
  }
  run.final_state = std::move(st);
  return run;
}

RegenerationReport regeneration_estimates(const MatchingModel& model, std::uint64_t seed, long cycles) {
  require_stable(model);
  const int I = model.num_customers();
  const int J = model.num_servers();
  const std::size_t IJ = static_cast<std::size_t>(I) * J;
  DrivingSequence seq(model, seed);
  PairwiseMatcher pm(model, seq, 0);

  DenominatorMoments len_den;
  std::vector<DenominatorMoments> server_den(J), pair_den(IJ);
  RatioMoments empty_num;
  std::vector<RatioMoments> rate_num(IJ);
  std::vector<std::map<long, RatioMoments>> link_num(J), pair_num(IJ);
  double sum_len = 0.0, sum_len2 = 0.0;

  RegenerationReport rep;
  rep.seed = seed;
  rep.customers = I;
  rep.servers = J;
  rep.match_counts.assign(IJ, 0);
  rep.server_matches.assign(J, 0);

  std::vector<MatchRecord> buf;
  std::vector<long> pair_count(IJ), server_count(J);
  std::unordered_map<long, long> link_count, pair_link_count;  // keyed by (type, length)
  auto key = [](std::size_t type, long len) { return static_cast<long>(type) * (1L << 40) + len + (1L << 39); };
  auto unkey = [](long k) {
    return std::pair<std::size_t, long>(static_cast<std::size_t>(k >> 40), (k & ((1L << 40) - 1)) - (1L << 39));
  };

  for (long c = 0; c < cycles; ++c) {
    long len = 0;
    std::fill(pair_count.begin(), pair_count.end(), 0);
    std::fill(server_count.begin(), server_count.end(), 0);
    link_count.clear();
    pair_link_count.clear();
    bool done = false;
    while (!done) {
      buf.clear();
      done = pm.advance(&buf);
      ++len;
      rep.max_backlog = std::max(rep.max_backlog, pm.backlog());
      for (const MatchRecord& r : buf) {
        std::size_t ij = static_cast<std::size_t>(r.customer) * J + r.server;
        ++pair_count[ij];
        ++server_count[r.server];
        ++link_count[key(r.server, r.length())];
        ++pair_link_count[key(ij, r.length())];
      }
    }
    const double x = static_cast<double>(len);
    len_den.add(x);
    sum_len += x;
    sum_len2 += x * x;
    empty_num.add(1.0, x);
    for (std::size_t ij = 0; ij < IJ; ++ij) {
      rate_num[ij].add(static_cast<double>(pair_count[ij]), x);
      pair_den[ij].add(static_cast<double>(pair_count[ij]));
      rep.match_counts[ij] += pair_count[ij];
    }
    for (int j = 0; j < J; ++j) {
      server_den[j].add(static_cast<double>(server_count[j]));
      rep.server_matches[j] += server_count[j];
    }
    for (auto [k, n] : link_count) {
      auto [j, l] = unkey(k);
      link_num[j][l].add(static_cast<double>(n), static_cast<double>(server_count[j]));
    }
    for (auto [k, n] : pair_link_count) {
      auto [ij, l] = unkey(k);
      pair_num[ij][l].add(static_cast<double>(n), static_cast<double>(pair_count[ij]));
    }
    rep.pairs += len;
  }
  rep.cycles = cycles;
  const double n = static_cast<double>(cycles);
  rep.mean_cycle_length.value = sum_len / n;
  if (cycles > 1) {
    double var = (sum_len2 - sum_len * sum_len / n) / (n - 1);
    rep.mean_cycle_length.se = std::sqrt(std::max(var, 0.0) / n);
  }
  rep.pi_empty = ratio_estimate(empty_num, len_den);
  for (std::size_t ij = 0; ij < IJ; ++ij) rep.rates.push_back(ratio_estimate(rate_num[ij], len_den));
  rep.link_pmf.resize(J);
  for (int j = 0; j < J; ++j)
    for (const auto& [l, m] : link_num[j]) rep.link_pmf[j][l] = ratio_estimate(m, server_den[j]);
  rep.pair_link_pmf.resize(IJ);
  for (std::size_t ij = 0; ij < IJ; ++ij)
    for (const auto& [l, m] : pair_num[ij]) rep.pair_link_pmf[ij][l] = ratio_estimate(m, pair_den[ij]);
  return rep;
}

OccupancyReport occupancy_estimates(const MatchingModel& model, ChainKind kind, long cycles, std::uint64_t seed,
                                    int max_len) {
  if (!has_kernel(kind))
    throw std::invalid_argument(std::string(chain_kind_name(kind)) + " has no simulation kernel");
  require_stable(model);
  SeededStream src(model, seed);
  DenominatorMoments den;
  std::map<ChainState, RatioMoments> num;
  std::map<ChainState, long> visits;
  double sum_len = 0.0, sum_len2 = 0.0;
  OccupancyReport rep;
  rep.seed = seed;
  ChainState st;
  for (long c = 0; c < cycles; ++c) {
    long len = 0;
    visits.clear();
    do {
      st = step(model, kind, st, src);
      ++len;
      if (static_cast<int>(st.length()) <= max_len) ++visits[st];
    } while (!st.empty());
    const double x = static_cast<double>(len);
    den.add(x);
    sum_len += x;
    sum_len2 += x * x;
    for (const auto& [s, v] : visits) num[s].add(static_cast<double>(v), x);
    rep.steps += len;
  }
  rep.cycles = cycles;
  const double n = static_cast<double>(cycles);
  rep.mean_cycle_length.value = sum_len / n;
  if (cycles > 1)
    rep.mean_cycle_length.se = std::sqrt(std::max((sum_len2 - sum_len * sum_len / n) / (n - 1), 0.0) / n);
  for (const auto& [s, m] : num) rep.states.emplace_back(s, ratio_estimate(m, den));
  return rep;
}

}  // namespace fcfs
