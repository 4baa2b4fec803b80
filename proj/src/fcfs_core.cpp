#include "fcfs/fcfs_core.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace fcfs {

namespace {

// Unmatched items that have arrived, queued per type in position order.
class ArrivalQueues {
 public:
  explicit ArrivalQueues(int types) : q_(types) {}

  void push(int type, std::size_t pos) { q_[type].push_back(pos); }

  // Earliest queued position among the types in mask; removes it.
  bool take_earliest(TypeMask mask, std::size_t& pos) {
    int best = -1;
    std::size_t best_pos = std::numeric_limits<std::size_t>::max();
    for (int t = 0; t < static_cast<int>(q_.size()); ++t) {
      if (has(mask, t) && !q_[t].empty() && q_[t].front() < best_pos) {
        best = t;
        best_pos = q_[t].front();
      }
    }
    if (best < 0) return false;
    q_[best].pop_front();
    pos = best_pos;
    return true;
  }

 private:
  std::vector<std::deque<std::size_t>> q_;
};

void check_types(const MatchingModel& model, const ItemSequence& seq) {
  for (int c : seq.customers)
    if (c < 0 || c >= model.num_customers()) throw std::out_of_range("customer type out of range");
  for (int s : seq.servers)
    if (s < 0 || s >= model.num_servers()) throw std::out_of_range("server type out of range");
}

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

Matching collect(const ItemSequence& seq, const std::vector<std::size_t>& partner_of_customer,
                 const std::vector<std::size_t>& partner_of_server) {
  Matching out;
  for (std::size_t m = 0; m < partner_of_customer.size(); ++m) {
    if (partner_of_customer[m] == kNone)
      out.unmatched_customers.push_back(seq.base_index + static_cast<Pos>(m));
    else
      out.links.push_back({seq.base_index + static_cast<Pos>(m),
                           seq.base_index + static_cast<Pos>(partner_of_customer[m])});
  }
  for (std::size_t n = 0; n < partner_of_server.size(); ++n)
    if (partner_of_server[n] == kNone)
      out.unmatched_servers.push_back(seq.base_index + static_cast<Pos>(n));
  return out;
}

}  // namespace

Matching fcfs_match_ordered(const MatchingModel& model, const ItemSequence& seq, BuildOrder order) {
  check_types(model, seq);
  const std::size_t M = seq.customers.size();
  const std::size_t N = seq.servers.size();
  std::vector<std::size_t> pc(M, kNone), ps(N, kNone);
  ArrivalQueues waiting_c(model.num_customers());
  ArrivalQueues waiting_s(model.num_servers());

  auto arrive_customer = [&](std::size_t m) {
    std::size_t n;
    if (waiting_s.take_earliest(model.servers_of_customer(seq.customers[m]), n)) {
      pc[m] = n;
      ps[n] = m;
    } else {
      waiting_c.push(seq.customers[m], m);
    }
  };
  auto arrive_server = [&](std::size_t n) {
    std::size_t m;
    if (waiting_c.take_earliest(model.customers_of_server(seq.servers[n]), m)) {
      pc[m] = n;
      ps[n] = m;
    } else {
      waiting_s.push(seq.servers[n], n);
    }
  };

  switch (order) {
    case BuildOrder::ServerByServer:
      for (std::size_t m = 0; m < M; ++m) arrive_customer(m);
      for (std::size_t n = 0; n < N; ++n) arrive_server(n);
      break;
    case BuildOrder::CustomerByCustomer:
      for (std::size_t n = 0; n < N; ++n) arrive_server(n);
      for (std::size_t m = 0; m < M; ++m) arrive_customer(m);
      break;
    case BuildOrder::PairByPair:
      for (std::size_t t = 0; t < std::max(M, N); ++t) {
        if (t < M) arrive_customer(t);
        if (t < N) arrive_server(t);
      }
      break;
  }
  return collect(seq, pc, ps);
}

Matching fcfs_match_finite(const MatchingModel& model, const ItemSequence& seq) {
  return fcfs_match_ordered(model, seq, BuildOrder::ServerByServer);
}

bool verify_fcfs(const MatchingModel& model, const ItemSequence& seq, const Matching& matching) {
  check_types(model, seq);
  const Pos M = static_cast<Pos>(seq.customers.size());
  const Pos N = static_cast<Pos>(seq.servers.size());
  std::vector<Pos> pc(M, -1), ps(N, -1);
  for (const Link& l : matching.links) {
    Pos m = l.customer - seq.base_index;
    Pos n = l.server - seq.base_index;
    if (m < 0 || m >= M || n < 0 || n >= N) throw std::out_of_range("link position out of range");
    if (pc[m] >= 0 || ps[n] >= 0) return false;
    if (!model.compatible(seq.customers[m], seq.servers[n])) return false;
    pc[m] = n;
    ps[n] = m;
  }
  // completeness
  for (Pos m = 0; m < M; ++m) {
    if (pc[m] >= 0) continue;
    for (Pos n = 0; n < N; ++n)
      if (ps[n] < 0 && model.compatible(seq.customers[m], seq.servers[n])) return false;
  }
  for (Pos m = 0; m < M; ++m) {
    Pos n = pc[m];
    if (n < 0) continue;
    // earlier compatible servers went to earlier customers
    for (Pos l = 0; l < n; ++l)
      if (model.compatible(seq.customers[m], seq.servers[l]) && !(ps[l] >= 0 && ps[l] < m))
        return false;
    // earlier compatible customers went to earlier servers
    for (Pos k = 0; k < m; ++k)
      if (model.compatible(seq.customers[k], seq.servers[n]) && !(pc[k] >= 0 && pc[k] < n))
        return false;
  }
  return true;
}

ExchangedPath exchange_transform(const ItemSequence& seq, const Matching& matching) {
  ExchangedPath out;
  out.base_index = seq.base_index;
  out.customer_line.resize(seq.customers.size());
  out.server_line.resize(seq.servers.size());
  for (std::size_t m = 0; m < seq.customers.size(); ++m) out.customer_line[m] = {false, seq.customers[m]};
  for (std::size_t n = 0; n < seq.servers.size(); ++n) out.server_line[n] = {false, seq.servers[n]};
  for (const Link& l : matching.links) {
    auto m = static_cast<std::size_t>(l.customer - seq.base_index);
    auto n = static_cast<std::size_t>(l.server - seq.base_index);
    out.customer_line.at(m) = {true, seq.servers.at(n)};
    out.server_line.at(n) = {true, seq.customers.at(m)};
  }
  out.links = matching.links;
  return out;
}

ExchangedPath exchange_transform(const ExchangedPath& path) {
  ExchangedPath out = path;
  for (const Link& l : path.links) {
    auto m = static_cast<std::size_t>(l.customer - path.base_index);
    auto n = static_cast<std::size_t>(l.server - path.base_index);
    out.customer_line.at(m) = {!path.customer_line.at(m).exchanged, path.server_line.at(n).type};
    out.server_line.at(n) = {!path.server_line.at(n).exchanged, path.customer_line.at(m).type};
  }
  return out;
}

ItemSequence restore_sequence(const ExchangedPath& path) {
  ExchangedPath back = exchange_transform(path);
  ItemSequence seq;
  seq.base_index = path.base_index;
  for (const auto& it : back.customer_line) {
    if (it.exchanged) throw std::invalid_argument("path still carries exchanged items");
    seq.customers.push_back(it.type);
  }
  for (const auto& it : back.server_line) {
    if (it.exchanged) throw std::invalid_argument("path still carries exchanged items");
    seq.servers.push_back(it.type);
  }
  return seq;
}

namespace {

void require_perfect_block(const ItemSequence& seq, const Matching& matching) {
  if (seq.customers.size() != seq.servers.size())
    throw std::invalid_argument("perfect block needs words of equal length");
  if (!matching.perfect() || matching.links.size() != seq.customers.size())
    throw std::invalid_argument("matching is not perfect");
}

std::vector<Link> sorted_links(std::vector<Link> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

ItemSequence reversed_exchanged_sequence(const ItemSequence& seq, const Matching& matching) {
  require_perfect_block(seq, matching);
  ExchangedPath ex = exchange_transform(seq, matching);
  const std::size_t L = seq.customers.size();
  ItemSequence rev;
  rev.base_index = seq.base_index;
  rev.customers.resize(L);
  rev.servers.resize(L);
  // exchanged customers live on the server line, exchanged servers on the customer line
  for (std::size_t p = 0; p < L; ++p) {
    rev.customers[p] = ex.server_line[L - 1 - p].type;
    rev.servers[p] = ex.customer_line[L - 1 - p].type;
  }
  return rev;
}

bool reversed_rematch_check(const MatchingModel& model, const ItemSequence& seq,
                            const Matching& matching) {
  ItemSequence rev = reversed_exchanged_sequence(seq, matching);
  const Pos last = seq.base_index * 2 + static_cast<Pos>(seq.customers.size()) - 1;
  std::vector<Link> expected;
  // a link (m, n) now joins the exchanged customer at n to the exchanged server at m
  for (const Link& l : matching.links) expected.push_back({last - l.server, last - l.customer});
  Matching again = fcfs_match_finite(model, rev);
  return sorted_links(again.links) == sorted_links(expected);
}

bool naive_reversed_rematch_check(const MatchingModel& model, const ItemSequence& seq,
                                  const Matching& matching) {
  require_perfect_block(seq, matching);
  const std::size_t L = seq.customers.size();
  ItemSequence rev;
  rev.base_index = seq.base_index;
  rev.customers.assign(seq.customers.rbegin(), seq.customers.rend());
  rev.servers.assign(seq.servers.rbegin(), seq.servers.rend());
  const Pos last = seq.base_index * 2 + static_cast<Pos>(L) - 1;
  std::vector<Link> expected;
  for (const Link& l : matching.links) expected.push_back({last - l.customer, last - l.server});
  Matching again = fcfs_match_finite(model, rev);
  return sorted_links(again.links) == sorted_links(expected);
}

std::vector<Block> decompose_perfect_blocks(const ItemSequence& seq, const Matching& matching) {
  const std::size_t M = seq.customers.size();
  const std::size_t N = seq.servers.size();
  const std::size_t T = std::min(M, N);
  // once an item stays unmatched the pair-by-pair state never empties again
  constexpr Pos kOpen = std::numeric_limits<Pos>::max();
  std::vector<bool> c_linked(M, false), s_linked(N, false);
  std::vector<Pos> c_partner(M, 0), s_partner(N, 0);
  for (const Link& l : matching.links) {
    auto m = static_cast<std::size_t>(l.customer - seq.base_index);
    auto n = static_cast<std::size_t>(l.server - seq.base_index);
    c_linked.at(m) = true;
    s_linked.at(n) = true;
    c_partner[m] = static_cast<Pos>(n);
    s_partner[n] = static_cast<Pos>(m);
  }
  std::vector<Block> out;
  Pos start = 0;
  Pos far = -1;
  for (std::size_t t = 0; t < T; ++t) {
    if (!c_linked[t] || !s_linked[t]) {
      far = kOpen;
      continue;
    }
    if (far != kOpen) far = std::max({far, c_partner[t], s_partner[t]});
    if (far == static_cast<Pos>(t)) {
      out.push_back({seq.base_index + start, seq.base_index + static_cast<Pos>(t) + 1});
      start = static_cast<Pos>(t) + 1;
      far = -1;
    }
  }
  return out;
}

}  // namespace fcfs
