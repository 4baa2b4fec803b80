#include "fcfs/chains.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace fcfs {

Word reverse_dual(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (Symbol& s : out) {
    switch (s.kind) {
      case SymbolKind::Customer: s.kind = SymbolKind::ExchangedCustomer; break;
      case SymbolKind::ExchangedCustomer: s.kind = SymbolKind::Customer; break;
      case SymbolKind::Server: s.kind = SymbolKind::ExchangedServer; break;
      case SymbolKind::ExchangedServer: s.kind = SymbolKind::Server; break;
    }
  }
  return out;
}

const char* chain_kind_name(ChainKind k) {
  switch (k) {
    case ChainKind::Zs: return "zs";
    case ChainKind::Zc: return "zc";
    case ChainKind::D: return "d";
    case ChainKind::E: return "e";
    case ChainKind::Qs: return "qs";
    case ChainKind::Qc: return "qc";
    case ChainKind::O: return "o";
    case ChainKind::ZsAugmented: return "zs-augmented";
    case ChainKind::ZsOuter: return "zs-outer";
  }
  return "?";
}

ChainKind parse_chain_kind(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  for (ChainKind k : {ChainKind::Zs, ChainKind::Zc, ChainKind::D, ChainKind::E, ChainKind::Qs,
                      ChainKind::Qc, ChainKind::O, ChainKind::ZsAugmented, ChainKind::ZsOuter})
    if (n == chain_kind_name(k)) return k;
  throw std::invalid_argument("unknown chain kind '" + name + "'");
}

bool two_line(ChainKind k) { return k == ChainKind::D || k == ChainKind::E || k == ChainKind::O; }

bool has_kernel(ChainKind k) { return k != ChainKind::ZsAugmented && k != ChainKind::ZsOuter; }

double product_weight(const MatchingModel& model, const ChainState& s) {
  double w = 1.0;
  for (const Word* word : {&s.first, &s.second})
    for (Symbol x : *word) w *= customer_typed(x) ? model.alpha(x.type) : model.beta(x.type);
  return w;
}

namespace {

enum class LineSide { CustomerLine, ServerLine };

SymbolKind unmatched_kind(LineSide l) {
  return l == LineSide::CustomerLine ? SymbolKind::Customer : SymbolKind::Server;
}
SymbolKind exchanged_kind(LineSide l) {
  return l == LineSide::CustomerLine ? SymbolKind::ExchangedServer : SymbolKind::ExchangedCustomer;
}

LineSide line_side(ChainKind k, int line) {
  switch (k) {
    case ChainKind::Zc:
    case ChainKind::Qc: return LineSide::ServerLine;
    case ChainKind::D:
    case ChainKind::E:
    case ChainKind::O: return line == 0 ? LineSide::CustomerLine : LineSide::ServerLine;
    default: return LineSide::CustomerLine;
  }
}

bool natural(ChainKind k) { return k == ChainKind::Qs || k == ChainKind::Qc || k == ChainKind::O; }

bool well_formed(const MatchingModel& model, ChainKind kind, const ChainState& st) {
  if (!two_line(kind) && !st.second.empty()) return false;
  for (int line = 0; line < (two_line(kind) ? 2 : 1); ++line) {
    LineSide side = line_side(kind, line);
    for (Symbol s : line == 0 ? st.first : st.second) {
      bool ok_kind = s.kind == unmatched_kind(side) || (!natural(kind) && s.kind == exchanged_kind(side));
      if (!ok_kind) return false;
      int limit = customer_typed(s) ? model.num_customers() : model.num_servers();
      if (s.type >= limit) return false;
    }
  }
  return true;
}

// Customer-line rule: every unmatched customer is incompatible with every later exchanged server.
bool skipped_before_exchanged(const MatchingModel& model, const Word& w) {
  TypeMask seen = 0;
  for (Symbol s : w) {
    if (s.kind == SymbolKind::Customer)
      seen |= bit(s.type);
    else if (s.kind == SymbolKind::ExchangedServer && (seen & model.customers_of_server(s.type)))
      return false;
  }
  return true;
}

bool zs_word_ok(const MatchingModel& model, const Word& w) {
  if (w.empty()) return true;
  if (w.front().kind != SymbolKind::Customer || w.back().kind != SymbolKind::ExchangedServer)
    return false;
  return skipped_before_exchanged(model, w);
}

long count_kind(const Word& w, SymbolKind k) {
  return std::count_if(w.begin(), w.end(), [k](Symbol s) { return s.kind == k; });
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

bool d_ok(const MatchingModel& model, const ChainState& st) {
  if (st.empty()) return true;
  if (st.first.empty() || st.second.empty()) return false;
  if (count_kind(st.first, SymbolKind::Customer) != count_kind(st.second, SymbolKind::Server))
    return false;
  return zs_word_ok(model, concat(st.first, reverse_dual(st.second)));
}

bool augmented_ok(const MatchingModel& model, const Word& w) {
  if (w.empty() || w.front().kind != SymbolKind::ExchangedServer ||
      w.back().kind != SymbolKind::ExchangedServer)
    return false;
  TypeMask servers = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k].kind != SymbolKind::ExchangedServer) continue;
    if (k > 0 && w[k].type == w.front().type) return false;
    servers |= bit(w[k].type);
  }
  return servers == model.all_servers() && skipped_before_exchanged(model, w);
}

bool outer_ok(const MatchingModel& model, const Word& w) {
  auto last_x = std::find_if(w.rbegin(), w.rend(),
                             [](Symbol s) { return s.kind == SymbolKind::ExchangedServer; });
  if (last_x == w.rend() || last_x == w.rbegin()) return false;
  std::size_t split = static_cast<std::size_t>(w.rend() - last_x);
  Word head(w.begin(), w.begin() + static_cast<long>(split));
  if (!augmented_ok(model, head)) return false;
  TypeMask customers = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k].kind != SymbolKind::Customer) continue;
    if (k + 1 < w.size() && w[k].type == w.back().type) return false;
    customers |= bit(w[k].type);
  }
  return customers == model.all_customers();
}

}  // namespace

bool is_valid_state(const MatchingModel& model, ChainKind kind, const ChainState& st) {
  if (st.empty()) return true;
  if (!well_formed(model, kind, st)) return false;
  switch (kind) {
    case ChainKind::Zs: return zs_word_ok(model, st.first);
    case ChainKind::Zc: return zs_word_ok(model, reverse_dual(st.first));
    case ChainKind::D: return d_ok(model, st);
    case ChainKind::E: return d_ok(model, ChainState{reverse_dual(st.second), reverse_dual(st.first)});
    case ChainKind::Qs:
    case ChainKind::Qc: return true;
    case ChainKind::O: {
      if (st.first.size() != st.second.size()) return false;
      TypeMask cs = 0;
      for (Symbol s : st.first) cs |= bit(s.type);
      for (Symbol s : st.second)
        if (model.customers_of_server(s.type) & cs) return false;
      return true;
    }
    case ChainKind::ZsAugmented: return augmented_ok(model, st.first);
    case ChainKind::ZsOuter: return outer_ok(model, st.first);
  }
  return false;
}

int ScriptedInnovations::next_customer() {
  if (ci_ >= customers_.size()) throw std::out_of_range("scripted customers exhausted");
  return customers_[ci_++];
}

int ScriptedInnovations::next_server() {
  if (si_ >= servers_.size()) throw std::out_of_range("scripted servers exhausted");
  return servers_[si_++];
}

namespace {

// A run of raw items read beyond the state until the scanner finds a partner.
struct Scan {
  int line = 0;
  Side raw = Side::Customer;
  TypeMask skip = 0;
  double skip_mass = 0.0;
  double stop = 0.0;
  bool has_terminal = false;
  Symbol terminal{};
};

struct Branch {
  ChainState base;
  std::vector<Scan> scans;
};

struct Front {
  int customer = -1;
  int server = -1;
  double prob = 1.0;
};

enum class FrontDraw { None, Customer, Server, Pair };

FrontDraw front_draw(ChainKind kind, const ChainState& st) {
  switch (kind) {
    case ChainKind::Zs:
    case ChainKind::Qs: return FrontDraw::Server;
    case ChainKind::Zc:
    case ChainKind::Qc: return FrontDraw::Customer;
    case ChainKind::D:
    case ChainKind::O: return FrontDraw::Pair;
    case ChainKind::E: return st.empty() ? FrontDraw::Pair : FrontDraw::None;
    default: throw std::invalid_argument("chain kind has no transition kernel");
  }
}

std::vector<Front> fronts(const MatchingModel& model, ChainKind kind, const ChainState& st) {
  std::vector<Front> out;
  switch (front_draw(kind, st)) {
    case FrontDraw::None: out.push_back({}); break;
    case FrontDraw::Customer:
      for (int a = 0; a < model.num_customers(); ++a) out.push_back({a, -1, model.alpha(a)});
      break;
    case FrontDraw::Server:
      for (int b = 0; b < model.num_servers(); ++b) out.push_back({-1, b, model.beta(b)});
      break;
    case FrontDraw::Pair:
      for (int a = 0; a < model.num_customers(); ++a)
        for (int b = 0; b < model.num_servers(); ++b)
          out.push_back({a, b, model.alpha(a) * model.beta(b)});
      break;
  }
  return out;
}

Scan customers_scanned_by(const MatchingModel& model, int line, int server, bool terminal,
                          Symbol term) {
  Scan s;
  s.line = line;
  s.raw = Side::Customer;
  s.skip = model.all_customers() & ~model.customers_of_server(server);
  s.skip_mass = model.alpha_of(s.skip);
  s.stop = model.alpha_of(model.customers_of_server(server));
  s.has_terminal = terminal;
  s.terminal = term;
  return s;
}

Scan servers_scanned_by(const MatchingModel& model, int line, int customer, bool terminal,
                        Symbol term) {
  Scan s;
  s.line = line;
  s.raw = Side::Server;
  s.skip = model.all_servers() & ~model.servers_of_customer(customer);
  s.skip_mass = model.beta_of(s.skip);
  s.stop = model.beta_of(model.servers_of_customer(customer));
  s.has_terminal = terminal;
  s.terminal = term;
  return s;
}

// First index >= from holding an unmatched item of the given kind compatible with `mask`.
long find_first(const Word& w, std::size_t from, SymbolKind kind, TypeMask mask) {
  for (std::size_t k = from; k < w.size(); ++k)
    if (w[k].kind == kind && has(mask, w[k].type)) return static_cast<long>(k);
  return -1;
}

Branch branch_zs(const MatchingModel& model, const ChainState& st, int b) {
  Branch br{st, {}};
  Word& z = br.base.first;
  long k = find_first(z, 0, SymbolKind::Customer, model.customers_of_server(b));
  if (k >= 0)
    z[k] = xserv(b);
  else
    br.scans.push_back(customers_scanned_by(model, 0, b, true, xserv(b)));
  return br;
}

Branch branch_zc(const MatchingModel& model, const ChainState& st, int a) {
  Branch br{st, {}};
  Word& z = br.base.first;
  long k = find_first(z, 0, SymbolKind::Server, model.servers_of_customer(a));
  if (k >= 0)
    z[k] = xcust(a);
  else
    br.scans.push_back(servers_scanned_by(model, 0, a, true, xcust(a)));
  return br;
}

Branch branch_qs(const MatchingModel& model, const ChainState& st, int b) {
  Branch br{st, {}};
  Word& q = br.base.first;
  long k = find_first(q, 0, SymbolKind::Customer, model.customers_of_server(b));
  if (k >= 0)
    q.erase(q.begin() + k);
  else
    br.scans.push_back(customers_scanned_by(model, 0, b, false, {}));
  return br;
}

Branch branch_qc(const MatchingModel& model, const ChainState& st, int a) {
  Branch br{st, {}};
  Word& q = br.base.first;
  long k = find_first(q, 0, SymbolKind::Server, model.servers_of_customer(a));
  if (k >= 0)
    q.erase(q.begin() + k);
  else
    br.scans.push_back(servers_scanned_by(model, 0, a, false, {}));
  return br;
}

Branch branch_o(const MatchingModel& model, const ChainState& st, int a, int b) {
  Branch br{st, {}};
  Word& cs = br.base.first;
  Word& ss = br.base.second;
  long ks = find_first(ss, 0, SymbolKind::Server, model.servers_of_customer(a));
  long kc = find_first(cs, 0, SymbolKind::Customer, model.customers_of_server(b));
  if (ks >= 0) ss.erase(ss.begin() + ks);
  if (kc >= 0) cs.erase(cs.begin() + kc);
  if (ks < 0 && kc < 0 && model.compatible(a, b)) return br;
  if (ks < 0) cs.push_back(cust(a));
  if (kc < 0) ss.push_back(serv(b));
  return br;
}

Branch branch_d(const MatchingModel& model, const ChainState& st, int a, int b) {
  Branch br{st, {}};
  Word& z = br.base.first;
  Word& y = br.base.second;
  long ky = find_first(y, 0, SymbolKind::Server, model.servers_of_customer(a));
  long kz = find_first(z, 0, SymbolKind::Customer, model.customers_of_server(b));
  Symbol z_new{}, y_new{};
  if (ky >= 0) {
    z_new = xserv(y[ky].type);
    y[ky] = xcust(a);
  }
  if (kz >= 0) {
    y_new = xcust(z[kz].type);
    z[kz] = xserv(b);
  }
  if (ky < 0 && kz < 0 && model.compatible(a, b)) {
    z_new = xserv(b);
    y_new = xcust(a);
  } else {
    if (ky < 0) z_new = cust(a);
    if (kz < 0) y_new = serv(b);
  }
  z.push_back(z_new);
  y.push_back(y_new);
  return br;
}

Branch branch_e(const MatchingModel& model, const ChainState& st, int a, int b) {
  Branch br{st, {}};
  Word& y = br.base.first;   // customer line from the next position on
  Word& z = br.base.second;  // server line from the next position on
  if (st.empty()) {
    y.push_back(cust(a));
    z.push_back(serv(b));
  }
  const Symbol p = y.front();
  const Symbol q = z.front();
  if (p.kind == SymbolKind::Customer && q.kind == SymbolKind::Server && model.compatible(p.type, q.type)) {
    y.front() = xserv(q.type);
    z.front() = xcust(p.type);
    return br;
  }
  if (p.kind == SymbolKind::Customer) {
    long k = find_first(z, 1, SymbolKind::Server, model.servers_of_customer(p.type));
    if (k >= 0) {
      y.front() = xserv(z[k].type);
      z[k] = xcust(p.type);
    } else {
      // partner lies beyond the state; its type is dropped with the front position
      y.front() = xserv(0);
      br.scans.push_back(servers_scanned_by(model, 1, p.type, true, xcust(p.type)));
    }
  }
  if (q.kind == SymbolKind::Server) {
    long k = find_first(y, 1, SymbolKind::Customer, model.customers_of_server(q.type));
    if (k >= 0) {
      z.front() = xcust(y[k].type);
      y[k] = xserv(q.type);
    } else {
      z.front() = xcust(0);
      br.scans.push_back(customers_scanned_by(model, 0, q.type, true, xserv(q.type)));
    }
  }
  return br;
}

Branch make_branch(const MatchingModel& model, ChainKind kind, const ChainState& st, const Front& f) {
  switch (kind) {
    case ChainKind::Zs: return branch_zs(model, st, f.server);
    case ChainKind::Zc: return branch_zc(model, st, f.customer);
    case ChainKind::Qs: return branch_qs(model, st, f.server);
    case ChainKind::Qc: return branch_qc(model, st, f.customer);
    case ChainKind::O: return branch_o(model, st, f.customer, f.server);
    case ChainKind::D: return branch_d(model, st, f.customer, f.server);
    case ChainKind::E: return branch_e(model, st, f.customer, f.server);
    default: throw std::invalid_argument("chain kind has no transition kernel");
  }
}

void strip_leading(Word& w, SymbolKind k) {
  auto it = std::find_if(w.begin(), w.end(), [k](Symbol s) { return s.kind != k; });
  w.erase(w.begin(), it);
}

void check_lines(const ChainState& st) {
  if (st.first.empty() != st.second.empty())
    throw ChainInvariantError("pair-by-pair state with exactly one empty line");
}

void normalize(ChainKind kind, ChainState& st) {
  switch (kind) {
    case ChainKind::Zs: strip_leading(st.first, SymbolKind::ExchangedServer); break;
    case ChainKind::Zc: strip_leading(st.first, SymbolKind::ExchangedCustomer); break;
    case ChainKind::D:
      strip_leading(st.first, SymbolKind::ExchangedServer);
      strip_leading(st.second, SymbolKind::ExchangedCustomer);
      check_lines(st);
      break;
    case ChainKind::E:
      st.first.erase(st.first.begin());
      st.second.erase(st.second.begin());
      check_lines(st);
      break;
    default: break;
  }
}

Word& line_of(ChainState& st, int line) { return line == 0 ? st.first : st.second; }

Symbol skipped_symbol(Side raw, int t) { return raw == Side::Customer ? cust(t) : serv(t); }

double raw_prob(const MatchingModel& model, Side raw, int t) {
  return raw == Side::Customer ? model.alpha(t) : model.beta(t);
}

void require_valid(const MatchingModel& model, ChainKind kind, const ChainState& st) {
  if (!has_kernel(kind)) throw std::invalid_argument("chain kind has no transition kernel");
  if (!is_valid_state(model, kind, st)) throw std::invalid_argument("invalid chain state");
}

}  // namespace

ChainState step(const MatchingModel& model, ChainKind kind, const ChainState& state,
                InnovationSource& innovations) {
  require_valid(model, kind, state);
  Front f;
  switch (front_draw(kind, state)) {
    case FrontDraw::None: break;
    case FrontDraw::Customer: f.customer = innovations.next_customer(); break;
    case FrontDraw::Server: f.server = innovations.next_server(); break;
    case FrontDraw::Pair:
      f.customer = innovations.next_customer();
      f.server = innovations.next_server();
      break;
  }
  Branch br = make_branch(model, kind, state, f);
  for (const Scan& sc : br.scans) {
    Word& w = line_of(br.base, sc.line);
    for (;;) {
      int t = sc.raw == Side::Customer ? innovations.next_customer() : innovations.next_server();
      if (has(sc.skip, t)) {
        w.push_back(skipped_symbol(sc.raw, t));
      } else {
        if (sc.has_terminal) w.push_back(sc.terminal);
        break;
      }
    }
  }
  normalize(kind, br.base);
  return br.base;
}

Successors successors(const MatchingModel& model, ChainKind kind, const ChainState& state,
                      int max_appended) {
  require_valid(model, kind, state);
  if (max_appended < 0) throw std::invalid_argument("max_appended must be >= 0");
  std::map<ChainState, double> acc;
  Successors out;
  for (const Front& f : fronts(model, kind, state)) {
    Branch br = make_branch(model, kind, state, f);
    double kept = 1.0;
    for (const Scan& sc : br.scans) kept *= 1.0 - std::pow(sc.skip_mass, max_appended + 1);
    out.tail_mass += f.prob * (1.0 - kept);

    std::function<void(std::size_t, ChainState&, double)> expand = [&](std::size_t idx, ChainState& cur,
                                                                        double p) {
      if (idx == br.scans.size()) {
        ChainState done = cur;
        normalize(kind, done);
        acc[done] += p;
        return;
      }
      const Scan& sc = br.scans[idx];
      Word& w = line_of(cur, sc.line);
      const std::size_t mark = w.size();
      std::function<void(int, double)> run = [&](int depth, double q) {
        if (sc.has_terminal) w.push_back(sc.terminal);
        expand(idx + 1, cur, q * sc.stop);
        if (sc.has_terminal) w.pop_back();
        if (depth == max_appended) return;
        const int n = sc.raw == Side::Customer ? model.num_customers() : model.num_servers();
        for (int t = 0; t < n; ++t) {
          if (!has(sc.skip, t)) continue;
          w.push_back(skipped_symbol(sc.raw, t));
          run(depth + 1, q * raw_prob(model, sc.raw, t));
          w.pop_back();
        }
      };
      run(0, p);
      w.resize(mark);
    };
    expand(0, br.base, f.prob);
  }
  out.states.assign(acc.begin(), acc.end());
  return out;
}

double transition_probability(const MatchingModel& model, ChainKind kind, const ChainState& from,
                              const ChainState& to) {
  require_valid(model, kind, from);
  double total = 0.0;
  for (const Front& f : fronts(model, kind, from)) {
    Branch br = make_branch(model, kind, from, f);
    // Appended runs end the line, so a run of length r >= 1 is read off the target's tail.
    std::function<void(std::size_t, ChainState&, double)> match = [&](std::size_t idx, ChainState& cur,
                                                                       double p) {
      if (idx == br.scans.size()) {
        ChainState done = cur;
        normalize(kind, done);
        if (done == to) total += p;
        return;
      }
      const Scan& sc = br.scans[idx];
      Word& w = line_of(cur, sc.line);
      const Word& target = sc.line == 0 ? to.first : to.second;
      const std::size_t mark = w.size();
      const std::size_t term = sc.has_terminal ? 1 : 0;
      for (std::size_t r = 0; r + term <= std::max<std::size_t>(target.size(), term); ++r) {
        double q = p * sc.stop;
        bool ok = true;
        if (r > 0) {
          if (target.size() < r + term) break;
          const std::size_t from_idx = target.size() - r - term;
          for (std::size_t k = 0; k < r && ok; ++k) {
            Symbol s = target[from_idx + k];
            if (s != skipped_symbol(sc.raw, s.type) || !has(sc.skip, s.type))
              ok = false;
            else
              q *= raw_prob(model, sc.raw, s.type);
            if (ok) w.push_back(s);
          }
        }
        if (ok) {
          if (sc.has_terminal) w.push_back(sc.terminal);
          match(idx + 1, cur, q);
        }
        w.resize(mark);
      }
    };
    match(0, br.base, f.prob);
  }
  return total;
}

namespace {

std::vector<ChainState> enumerate_zs(const MatchingModel& model, int max_len) {
  std::vector<ChainState> out{ChainState{}};
  Word w;
  std::function<void(TypeMask)> grow = [&](TypeMask seen) {
    if (!w.empty() && w.back().kind == SymbolKind::ExchangedServer) out.push_back({w, {}});
    if (static_cast<int>(w.size()) == max_len) return;
    for (int i = 0; i < model.num_customers(); ++i) {
      w.push_back(cust(i));
      grow(seen | bit(i));
      w.pop_back();
    }
    if (w.empty()) return;
    for (int j = 0; j < model.num_servers(); ++j) {
      if (seen & model.customers_of_server(j)) continue;
      w.push_back(xserv(j));
      grow(seen);
      w.pop_back();
    }
  };
  grow(0);
  return out;
}

void all_words(int n_types, int len, SymbolKind kind, std::vector<Word>& out) {
  std::vector<int> idx(len, 0);
  for (;;) {
    Word w;
    for (int t : idx) w.push_back({kind, static_cast<std::uint8_t>(t)});
    out.push_back(w);
    int k = len - 1;
    while (k >= 0 && ++idx[k] == n_types) idx[k--] = 0;
    if (k < 0) break;
  }
}

}  // namespace

std::vector<ChainState> enumerate_states(const MatchingModel& model, ChainKind kind, int max_len, int cap) {
  if (max_len < 0) throw std::invalid_argument("max_len must be >= 0");
  if (max_len > cap) throw std::invalid_argument("max_len exceeds the enumeration cap");
  std::vector<ChainState> out;
  switch (kind) {
    case ChainKind::Zs: return enumerate_zs(model, max_len);
    case ChainKind::Zc:
      for (const ChainState& s : enumerate_zs(model, max_len)) out.push_back({reverse_dual(s.first), {}});
      return out;
    case ChainKind::D:
      for (const ChainState& s : enumerate_zs(model, max_len)) out.push_back(zs_to_d(model, s));
      return out;
    case ChainKind::E:
      for (const ChainState& s : enumerate_zs(model, max_len))
        out.push_back(d_to_e(model, zs_to_d(model, s)));
      return out;
    case ChainKind::Qs:
    case ChainKind::Qc: {
      const bool qs = kind == ChainKind::Qs;
      std::vector<Word> words;
      for (int len = 0; len <= max_len; ++len)
        all_words(qs ? model.num_customers() : model.num_servers(), len,
                  qs ? SymbolKind::Customer : SymbolKind::Server, words);
      for (Word& w : words) out.push_back({std::move(w), {}});
      return out;
    }
    case ChainKind::O: {
      for (int len = 0; 2 * len <= max_len; ++len) {
        std::vector<Word> cw, sw;
        all_words(model.num_customers(), len, SymbolKind::Customer, cw);
        all_words(model.num_servers(), len, SymbolKind::Server, sw);
        for (const Word& c : cw)
          for (const Word& s : sw) {
            ChainState st{c, s};
            if (is_valid_state(model, kind, st)) out.push_back(st);
          }
      }
      return out;
    }
    case ChainKind::ZsAugmented:
    case ChainKind::ZsOuter: {
      // every symbol of the customer line, filtered by the validity rules
      Word alphabet;
      for (int i = 0; i < model.num_customers(); ++i) alphabet.push_back(cust(i));
      for (int j = 0; j < model.num_servers(); ++j) alphabet.push_back(xserv(j));
      Word w;
      std::function<void()> grow = [&]() {
        if (!w.empty() && is_valid_state(model, kind, {w, {}})) out.push_back({w, {}});
        if (static_cast<int>(w.size()) == max_len) return;
        for (Symbol s : alphabet) {
          if (w.empty() && s.kind != SymbolKind::ExchangedServer) continue;
          w.push_back(s);
          grow();
          w.pop_back();
        }
      };
      grow();
      return out;
    }
  }
  return out;
}

ChainState zs_to_d(const MatchingModel& model, const ChainState& zs) {
  if (!is_valid_state(model, ChainKind::Zs, zs)) throw std::invalid_argument("invalid Zs state");
  // the split point balances unmatched customers on the left with exchanged servers on the right;
  // that count equals the number of exchanged servers in the word
  const auto L = count_kind(zs.first, SymbolKind::ExchangedServer);
  Word z(zs.first.begin(), zs.first.begin() + L);
  Word rest(zs.first.begin() + L, zs.first.end());
  return ChainState{z, reverse_dual(rest)};
}

ChainState d_to_zs(const MatchingModel& model, const ChainState& d) {
  if (!is_valid_state(model, ChainKind::D, d)) throw std::invalid_argument("invalid D state");
  return ChainState{concat(d.first, reverse_dual(d.second)), {}};
}

ChainState d_to_e(const MatchingModel& model, const ChainState& d) {
  if (!is_valid_state(model, ChainKind::D, d)) throw std::invalid_argument("invalid D state");
  return ChainState{reverse_dual(d.second), reverse_dual(d.first)};
}

ChainState e_to_d(const MatchingModel& model, const ChainState& e) {
  if (!is_valid_state(model, ChainKind::E, e)) throw std::invalid_argument("invalid E state");
  return ChainState{reverse_dual(e.second), reverse_dual(e.first)};
}

ChainState natural_projection(ChainKind detailed, const ChainState& st) {
  auto keep = [](const Word& w, SymbolKind k) {
    Word out;
    for (Symbol s : w)
      if (s.kind == k) out.push_back(s);
    return out;
  };
  switch (detailed) {
    case ChainKind::Zs: return {keep(st.first, SymbolKind::Customer), {}};
    case ChainKind::Zc: return {keep(st.first, SymbolKind::Server), {}};
    case ChainKind::D: return {keep(st.first, SymbolKind::Customer), keep(st.second, SymbolKind::Server)};
    default: throw std::invalid_argument("no natural projection for this chain kind");
  }
}

namespace {

const std::string kHatS = "\xC5\x9D";  // ŝ
const std::string kHatC = "\xC4\x89";  // ĉ
const std::string kEmpty = "\xE2\x88\x85";  // ∅

std::string hatted(const std::string& hat, char plain, const std::string& name) {
  if (!name.empty() && name[0] == plain) return hat + name.substr(1);
  return hat + name;
}

}  // namespace

std::string symbol_label(const MatchingModel& model, Symbol s) {
  switch (s.kind) {
    case SymbolKind::Customer: return model.customer_name(s.type);
    case SymbolKind::Server: return model.server_name(s.type);
    case SymbolKind::ExchangedServer: return hatted(kHatS, 's', model.server_name(s.type));
    case SymbolKind::ExchangedCustomer: return hatted(kHatC, 'c', model.customer_name(s.type));
  }
  return "?";
}

std::string format_word(const MatchingModel& model, const Word& w) {
  if (w.empty()) return kEmpty;
  std::string out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) out += ' ';
    out += symbol_label(model, w[k]);
  }
  return out;
}

std::string format_state(const MatchingModel& model, ChainKind kind, const ChainState& st) {
  if (st.empty()) return kEmpty;
  if (!two_line(kind)) return format_word(model, st.first);
  return format_word(model, st.first) + " | " + format_word(model, st.second);
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Word parse_word(const MatchingModel& model, LineSide side, const std::string& text) {
  Word w;
  for (const std::string& tok : split_ws(text)) {
    if (tok == kEmpty) continue;
    const bool cust_line = side == LineSide::CustomerLine;
    const std::string& hat = cust_line ? kHatS : kHatC;
    if (tok.rfind(hat, 0) == 0) {
      std::string rest = tok.substr(hat.size());
      const char plain = cust_line ? 's' : 'c';
      auto lookup = [&](const std::string& n) {
        return cust_line ? model.server_index(n) : model.customer_index(n);
      };
      auto idx = lookup(std::string(1, plain) + rest);
      if (!idx) idx = lookup(rest);
      if (!idx) throw std::invalid_argument("unknown exchanged label '" + tok + "'");
      w.push_back(cust_line ? xserv(*idx) : xcust(*idx));
    } else {
      auto idx = cust_line ? model.customer_index(tok) : model.server_index(tok);
      if (!idx) throw std::invalid_argument("unknown label '" + tok + "'");
      w.push_back(cust_line ? cust(*idx) : serv(*idx));
    }
  }
  return w;
}

}  // namespace

ChainState parse_state(const MatchingModel& model, ChainKind kind, const std::string& text) {
  ChainState st;
  if (two_line(kind)) {
    auto bar = text.find('|');
    if (bar == std::string::npos) {
      if (split_ws(text).empty() || text.find(kEmpty) != std::string::npos) {
        st = {};
        for (const auto& tok : split_ws(text))
          if (tok != kEmpty) throw std::invalid_argument("two-line state needs 'first | second'");
        return st;
      }
      throw std::invalid_argument("two-line state needs 'first | second'");
    }
    st.first = parse_word(model, line_side(kind, 0), text.substr(0, bar));
    st.second = parse_word(model, line_side(kind, 1), text.substr(bar + 1));
  } else {
    st.first = parse_word(model, line_side(kind, 0), text);
  }
  return st;
}

}  // namespace fcfs
