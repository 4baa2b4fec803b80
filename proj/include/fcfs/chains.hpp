#ifndef FCFS_CHAINS_HPP
#define FCFS_CHAINS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fcfs/model.hpp"

namespace fcfs {

enum class SymbolKind : std::uint8_t { Customer, ExchangedServer, Server, ExchangedCustomer };

struct Symbol {
  SymbolKind kind = SymbolKind::Customer;
  std::uint8_t type = 0;
  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

inline Symbol cust(int i) { return {SymbolKind::Customer, static_cast<std::uint8_t>(i)}; }
inline Symbol serv(int j) { return {SymbolKind::Server, static_cast<std::uint8_t>(j)}; }
inline Symbol xcust(int i) { return {SymbolKind::ExchangedCustomer, static_cast<std::uint8_t>(i)}; }
inline Symbol xserv(int j) { return {SymbolKind::ExchangedServer, static_cast<std::uint8_t>(j)}; }

// True for symbols whose type is a customer type.
inline bool customer_typed(Symbol s) {
  return s.kind == SymbolKind::Customer || s.kind == SymbolKind::ExchangedCustomer;
}
inline bool exchanged(Symbol s) {
  return s.kind == SymbolKind::ExchangedServer || s.kind == SymbolKind::ExchangedCustomer;
}

using Word = std::vector<Symbol>;

// Reverse the word and flip every symbol to the other line:
// customer <-> exchanged customer, server <-> exchanged server.
Word reverse_dual(const Word& w);

enum class ChainKind {
  Zs,           // server by server, detailed
  Zc,           // customer by customer, detailed
  D,            // pair by pair, backwards detailed: (z customer line, y server line)
  E,            // pair by pair, forwards detailed: (y customer line, z server line)
  Qs,           // unmatched customers
  Qc,           // unmatched servers
  O,            // unmatched customers and servers, pair by pair
  ZsAugmented,  // Zs word preceded by exchanged servers back to the last occurrence of every type
  ZsOuter       // augmented word followed by customers until every customer type is present
};

const char* chain_kind_name(ChainKind k);
ChainKind parse_chain_kind(const std::string& name);
bool two_line(ChainKind k);
bool has_kernel(ChainKind k);

struct ChainState {
  Word first;
  Word second;
  bool empty() const { return first.empty() && second.empty(); }
  std::size_t length() const { return first.size() + second.size(); }
  friend bool operator==(const ChainState&, const ChainState&) = default;
  friend auto operator<=>(const ChainState&, const ChainState&) = default;
};

// Product of alpha over customer-typed symbols and beta over server-typed symbols.
double product_weight(const MatchingModel& model, const ChainState& s);

bool is_valid_state(const MatchingModel& model, ChainKind kind, const ChainState& state);

// On-demand i.i.d. draws, one stream per line.
class InnovationSource {
 public:
  virtual ~InnovationSource() = default;
  virtual int next_customer() = 0;
  virtual int next_server() = 0;
};

// Fixed draws; throws std::out_of_range when exhausted.
class ScriptedInnovations : public InnovationSource {
 public:
  ScriptedInnovations(std::vector<int> customers, std::vector<int> servers)
      : customers_(std::move(customers)), servers_(std::move(servers)) {}
  int next_customer() override;
  int next_server() override;
  std::size_t customers_used() const { return ci_; }
  std::size_t servers_used() const { return si_; }

 private:
  std::vector<int> customers_, servers_;
  std::size_t ci_ = 0, si_ = 0;
};

// Thrown when a pair-by-pair step leaves exactly one line empty.
class ChainInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

ChainState step(const MatchingModel& model, ChainKind kind, const ChainState& state,
                InnovationSource& innovations);

struct Successors {
  std::vector<std::pair<ChainState, double>> states;  // sorted by state, merged
  double tail_mass = 0.0;                              // runs longer than max_appended
};

// max_appended bounds the number of skipped raw items appended by each scan.
Successors successors(const MatchingModel& model, ChainKind kind, const ChainState& state,
                      int max_appended);

double transition_probability(const MatchingModel& model, ChainKind kind, const ChainState& from,
                              const ChainState& to);

inline constexpr int kEnumerationCap = 8;

// Two-line kinds count the total length of both words.
std::vector<ChainState> enumerate_states(const MatchingModel& model, ChainKind kind, int max_len,
                                         int cap = kEnumerationCap);

ChainState zs_to_d(const MatchingModel& model, const ChainState& zs);
ChainState d_to_zs(const MatchingModel& model, const ChainState& d);
ChainState d_to_e(const MatchingModel& model, const ChainState& d);
ChainState e_to_d(const MatchingModel& model, const ChainState& e);

// Natural-chain view of a detailed state: drops the exchanged items.
ChainState natural_projection(ChainKind detailed, const ChainState& state);

std::string symbol_label(const MatchingModel& model, Symbol s);
std::string format_word(const MatchingModel& model, const Word& w);
std::string format_state(const MatchingModel& model, ChainKind kind, const ChainState& state);
// Tokens without a hat are unmatched items of the line; "ŝ"/"ĉ" marks exchanged ones.
ChainState parse_state(const MatchingModel& model, ChainKind kind, const std::string& text);

}  // namespace fcfs

#endif  // FCFS_CHAINS_HPP
