#include "fcfs/model.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace fcfs {

int popcount(TypeMask m) { return std::popcount(m); }

std::optional<int> MatchingModel::customer_index(const std::string& name) const {
  for (int i = 0; i < num_customers(); ++i)
    if (customer_names_[i] == name) return i;
  return std::nullopt;
}

std::optional<int> MatchingModel::server_index(const std::string& name) const {
  for (int j = 0; j < num_servers(); ++j)
    if (server_names_[j] == name) return j;
  return std::nullopt;
}

double MatchingModel::alpha_of(TypeMask customers) const {
  double s = 0.0;
  for (int i = 0; i < num_customers(); ++i)
    if (has(customers, i)) s += alpha_[i];
  return s;
}

double MatchingModel::beta_of(TypeMask servers) const {
  double s = 0.0;
  for (int j = 0; j < num_servers(); ++j)
    if (has(servers, j)) s += beta_[j];
  return s;
}

TypeMask MatchingModel::servers_of(TypeMask customers) const {
  TypeMask out = 0;
  for (int i = 0; i < num_customers(); ++i)
    if (has(customers, i)) out |= cust_adj_[i];
  return out;
}

TypeMask MatchingModel::customers_of(TypeMask servers) const {
  TypeMask out = 0;
  for (int j = 0; j < num_servers(); ++j)
    if (has(servers, j)) out |= serv_adj_[j];
  return out;
}

TypeMask MatchingModel::unique_customers(TypeMask servers) const {
  return all_customers() & ~customers_of(all_servers() & ~servers);
}

TypeMask MatchingModel::unique_servers(TypeMask customers) const {
  return all_servers() & ~servers_of(all_customers() & ~customers);
}

MatchingModel MatchingModel::mirrored() const {
  MatchingModel m;
  m.customer_names_ = server_names_;
  m.server_names_ = customer_names_;
  m.alpha_ = beta_;
  m.beta_ = alpha_;
  m.cust_adj_ = serv_adj_;
  m.serv_adj_ = cust_adj_;
  return m;
}

std::vector<std::pair<int, int>> MatchingModel::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < num_customers(); ++i)
    for (int j = 0; j < num_servers(); ++j)
      if (compatible(i, j)) out.emplace_back(i, j);
  return out;
}

namespace {

void check_side(const std::vector<std::pair<std::string, double>>& entries, const char* field) {
  if (entries.empty()) throw ModelError(std::string(field) + ": at least one type is required");
  if (entries.size() > static_cast<std::size_t>(kMaxTypes))
    throw ModelError(std::string(field) + ": at most 64 types are supported");
  std::set<std::string> seen;
  double total = 0.0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& [name, p] = entries[k];
    std::string where = std::string(field) + "[" + std::to_string(k) + "]";
    if (name.empty()) throw ModelError(where + ".name: empty label");
    if (!seen.insert(name).second) throw ModelError(where + ".name: duplicate label '" + name + "'");
    if (!std::isfinite(p) || p <= 0.0)
      throw ModelError(where + ".prob: must be a finite positive number");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << field << ": probabilities sum to " << total << ", expected 1 within 1e-12";
    throw ModelError(os.str());
  }
}

}  // namespace

MatchingModel validate_model(const RawModel& raw) {
  check_side(raw.customers, "customers");
  check_side(raw.servers, "servers");

  MatchingModel m;
  for (const auto& [name, p] : raw.customers) {
    m.customer_names_.push_back(name);
    m.alpha_.push_back(p);
  }
  for (const auto& [name, p] : raw.servers) {
    m.server_names_.push_back(name);
    m.beta_.push_back(p);
  }
  m.cust_adj_.assign(m.alpha_.size(), 0);
  m.serv_adj_.assign(m.beta_.size(), 0);

  for (std::size_t k = 0; k < raw.edges.size(); ++k) {
    const auto& [cn, sn] = raw.edges[k];
    std::string where = "edges[" + std::to_string(k) + "]";
    auto i = m.customer_index(cn);
    if (!i) throw ModelError(where + ": unknown customer type '" + cn + "'");
    auto j = m.server_index(sn);
    if (!j) throw ModelError(where + ": unknown server type '" + sn + "'");
    if (m.compatible(*i, *j)) throw ModelError(where + ": duplicate edge " + cn + "-" + sn);
    m.cust_adj_[*i] |= bit(*j);
    m.serv_adj_[*j] |= bit(*i);
  }

  for (int i = 0; i < m.num_customers(); ++i)
    if (m.cust_adj_[i] == 0) throw ModelError("customer type '" + m.customer_names_[i] + "' is isolated");
  for (int j = 0; j < m.num_servers(); ++j)
    if (m.serv_adj_[j] == 0) throw ModelError("server type '" + m.server_names_[j] + "' is isolated");

  // Alternate closure from customer 0 until nothing new is reached.
  TypeMask cs = bit(0), ss = 0;
  for (;;) {
    TypeMask ss2 = m.servers_of(cs);
    TypeMask cs2 = m.customers_of(ss2);
    if (ss2 == ss && cs2 == cs) break;
    ss = ss2;
    cs = cs2;
  }
  if (cs != m.all_customers() || ss != m.all_servers())
    throw ModelError("compatibility graph is disconnected");
  return m;
}

TypeSubset neighbor_sets(const MatchingModel& model, const TypeSubset& subset, NeighborOp op) {
  const TypeMask side_mask =
      subset.side == Side::Customer ? model.all_customers() : model.all_servers();
  if (subset.members & ~side_mask) throw ModelError("subset has members outside its side");
  TypeSubset out;
  out.side = opposite(subset.side);
  if (subset.side == Side::Customer) {
    out.members = op == NeighborOp::Compatible ? model.servers_of(subset.members)
                                               : model.unique_servers(subset.members);
  } else {
    out.members = op == NeighborOp::Compatible ? model.customers_of(subset.members)
                                               : model.unique_customers(subset.members);
  }
  return out;
}

TypeSubset subset_from_labels(const MatchingModel& model, Side side,
                              const std::vector<std::string>& labels) {
  TypeSubset out{side, 0};
  for (const auto& l : labels) {
    auto idx = side == Side::Customer ? model.customer_index(l) : model.server_index(l);
    if (!idx) throw ModelError("unknown label '" + l + "'");
    out.members |= bit(*idx);
  }
  return out;
}

std::vector<std::string> subset_labels(const MatchingModel& model, const TypeSubset& subset) {
  std::vector<std::string> out;
  int n = subset.side == Side::Customer ? model.num_customers() : model.num_servers();
  for (int k = 0; k < n; ++k)
    if (has(subset.members, k))
      out.push_back(subset.side == Side::Customer ? model.customer_name(k) : model.server_name(k));
  return out;
}

double subset_mass(const MatchingModel& model, const TypeSubset& subset) {
  return subset.side == Side::Customer ? model.alpha_of(subset.members)
                                       : model.beta_of(subset.members);
}

CrpReport check_crp(const MatchingModel& model) {
  const int I = model.num_customers();
  const int J = model.num_servers();
  if (I > kMaxCrpTypes || J > kMaxCrpTypes)
    throw ModelError("exhaustive CRP check supports at most 25 types per side");

  constexpr double inf = std::numeric_limits<double>::infinity();
  CrpReport rep;
  rep.margin = inf;
  rep.tightest = TypeSubset{Side::Server, 0};

  // Third form, the one reported: beta_S > alpha_{U(S)}.
  const TypeMask allS = model.all_servers();
  for (TypeMask S = 1; S < allS; ++S) {
    double lhs = model.beta_of(S);
    double rhs = model.alpha_of(model.unique_customers(S));
    double gap = lhs - rhs;
    if (gap < rep.margin) {
      rep.margin = gap;
      rep.tightest = TypeSubset{Side::Server, S};
    }
    if (!(gap > 0.0)) rep.violations.push_back({TypeSubset{Side::Server, S}, lhs, rhs});
  }
  rep.holds = rep.violations.empty();

  double m1 = inf;  // beta_{S(C)} - alpha_C
  for (TypeMask C = 1; C < model.all_customers(); ++C)
    m1 = std::min(m1, model.beta_of(model.servers_of(C)) - model.alpha_of(C));
  double m2 = inf;  // alpha_{C(S)} - beta_S
  for (TypeMask S = 1; S < allS; ++S)
    m2 = std::min(m2, model.alpha_of(model.customers_of(S)) - model.beta_of(S));

  constexpr double tie = 1e-12;
  bool near_tie = std::abs(m1) <= tie || std::abs(m2) <= tie || std::abs(rep.margin) <= tie;
  if (!near_tie && ((m1 > 0) != rep.holds || (m2 > 0) != rep.holds))
    throw std::logic_error("resource pooling forms disagree");
  return rep;
}

}  // namespace fcfs
