#ifndef FCFS_MODEL_HPP
#define FCFS_MODEL_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fcfs {

// Bit i set <=> type i is a member. Types are dense indices in declaration order.
using TypeMask = std::uint64_t;

inline constexpr int kMaxTypes = 64;

inline TypeMask bit(int i) { return TypeMask{1} << i; }
inline TypeMask full_mask(int n) { return n >= 64 ? ~TypeMask{0} : bit(n) - 1; }
inline bool has(TypeMask m, int i) { return (m >> i) & 1U; }
int popcount(TypeMask m);

enum class Side { Customer, Server };

inline Side opposite(Side s) { return s == Side::Customer ? Side::Server : Side::Customer; }

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unvalidated description, as read from a model file.
struct RawModel {
  std::vector<std::pair<std::string, double>> customers;
  std::vector<std::pair<std::string, double>> servers;
  std::vector<std::pair<std::string, std::string>> edges;
};

class MatchingModel {
 public:
  int num_customers() const { return static_cast<int>(alpha_.size()); }
  int num_servers() const { return static_cast<int>(beta_.size()); }

  double alpha(int i) const { return alpha_[i]; }
  double beta(int j) const { return beta_[j]; }
  const std::vector<double>& alphas() const { return alpha_; }
  const std::vector<double>& betas() const { return beta_; }

  const std::string& customer_name(int i) const { return customer_names_[i]; }
  const std::string& server_name(int j) const { return server_names_[j]; }
  const std::vector<std::string>& customer_names() const { return customer_names_; }
  const std::vector<std::string>& server_names() const { return server_names_; }
  std::optional<int> customer_index(const std::string& name) const;
  std::optional<int> server_index(const std::string& name) const;

  bool compatible(int i, int j) const { return has(cust_adj_[i], j); }
  TypeMask servers_of_customer(int i) const { return cust_adj_[i]; }
  TypeMask customers_of_server(int j) const { return serv_adj_[j]; }

  TypeMask all_customers() const { return full_mask(num_customers()); }
  TypeMask all_servers() const { return full_mask(num_servers()); }

  double alpha_of(TypeMask customers) const;
  double beta_of(TypeMask servers) const;

  // S(C): servers compatible with some customer type in C.
  TypeMask servers_of(TypeMask customers) const;
  // C(S): customers compatible with some server type in S.
  TypeMask customers_of(TypeMask servers) const;
  // U(S): customer types that only servers in S can serve.
  TypeMask unique_customers(TypeMask servers) const;
  // Mirror of U: server types that only customers in C can feed.
  TypeMask unique_servers(TypeMask customers) const;

  // Same model with the roles of customers and servers swapped.
  MatchingModel mirrored() const;

  std::vector<std::pair<int, int>> edges() const;

  friend MatchingModel validate_model(const RawModel& raw);

 private:
  std::vector<std::string> customer_names_;
  std::vector<std::string> server_names_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<TypeMask> cust_adj_;
  std::vector<TypeMask> serv_adj_;
};

MatchingModel validate_model(const RawModel& raw);

RawModel parse_model_json(const std::string& text);
MatchingModel load_model_json(const std::string& text);
MatchingModel load_model_file(const std::string& path);
std::string model_to_json(const MatchingModel& model);

struct TypeSubset {
  Side side = Side::Customer;
  TypeMask members = 0;
};

enum class NeighborOp { Compatible, Unique };

// Compatible: S(C) or C(S). Unique: U(S) for a server subset, the mirror for a customer subset.
TypeSubset neighbor_sets(const MatchingModel& model, const TypeSubset& subset,
                         NeighborOp op = NeighborOp::Compatible);
TypeSubset subset_from_labels(const MatchingModel& model, Side side,
                              const std::vector<std::string>& labels);
std::vector<std::string> subset_labels(const MatchingModel& model, const TypeSubset& subset);
double subset_mass(const MatchingModel& model, const TypeSubset& subset);

struct CrpViolation {
  TypeSubset subset;
  double lhs = 0.0;  // beta_S
  double rhs = 0.0;  // alpha_{U(S)}
};

struct CrpReport {
  bool holds = false;
  std::vector<CrpViolation> violations;
  // min over proper nonempty S of beta_S - alpha_{U(S)}
  double margin = 0.0;
  TypeSubset tightest;
};

inline constexpr int kMaxCrpTypes = 25;

CrpReport check_crp(const MatchingModel& model);

}  // namespace fcfs

#endif  // FCFS_MODEL_HPP
