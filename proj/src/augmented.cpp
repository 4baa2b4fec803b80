#include "fcfs/augmented.hpp"

#include <algorithm>
#include <stdexcept>

namespace fcfs {

AugmentedState to_augmented(const MatchingModel& model, const Word& word) {
  const int J = model.num_servers();
  std::vector<long> last(J, -1);
  for (std::size_t k = 0; k < word.size(); ++k) {
    const Symbol s = word[k];
    if (s.kind == SymbolKind::ExchangedServer) {
      if (s.type >= J) throw std::invalid_argument("server type out of range");
      last[s.type] = static_cast<long>(k);
    } else if (s.kind != SymbolKind::Customer) {
      throw std::invalid_argument("augmented words hold customers and exchanged servers only");
    } else if (s.type >= model.num_customers()) {
      throw std::invalid_argument("customer type out of range");
    }
  }
  for (int j = 0; j < J; ++j)
    if (last[j] < 0) throw std::invalid_argument("word lacks an exchanged server of type " + model.server_name(j));

  AugmentedState aug;
  aug.perm.resize(J);
  for (int j = 0; j < J; ++j) aug.perm[j] = j;
  std::sort(aug.perm.begin(), aug.perm.end(), [&](int a, int b) { return last[a] < last[b]; });
  if (last[aug.perm.front()] != 0)
    throw std::invalid_argument("word must begin at the earliest last-occurrence server");
  for (int l = 0; l + 1 < J; ++l)
    aug.between.emplace_back(word.begin() + last[aug.perm[l]] + 1, word.begin() + last[aug.perm[l + 1]]);
  aug.tail.assign(word.begin() + last[aug.perm.back()] + 1, word.end());
  return aug;
}

const char* marginal_kind_name(MarginalKind k) {
  switch (k) {
    case MarginalKind::W: return "W";
    case MarginalKind::X: return "X";
    case MarginalKind::Y: return "Y";
    case MarginalKind::U: return "U";
    case MarginalKind::V: return "V";
    case MarginalKind::R: return "R";
  }
  return "?";
}

MarginalKind parse_marginal_kind(const std::string& name) {
  for (MarginalKind k : {MarginalKind::W, MarginalKind::X, MarginalKind::Y, MarginalKind::U,
                         MarginalKind::V, MarginalKind::R})
    if (name == marginal_kind_name(k)) return k;
  throw std::invalid_argument("unknown marginal kind '" + name + "'");
}

MarginalValue project(MarginalKind kind, const AugmentedState& aug) {
  MarginalValue v;
  v.kind = kind;
  v.perm = aug.perm;
  for (const Word& w : aug.between) {
    long c = std::count_if(w.begin(), w.end(), [](Symbol s) { return s.kind == SymbolKind::Customer; });
    long x = static_cast<long>(w.size()) - c;
    switch (kind) {
      case MarginalKind::W: {
        std::vector<bool> p;
        for (Symbol s : w) p.push_back(s.kind == SymbolKind::ExchangedServer);
        v.pattern.push_back(p);
        break;
      }
      case MarginalKind::X: v.n.push_back(c); break;
      case MarginalKind::Y: v.m.push_back(x); break;
      case MarginalKind::U:
        v.n.push_back(c);
        v.m.push_back(x);
        break;
      case MarginalKind::V: v.r.push_back(c + x); break;
      case MarginalKind::R: break;
    }
  }
  return v;
}

void check_marginal_shape(int num_servers, const MarginalValue& v) {
  const std::size_t levels = static_cast<std::size_t>(num_servers - 1);
  std::vector<int> sorted = v.perm;
  std::sort(sorted.begin(), sorted.end());
  for (int j = 0; j < num_servers; ++j)
    if (static_cast<int>(sorted.size()) != num_servers || sorted[j] != j)
      throw std::invalid_argument("marginal value needs a permutation of all server types");
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("marginal value: ") + what);
  };
  auto nonneg = [](const std::vector<long>& xs) {
    return std::all_of(xs.begin(), xs.end(), [](long x) { return x >= 0; });
  };
  switch (v.kind) {
    case MarginalKind::W: need(v.pattern.size() == levels, "W needs one pattern per level"); break;
    case MarginalKind::X: need(v.n.size() == levels && nonneg(v.n), "X needs one count n per level"); break;
    case MarginalKind::Y: need(v.m.size() == levels && nonneg(v.m), "Y needs one count m per level"); break;
    case MarginalKind::U:
      need(v.n.size() == levels && v.m.size() == levels && nonneg(v.n) && nonneg(v.m),
           "U needs counts n and m per level");
      break;
    case MarginalKind::V: need(v.r.size() == levels && nonneg(v.r), "V needs one count r per level"); break;
    case MarginalKind::R: break;
  }
}

}  // namespace fcfs
