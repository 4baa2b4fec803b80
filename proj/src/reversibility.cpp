#include "fcfs/reversibility.hpp"

#include <algorithm>

#include "fcfs/sim.hpp"

namespace fcfs {

bool ReversibilityReport::passed(double level) const {
  return std::all_of(tests.begin(), tests.end(), [&](const ChiSquareResult& t) { return t.p_value >= level; });
}

namespace {

std::vector<double> outer(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  for (double x : a)
    for (double y : b) out.push_back(x * y);
  return out;
}

}  // namespace

ReversibilityReport reversibility_suite(const MatchingModel& model, std::uint64_t seed, long blocks) {
  if (!check_crp(model).holds) throw std::domain_error("complete resource pooling fails: blocks are not finite");
  const int I = model.num_customers();
  const int J = model.num_servers();
  DrivingSequence seq(model, seed);
  PairwiseMatcher pm(model, seq, 0);
  ReversibilityReport rep;
  rep.seed = seed;

  std::vector<int> xc, xs;  // exchanged customers (server line), exchanged servers (customer line)
  std::vector<MatchRecord> recs, buf;
  for (long b = 0; b < blocks; ++b) {
    const Pos begin = pm.position();
    recs.clear();
    bool done = false;
    while (!done) {
      buf.clear();
      done = pm.advance(&buf);
      recs.insert(recs.end(), buf.begin(), buf.end());
    }
    const Pos end = pm.position();
    ItemSequence block;
    block.base_index = begin;
    for (Pos p = begin; p < end; ++p) {
      block.customers.push_back(seq.customer(p));
      block.servers.push_back(seq.server(p));
    }
    Matching m;
    for (const MatchRecord& r : recs) m.links.push_back({r.customer_pos, r.server_pos});
    std::sort(m.links.begin(), m.links.end());
    if (!reversed_rematch_check(model, block, m))
      throw ReversibilityError("reversed FCFS rematch differs from the retained links in block [" +
                                   std::to_string(begin) + ", " + std::to_string(end) + ")",
                               block);
    ++rep.link_checks;
    ExchangedPath path = exchange_transform(block, m);
    for (const LineItem& it : path.customer_line) xs.push_back(it.type);
    for (const LineItem& it : path.server_line) xc.push_back(it.type);
    rep.pairs += end - begin;
  }
  rep.blocks = blocks;

  std::vector<long> mc(I), ms(J), pc(I * I), ps(J * J), cross(I * J);
  for (int t : xc) ++mc[t];
  for (int t : xs) ++ms[t];
  for (std::size_t k = 0; k + 1 < xc.size(); k += 2) ++pc[xc[k] * I + xc[k + 1]];
  for (std::size_t k = 0; k + 1 < xs.size(); k += 2) ++ps[xs[k] * J + xs[k + 1]];
  for (std::size_t k = 0; k < xc.size(); ++k) ++cross[xc[k] * J + xs[k]];
  rep.tests.push_back(chi_square_gof("exchanged customer marginal", mc, model.alphas()));
  rep.tests.push_back(chi_square_gof("exchanged server marginal", ms, model.betas()));
  rep.tests.push_back(chi_square_gof("exchanged customer lag-1 pairs", pc, outer(model.alphas(), model.alphas())));
  rep.tests.push_back(chi_square_gof("exchanged server lag-1 pairs", ps, outer(model.betas(), model.betas())));
  rep.tests.push_back(chi_square_gof("exchanged cross-line pairs", cross, outer(model.alphas(), model.betas())));
  return rep;
}

}  // namespace fcfs
