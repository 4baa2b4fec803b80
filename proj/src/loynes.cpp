#include "fcfs/loynes.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "fcfs/sim.hpp"

namespace fcfs {

WindowRun window_links(const MatchingModel& model, const DrivingSequence& seq, Pos start, Pos window_begin,
                       Pos window_end, Pos max_run) {
  if (start > window_begin) throw std::invalid_argument("run must start at or before the window");
  PairwiseMatcher pm(model, seq, start);
  WindowRun run;
  std::vector<MatchRecord> buf;
  auto in_window = [&](Pos p) { return p >= window_begin && p < window_end; };
  while (pm.position() < window_end || pm.earliest_unmatched() < window_end) {
    if (pm.position() - window_end > max_run)
      throw LoynesError("window items still unmatched after " + std::to_string(max_run) + " extra pairs", {}, {});
    buf.clear();
    bool empty = pm.advance(&buf);
    for (const MatchRecord& r : buf)
      if (in_window(r.customer_pos) || in_window(r.server_pos)) run.links.push_back({r.customer_pos, r.server_pos});
    if (empty && pm.position() <= window_begin) {
      run.regenerated = true;
      run.regeneration = pm.position();
    }
  }
  std::sort(run.links.begin(), run.links.end());
  return run;
}

LoynesResult loynes_window(const MatchingModel& model, std::uint64_t seed, const LoynesOptions& opts) {
  if (opts.window_end <= opts.window_begin) throw std::invalid_argument("empty window");
  if (opts.k0 <= 0) throw std::invalid_argument("k0 must be positive");
  if (!check_crp(model).holds)
    throw std::domain_error("complete resource pooling fails: backward coupling does not converge");
  DrivingSequence seq(model, seed);
  Pos k = std::max(opts.k0, -opts.window_begin);
  WindowRun older;
  WindowRun prev = window_links(model, seq, -k, opts.window_begin, opts.window_end, opts.max_run);
  for (int d = 1; d <= opts.max_doublings; ++d) {
    k *= 2;
    WindowRun cur = window_links(model, seq, -k, opts.window_begin, opts.window_end, opts.max_run);
    if (cur.links == prev.links && cur.regenerated) {
      LoynesResult res;
      res.links = std::move(cur.links);
      res.k = k;
      res.regeneration = cur.regeneration;
      res.doublings = d;
      return res;
    }
    older = std::move(prev);
    prev = std::move(cur);
  }
  throw LoynesError("no stabilization within " + std::to_string(opts.max_doublings) + " doublings", older.links,
                    prev.links);
}

}  // namespace fcfs
