#include "fcfs/analytic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fcfs/summation.hpp"

namespace fcfs {

namespace {

void check_cap(const MatchingModel& model, int cap) {
  if (model.num_servers() > cap || model.num_customers() > cap)
    throw PermutationCapError("permutation sums refused: " + std::to_string(model.num_customers()) +
                              " customer and " + std::to_string(model.num_servers()) +
                              " server types exceed the cap of " + std::to_string(cap));
}

struct FormAcc {
  CompensatedSum sum;
  bool ok = true;
};

FormAcc merge(const std::vector<FormAcc>& parts) {
  FormAcc out;
  for (const auto& p : parts) {
    out.sum.add(p.sum);
    out.ok = out.ok && p.ok;
  }
  return out;
}

void require_finite(const StationaryEvaluator& ev) {
  if (!ev.finite())
    throw std::domain_error("stationary laws do not exist: complete resource pooling fails");
}

}  // namespace

PermutationContext make_context(const MatchingModel& model, const std::vector<int>& perm) {
  const int J = model.num_servers();
  PermutationContext ctx;
  ctx.perm = perm;
  TypeMask prefix = 0;
  for (int k = 0; k < J; ++k) {
    prefix |= bit(perm[k]);
    TypeMask u = model.unique_customers(prefix);
    ctx.prefix.push_back(prefix);
    ctx.unique.push_back(u);
    ctx.alpha.push_back(model.alpha_of(u));
    ctx.beta.push_back(model.beta_of(prefix));
  }
  if (J > 0) {
    ctx.alpha.back() = 1.0;
    ctx.beta.back() = 1.0;
  }
  return ctx;
}

FocalSplit focal_split(const MatchingModel& model, const PermutationContext& ctx, int i, int j) {
  const std::size_t J = ctx.perm.size();
  FocalSplit f;
  f.phi.assign(J, 0.0);
  f.psi.assign(J, 0.0);
  f.chi.assign(J, 0.0);
  const TypeMask cj = model.customers_of_server(j);
  const TypeMask focal = i < 0 ? cj : (model.compatible(i, j) ? bit(i) : TypeMask{0});
  for (std::size_t k = 0; k < J; ++k) {
    const double a = ctx.alpha[k];
    if (a <= 0.0) continue;
    const TypeMask u = ctx.unique[k];
    f.phi[k] = model.alpha_of(u & focal) / a;
    f.psi[k] = model.alpha_of(u & cj & ~focal) / a;
    f.chi[k] = model.alpha_of(u & ~cj) / a;
  }
  return f;
}

NormalizingConstant normalizing_constant(const MatchingModel& model, const EvaluatorOptions& opts) {
  check_cap(model, opts.perm_cap);
  const int I = model.num_customers();
  const int J = model.num_servers();

  auto server_parts = permutation_reduce<FormAcc>(
      J, resolve_threads(opts.threads, J), FormAcc{}, [&](const std::vector<int>& perm, FormAcc& acc) {
        TypeMask prefix = 0;
        double term = 1.0;
        for (int l = 0; l + 1 < J; ++l) {
          prefix |= bit(perm[l]);
          double d = model.beta_of(prefix) - model.alpha_of(model.unique_customers(prefix));
          if (!(d > 0.0)) {
            acc.ok = false;
            return;
          }
          term /= d;
        }
        acc.sum.add(term);
      });
  auto customer_parts = permutation_reduce<FormAcc>(
      I, resolve_threads(opts.threads, I), FormAcc{}, [&](const std::vector<int>& perm, FormAcc& acc) {
        TypeMask prefix = 0;
        double term = 1.0;
        for (int l = 0; l + 1 < I; ++l) {
          prefix |= bit(perm[l]);
          double d = model.beta_of(model.servers_of(prefix)) - model.alpha_of(prefix);
          if (!(d > 0.0)) {
            acc.ok = false;
            return;
          }
          term /= d;
        }
        acc.sum.add(term);
      });
  FormAcc s = merge(server_parts);
  FormAcc c = merge(customer_parts);

  double prod_beta = 1.0, prod_alpha = 1.0;
  for (double b : model.betas()) prod_beta *= b;
  for (double a : model.alphas()) prod_alpha *= a;

  NormalizingConstant nc;
  const double inf = std::numeric_limits<double>::infinity();
  nc.server_form = s.ok ? prod_beta * s.sum.value() : inf;
  nc.customer_form = c.ok ? prod_alpha * c.sum.value() : inf;
  nc.finite = s.ok && c.ok;
  if (!nc.finite) return nc;
  double diff = std::abs(nc.server_form - nc.customer_form);
  if (diff > 1e-10 * std::max(1.0, std::abs(nc.server_form)))
    throw std::logic_error("server and customer forms of 1/B disagree: " + std::to_string(nc.server_form) +
                           " vs " + std::to_string(nc.customer_form));
  nc.B = 1.0 / nc.server_form;
  nc.Bs = nc.B * prod_beta;
  return nc;
}

StationaryEvaluator::StationaryEvaluator(MatchingModel model, EvaluatorOptions opts)
    : model_(std::move(model)), opts_(opts), nc_(normalizing_constant(model_, opts_)) {}

double StationaryEvaluator::pi_R(const PermutationContext& ctx) const {
  double p = nc_.Bs;
  for (std::size_t l = 0; l + 1 < ctx.perm.size(); ++l) p /= ctx.beta[l] - ctx.alpha[l];
  return p;
}

double pi_natural(const StationaryEvaluator& ev, ChainKind kind, const ChainState& state) {
  require_finite(ev);
  const MatchingModel& m = ev.model();
  auto check_line = [&](const Word& w, SymbolKind want) {
    for (Symbol s : w) {
      int limit = want == SymbolKind::Customer ? m.num_customers() : m.num_servers();
      if (s.kind != want || s.type >= limit)
        throw std::invalid_argument(std::string("invalid ") + chain_kind_name(kind) + " state");
    }
  };
  double p = ev.B();
  switch (kind) {
    case ChainKind::Qs: {
      if (!state.second.empty()) throw std::invalid_argument("qs states have one line");
      check_line(state.first, SymbolKind::Customer);
      TypeMask cs = 0;
      for (Symbol s : state.first) {
        cs |= bit(s.type);
        p *= m.alpha(s.type) / m.beta_of(m.servers_of(cs));
      }
      return p * (1.0 - m.beta_of(m.servers_of(cs)));
    }
    case ChainKind::Qc: {
      if (!state.second.empty()) throw std::invalid_argument("qc states have one line");
      check_line(state.first, SymbolKind::Server);
      TypeMask ss = 0;
      for (Symbol s : state.first) {
        ss |= bit(s.type);
        p *= m.beta(s.type) / m.alpha_of(m.customers_of(ss));
      }
      return p * (1.0 - m.alpha_of(m.customers_of(ss)));
    }
    case ChainKind::O: {
      check_line(state.first, SymbolKind::Customer);
      check_line(state.second, SymbolKind::Server);
      if (!is_valid_state(m, ChainKind::O, state)) return 0.0;
      TypeMask cs = 0, ss = 0;
      for (std::size_t l = 0; l < state.first.size(); ++l) {
        Symbol c = state.first[l], s = state.second[l];
        cs |= bit(c.type);
        ss |= bit(s.type);
        p *= m.alpha(c.type) / m.beta_of(m.servers_of(cs));
        p *= m.beta(s.type) / m.alpha_of(m.customers_of(ss));
      }
      return p;
    }
    default: throw std::invalid_argument(std::string(chain_kind_name(kind)) + " is not a natural chain");
  }
}

double pi_detailed(const StationaryEvaluator& ev, ChainKind kind, const ChainState& state) {
  if (kind == ChainKind::Qs || kind == ChainKind::Qc || kind == ChainKind::O) return pi_natural(ev, kind, state);
  require_finite(ev);
  if (!is_valid_state(ev.model(), kind, state))
    throw std::invalid_argument(std::string("invalid ") + chain_kind_name(kind) + " state: " +
                                format_state(ev.model(), kind, state));
  return ev.B() * product_weight(ev.model(), state);
}

double pi_marginal(const StationaryEvaluator& ev, const MarginalValue& v) {
  require_finite(ev);
  const MatchingModel& m = ev.model();
  check_marginal_shape(m.num_servers(), v);
  PermutationContext ctx = make_context(m, v.perm);
  double p = ev.Bs();
  const std::size_t levels = v.perm.size() - 1;
  for (std::size_t l = 0; l < levels; ++l) {
    const double a = ctx.alpha[l];
    const double b = ctx.beta[l];
    const double rest = 1.0 - b;  // beta of the later servers
    switch (v.kind) {
      case MarginalKind::W:
        for (bool server : v.pattern[l]) p *= server ? rest : a;
        break;
      case MarginalKind::U: {
        double n = static_cast<double>(v.n[l]), mm = static_cast<double>(v.m[l]);
        double binom = std::exp(std::lgamma(n + mm + 1) - std::lgamma(n + 1) - std::lgamma(mm + 1));
        p *= std::round(binom) * std::pow(a, n) * std::pow(rest, mm);
        break;
      }
      case MarginalKind::X: p *= std::pow(a, static_cast<double>(v.n[l])) / std::pow(b, v.n[l] + 1.0); break;
      case MarginalKind::Y:
        p *= std::pow(rest, static_cast<double>(v.m[l])) / std::pow(1.0 - a, v.m[l] + 1.0);
        break;
      case MarginalKind::V: p *= std::pow(a + rest, static_cast<double>(v.r[l])); break;
      case MarginalKind::R: p /= b - a; break;
    }
  }
  return p;
}

double pi_conditional_on_R(const StationaryEvaluator& ev, const MarginalValue& v) {
  require_finite(ev);
  const MatchingModel& m = ev.model();
  check_marginal_shape(m.num_servers(), v);
  if (v.kind != MarginalKind::X && v.kind != MarginalKind::Y)
    throw std::invalid_argument("conditional laws given R exist for X and Y only");
  PermutationContext ctx = make_context(m, v.perm);
  double p = 1.0;
  for (std::size_t l = 0; l + 1 < v.perm.size(); ++l) {
    double ratio = v.kind == MarginalKind::X ? ctx.alpha[l] / ctx.beta[l]
                                             : (1.0 - ctx.beta[l]) / (1.0 - ctx.alpha[l]);
    double count = static_cast<double>(v.kind == MarginalKind::X ? v.n[l] : v.m[l]);
    p *= std::pow(ratio, count) * (1.0 - ratio);
  }
  return p;
}

RateMatrix matching_rates(const StationaryEvaluator& ev) {
  require_finite(ev);
  const MatchingModel& m = ev.model();
  check_cap(m, ev.options().perm_cap);
  const int I = m.num_customers();
  const int J = m.num_servers();
  using Acc = std::vector<CompensatedSum>;
  auto parts = permutation_reduce<Acc>(
      J, resolve_threads(ev.options().threads, J), Acc(static_cast<std::size_t>(I) * J),
      [&](const std::vector<int>& perm, Acc& acc) {
        PermutationContext ctx = make_context(m, perm);
        const double piR = ev.pi_R(ctx);
        for (int j = 0; j < J; ++j) {
          FocalSplit all = focal_split(m, ctx, -1, j);
          // rho_l and the per-level denominators do not depend on the customer type
          std::vector<double> lead(J), denom(J);
          double prod = 1.0;
          for (int k = 0; k < J; ++k) {
            lead[k] = prod;
            denom[k] = ctx.beta[k] - ctx.alpha[k] * all.chi[k];
            prod *= (ctx.beta[k] - ctx.alpha[k]) / denom[k];
          }
          for (int i = 0; i < I; ++i) {
            if (!m.compatible(i, j)) continue;
            FocalSplit f = focal_split(m, ctx, i, j);
            double s = 0.0;
            for (int k = 0; k + 1 < J; ++k) s += f.phi[k] * ctx.alpha[k] / denom[k] * lead[k];
            s += f.phi[J - 1] / (f.phi[J - 1] + f.psi[J - 1]) * lead[J - 1];
            acc[static_cast<std::size_t>(i) * J + j].add(m.beta(j) * piR * s);
          }
        }
      });
  RateMatrix rm;
  rm.customers = I;
  rm.servers = J;
  rm.r.assign(static_cast<std::size_t>(I) * J, 0.0);
  for (std::size_t x = 0; x < rm.r.size(); ++x) {
    CompensatedSum total;
    for (const Acc& a : parts) total.add(a[x]);
    rm.r[x] = total.value();
  }
  return rm;
}

}  // namespace fcfs
