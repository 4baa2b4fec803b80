#include <algorithm>
#include <cmath>
#include <string>

#include "fcfs/analytic.hpp"
#include "fcfs/summation.hpp"

namespace fcfs {

namespace {

// Truncated pmf of Geom_0 with ratio p: values 0..n with p^{n+1} below tail.
std::vector<double> geometric_pmf(double p, double tail) {
  if (p <= 0.0) return {1.0};
  std::vector<double> out;
  double v = 1.0 - p;
  double rest = 1.0;  // P(G >= k)
  while (rest >= tail) {
    out.push_back(v);
    v *= p;
    rest *= p;
  }
  return out;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = 0; y < b.size(); ++y) out[x + y] += a[x] * b[y];
  return out;
}

std::vector<double> sum_of_geometrics(const std::vector<double>& ratios, double tail) {
  std::vector<double> acc{1.0};
  for (double p : ratios) acc = convolve(acc, geometric_pmf(p, tail));
  return acc;
}

double total(const std::vector<double>& xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

// Per-permutation description of the mixture terms for one server type.
struct LevelTerm {
  double weight;  // excluding pi_R
  std::vector<double> pos, neg;
  int shift;
};

void check_focal(const MatchingModel& m, int server, std::optional<int> customer) {
  if (server < 0 || server >= m.num_servers()) throw std::invalid_argument("server type out of range");
  if (customer) {
    if (*customer < 0 || *customer >= m.num_customers())
      throw std::invalid_argument("customer type out of range");
    if (!m.compatible(*customer, server))
      throw std::invalid_argument("no link-length law for incompatible pair (" + m.customer_name(*customer) +
                                  ", " + m.server_name(server) + ")");
  }
}

std::vector<LevelTerm> level_terms(const MatchingModel& m, const PermutationContext& ctx, int j,
                                   std::optional<int> i, ConditionalForm form) {
  const int J = static_cast<int>(ctx.perm.size());
  FocalSplit f = focal_split(m, ctx, i ? *i : -1, j);
  const bool printed = i && form == ConditionalForm::Printed;

  std::vector<double> neg(J, 0.0);
  for (int k = 0; k + 1 < J; ++k) neg[k] = (1.0 - ctx.beta[k]) / (1.0 - ctx.alpha[k]);

  std::vector<LevelTerm> out;
  double lead = 1.0;
  std::vector<double> pos;
  for (int l = 0; l < J; ++l) {
    const double a = ctx.alpha[l], b = ctx.beta[l];
    const double phi = f.phi[l], psi = f.psi[l], chi = f.chi[l];
    double match, denom, ratio;
    if (printed) {
      match = a * phi;
      denom = b - a * (psi + chi);
      ratio = a * chi / (b - a * psi);
    } else {
      match = a * (i ? phi : phi + psi);
      denom = b - a * chi;
      ratio = a * chi / b;
    }
    pos.push_back(ratio);
    double w = match / denom * lead;
    if (w > 0.0) out.push_back({w, pos, std::vector<double>(neg.begin() + l, neg.end()), J - 1 - l});
    lead *= (b - a) / denom;
  }
  return out;
}

}  // namespace

double SignedGeometricMixture::total_mass() const {
  CompensatedSum s;
  for (const auto& c : comps_) s.add(c.weight);
  return s.value();
}

SignedGeometricMixture SignedGeometricMixture::normalized() const {
  double t = total_mass();
  if (!(t > 0.0)) throw std::domain_error("cannot normalize a mixture of zero mass");
  std::vector<MixtureComponent> cs = comps_;
  for (auto& c : cs) c.weight /= t;
  return SignedGeometricMixture(std::move(cs));
}

PmfTable SignedGeometricMixture::pmf_table(double tail) const {
  PmfTable t;
  if (comps_.empty()) return t;
  struct Piece {
    std::vector<double> pos, neg;
    int shift;
    double weight;
  };
  std::vector<Piece> pieces;
  long lo = 0, hi = 0;
  bool first = true;
  for (const auto& c : comps_) {
    Piece p{sum_of_geometrics(c.pos_ratios, tail), sum_of_geometrics(c.neg_ratios, tail), c.shift, c.weight};
    long plo = -static_cast<long>(p.neg.size() - 1) - c.shift;
    long phi = static_cast<long>(p.pos.size() - 1) - c.shift;
    lo = first ? plo : std::min(lo, plo);
    hi = first ? phi : std::max(hi, phi);
    first = false;
    pieces.push_back(std::move(p));
  }
  t.lo = lo;
  t.values.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  CompensatedSum dropped;
  for (const auto& p : pieces) {
    for (std::size_t x = 0; x < p.pos.size(); ++x)
      for (std::size_t y = 0; y < p.neg.size(); ++y) {
        long k = static_cast<long>(x) - p.shift - static_cast<long>(y);
        t.values[static_cast<std::size_t>(k - lo)] += p.weight * p.pos[x] * p.neg[y];
      }
    dropped.add(p.weight * (1.0 - total(p.pos) * total(p.neg)));
  }
  t.truncated = dropped.value();
  return t;
}

std::complex<double> SignedGeometricMixture::pgf(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (const auto& c : comps_) {
    std::complex<double> v = c.weight;
    for (double p : c.pos_ratios) {
      if (std::abs(p * z) >= 1.0) throw std::domain_error("pgf argument outside the convergence annulus");
      v *= (1.0 - p) / (1.0 - p * z);
    }
    for (double q : c.neg_ratios) {
      if (q == 0.0) continue;
      if (std::abs(q / z) >= 1.0) throw std::domain_error("pgf argument outside the convergence annulus");
      v *= (1.0 - q) / (1.0 - q / z);
    }
    v *= std::pow(z, -c.shift);
    acc += v;
  }
  return acc;
}

double SignedGeometricMixture::mean() const {
  CompensatedSum s;
  for (const auto& c : comps_) {
    double e = -static_cast<double>(c.shift);
    for (double p : c.pos_ratios) e += p / (1.0 - p);
    for (double q : c.neg_ratios) e -= q / (1.0 - q);
    s.add(c.weight * e);
  }
  return s.value() / total_mass();
}

SignedGeometricMixture link_length_distribution(const StationaryEvaluator& ev, int server,
                                                std::optional<int> customer, ConditionalForm form) {
  if (!ev.finite()) throw std::domain_error("link lengths have no stationary law: complete resource pooling fails");
  const MatchingModel& m = ev.model();
  check_focal(m, server, customer);
  const int J = m.num_servers();
  if (J > kMixtureCap)
    throw PermutationCapError("mixture materialization refused for " + std::to_string(J) +
                              " server types (cap " + std::to_string(kMixtureCap) + "); use pgf_eval");
  using Acc = std::vector<MixtureComponent>;
  auto parts = permutation_reduce<Acc>(J, resolve_threads(ev.options().threads, J), Acc{},
                                       [&](const std::vector<int>& perm, Acc& acc) {
                                         PermutationContext ctx = make_context(m, perm);
                                         const double piR = ev.pi_R(ctx);
                                         for (auto& t : level_terms(m, ctx, server, customer, form)) {
                                           MixtureComponent c;
                                           c.weight = piR * t.weight;
                                           c.pos_ratios = std::move(t.pos);
                                           c.neg_ratios = std::move(t.neg);
                                           c.shift = t.shift;
                                           c.perm = perm;
                                           c.level = J - t.shift;
                                           acc.push_back(std::move(c));
                                         }
                                       });
  Acc all;
  for (auto& p : parts)
    for (auto& c : p) all.push_back(std::move(c));
  return SignedGeometricMixture(std::move(all));
}

std::complex<double> pgf_eval(const StationaryEvaluator& ev, int server, std::optional<int> customer,
                              std::complex<double> z, ConditionalForm form) {
  if (!ev.finite()) throw std::domain_error("link lengths have no stationary law: complete resource pooling fails");
  const MatchingModel& m = ev.model();
  check_focal(m, server, customer);
  if (m.num_servers() > ev.options().perm_cap || m.num_customers() > ev.options().perm_cap)
    throw PermutationCapError("permutation sums refused above the cap of " + std::to_string(ev.options().perm_cap));
  if (z == 0.0) throw std::domain_error("pgf argument outside the convergence annulus");
  const int J = m.num_servers();
  const bool printed = customer && form == ConditionalForm::Printed;

  struct Acc {
    CompensatedSum re, im, mass;
    bool outside = false;
  };
  auto parts = permutation_reduce<Acc>(
      J, resolve_threads(ev.options().threads, J), Acc{}, [&](const std::vector<int>& perm, Acc& acc) {
        PermutationContext ctx = make_context(m, perm);
        FocalSplit f = focal_split(m, ctx, customer ? *customer : -1, server);
        const double piR = ev.pi_R(ctx);
        // H factors for levels l..J, built from the top level down
        // only factors of terms with positive weight restrict the annulus
        std::vector<std::complex<double>> hprod(J + 1, 1.0);
        std::vector<char> hbad(J + 1, 0);
        for (int k = J - 1; k >= 0; --k) {
          std::complex<double> h = 1.0;
          hbad[k] = hbad[k + 1];
          if (k + 1 < J) {
            double a = ctx.alpha[k], b = ctx.beta[k];
            if (std::abs((1.0 - b) / z) >= 1.0 - a) hbad[k] = 1;
            h = (b - a) / ((1.0 - a) - (1.0 - b) / z);
          }
          hprod[k] = hprod[k + 1] * h;
        }
        std::complex<double> gprod = 1.0;
        bool gbad = false;
        double lead = 1.0;
        for (int l = 0; l < J; ++l) {
          const double a = ctx.alpha[l], b = ctx.beta[l];
          const double phi = f.phi[l], psi = f.psi[l], chi = f.chi[l];
          double match, denom, keep, skip;
          if (printed) {
            match = a * phi;
            denom = b - a * (psi + chi);
            keep = b - a * psi;
          } else {
            match = a * (customer ? phi : phi + psi);
            denom = b - a * chi;
            keep = b;
          }
          skip = a * chi;
          if (skip > 0.0 && std::abs(skip * z) >= keep) gbad = true;
          // (keep - skip) / (keep - skip z): pgf of one G factor
          gprod *= (keep - skip) / (keep - skip * z);
          const double w = piR * match / denom * lead;
          if (w > 0.0) {
            if (gbad || hbad[l]) acc.outside = true;
            std::complex<double> v = w * gprod * hprod[l] * std::pow(z, -(J - 1 - l));
            acc.re.add(v.real());
            acc.im.add(v.imag());
            acc.mass.add(w);
          }
          lead *= (b - a) / denom;
        }
      });
  CompensatedSum re, im, mass;
  bool outside = false;
  for (const auto& p : parts) {
    re.add(p.re);
    im.add(p.im);
    mass.add(p.mass);
    outside = outside || p.outside;
  }
  if (outside) throw std::domain_error("pgf argument outside the convergence annulus");
  std::complex<double> v(re.value(), im.value());
  return customer ? v / mass.value() : v;
}

}  // namespace fcfs
