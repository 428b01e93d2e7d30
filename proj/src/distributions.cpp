#include "janossy/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "janossy/conditioning.hpp"
#include "janossy/error.hpp"
#include "janossy/parallel.hpp"

namespace janossy {

namespace {

bool is_airy(FamilyTag family) {
  if (family.kind == FamilyKind::airy) return true;
  if (family.kind == FamilyKind::bessel) return false;
  throw DomainError("distributions: only the Airy and Bessel families are supported");
}

KernelSpec conditioned_kernel(FamilyTag family, double t, const DistributionOptions& o) {
  return condition(make_kernel(family), cplx(t, o.epsilon));
}

double checked_density(const KernelSpec& base, double t) {
  const double r = rho1(base, t);
  if (!(r > 1e-12)) throw DomainError("distributions: density at the locus is below 1e-12");
  return r;
}

// true when the natural interval at s is empty
bool empty_interval(FamilyTag family, double s, const DistributionOptions& o) {
  return is_airy(family) ? s >= o.airy_cutoff : s <= o.bessel_cutoff;
}

// Central difference of f at s with one Richardson level.
template <class F>
double derivative(F&& f, double s, double h) {
  const double d1 = (f(s + h) - f(s - h)) / (2.0 * h);
  const double d2 = (f(s + 0.5 * h) - f(s - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

TWSolveOptions tw_options(FamilyTag family, const DistributionOptions& o) {
  if (is_airy(family)) {
    TWSolveOptions t = default_solve_options(TWFamily::airy);
    t.cutoff = o.airy_cutoff;
    return t;
  }
  TWSolveOptions t = default_solve_options(TWFamily::bessel);
  t.cutoff = o.tw_bessel_cutoff;
  return t;
}

// Integral of R over the interval at each s (0 on empty intervals) and R(s).
void tw_row(FamilyTag family, double t, const std::vector<double>& s,
            const DistributionOptions& o, std::vector<double>& integral,
            std::vector<double>& resolvent) {
  const auto sys = build_system(conditioned_kernel(family, t, o));
  const auto opts = tw_options(family, o);
  const bool airy = is_airy(family);
  std::vector<double> targets;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool inside = airy ? s[i] < opts.cutoff : s[i] > opts.cutoff;
    if (inside) {
      targets.push_back(s[i]);
      where.push_back(i);
    }
  }
  integral.assign(s.size(), 0.0);
  resolvent.assign(s.size(), 0.0);
  if (targets.empty()) return;
  const auto sol = solve(sys, targets, opts);
  for (std::size_t j = 0; j < targets.size(); ++j) {
    integral[where[j]] = sol.points[j].integral;
    resolvent[where[j]] = sol.points[j].R;
  }
}

}  // namespace

std::string route_name(Route route) { return route == Route::tw ? "tw" : "nystrom"; }

std::pair<double, double> gap_interval(FamilyTag family, double s,
                                       const DistributionOptions& o) {
  if (is_airy(family)) return {s, o.airy_cutoff};
  return {o.bessel_cutoff, s};
}

double gap_probability(FamilyTag family, double s, Route route,
                       const DistributionOptions& o) {
  if (route == Route::tw) {
    throw DomainError("gap_probability: the TW route applies to conditioned kernels only");
  }
  if (empty_interval(family, s, o)) return 1.0;
  const auto [lo, hi] = gap_interval(family, s, o);
  return fredholm_det(nystrom_spectrum(make_kernel(family), lo, hi, o.order));
}

std::vector<double> counting_probabilities(FamilyTag family, double s, int pmax,
                                           const DistributionOptions& o) {
  if (pmax < 0) throw DomainError("counting_probabilities: p must be >= 0");
  if (empty_interval(family, s, o)) {
    std::vector<double> e(pmax + 1, 0.0);
    e[0] = 1.0;
    return e;
  }
  const auto [lo, hi] = gap_interval(family, s, o);
  return counting_probs(nystrom_spectrum(make_kernel(family), lo, hi, o.order), pmax);
}

double p_k(FamilyTag family, int k, double s, const DistributionOptions& o) {
  if (k < 1) throw DomainError("p_k: k must be >= 1");
  const bool airy = is_airy(family);
  if (!airy && s - o.step <= o.bessel_cutoff) {
    throw DomainError("p_k: s too close to the hard edge for differencing");
  }
  const KernelSpec base = make_kernel(family);
  auto cumulative = [&](double x) {
    if (empty_interval(family, x, o)) return 1.0;
    const auto [lo, hi] = gap_interval(family, x, o);
    const auto e = counting_probs(nystrom_spectrum(base, lo, hi, o.order), k - 1);
    double acc = 0.0;
    for (double v : e) acc += v;
    return acc;
  };
  const double d = derivative(cumulative, s, o.step);
  return airy ? d : -d;
}

DistributionGrid p_k_grid(FamilyTag family, int k, const std::vector<double>& s,
                          const DistributionOptions& o) {
  DistributionGrid g{"P" + std::to_string(k), family, Route::nystrom, o, s,
                     std::vector<double>(s.size())};
  parallel_for(s.size(), o.threads, [&](std::size_t i) { g.values[i] = p_k(family, k, s[i], o); });
  return g;
}

double janossy_j1(FamilyTag family, double t, double s, Route route,
                  const DistributionOptions& o) {
  const double density = checked_density(make_kernel(family), t);
  if (empty_interval(family, s, o)) return density;
  if (route == Route::tw) {
    std::vector<double> integral, resolvent;
    tw_row(family, t, {s}, o, integral, resolvent);
    return density * std::exp(-integral[0]);
  }
  const auto [lo, hi] = gap_interval(family, s, o);
  return density * fredholm_det(nystrom_spectrum(conditioned_kernel(family, t, o), lo, hi, o.order));
}

double janossy_j1p(FamilyTag family, double t, double s, int p, const DistributionOptions& o) {
  if (p < 0) throw DomainError("janossy_j1p: p must be >= 0");
  const double density = checked_density(make_kernel(family), t);
  if (empty_interval(family, s, o)) return p == 0 ? density : 0.0;
  const auto [lo, hi] = gap_interval(family, s, o);
  const auto spec = nystrom_spectrum(conditioned_kernel(family, t, o), lo, hi, o.order);
  return density * counting_prob(spec, p);
}

std::vector<double> conditioned_gap_row(FamilyTag family, double t,
                                        const std::vector<double>& s,
                                        const DistributionOptions& o) {
  std::vector<double> integral, resolvent;
  tw_row(family, t, s, o, integral, resolvent);
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = std::exp(-integral[i]);
  return out;
}

std::vector<double> joint_p12_row(FamilyTag family, double t, const std::vector<double>& s,
                                  Route route, const DistributionOptions& o) {
  const bool airy = is_airy(family);
  const double density = checked_density(make_kernel(family), t);
  std::vector<double> out(s.size(), 0.0);
  std::vector<double> live;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool ordered = airy ? s[i] < t : s[i] > t;
    if (ordered && !empty_interval(family, s[i], o)) {
      live.push_back(s[i]);
      where.push_back(i);
    }
  }
  if (live.empty()) return out;
  if (route == Route::tw) {
    std::vector<double> integral, resolvent;
    tw_row(family, t, live, o, integral, resolvent);
    for (std::size_t j = 0; j < live.size(); ++j) {
      out[where[j]] = density * resolvent[j] * std::exp(-integral[j]);
    }
    return out;
  }
  const KernelSpec ck = conditioned_kernel(family, t, o);
  auto log_det = [&](double x) {
    if (empty_interval(family, x, o)) return 0.0;
    const auto [lo, hi] = gap_interval(family, x, o);
    return log_fredholm_det(nystrom_spectrum(ck, lo, hi, o.order));
  };
  for (std::size_t j = 0; j < live.size(); ++j) {
    const double d = derivative(log_det, live[j], o.step);
    const double r = airy ? d : -d;
    out[where[j]] = density * r * std::exp(log_det(live[j]));
  }
  return out;
}

double joint_p12(FamilyTag family, double t, double s, Route route,
                 const DistributionOptions& o) {
  return joint_p12_row(family, t, {s}, route, o)[0];
}

std::vector<double> joint_cell_masses(FamilyTag family, const std::vector<double>& t_edges,
                                      const std::vector<double>& s_edges,
                                      const DistributionOptions& o, int t_order) {
  auto increasing = [](const std::vector<double>& e) {
    if (e.size() < 2) return false;
    for (std::size_t i = 1; i < e.size(); ++i) {
      if (!(e[i] > e[i - 1])) return false;
    }
    return true;
  };
  if (!increasing(t_edges) || !increasing(s_edges)) {
    throw DomainError("joint_cell_masses: edges must be increasing");
  }
  const bool airy = is_airy(family);
  const KernelSpec base = make_kernel(family);
  const std::size_t nt = t_edges.size() - 1, ns = s_edges.size() - 1;
  // all t nodes of all t-bins
  std::vector<double> nodes, weights;
  std::vector<std::size_t> bin;
  for (std::size_t i = 0; i < nt; ++i) {
    const auto rule = gauss_legendre(t_order, t_edges[i], t_edges[i + 1]);
    for (int k = 0; k < t_order; ++k) {
      nodes.push_back(rule.nodes[k]);
      weights.push_back(rule.weights[k]);
      bin.push_back(i);
    }
  }
  std::vector<std::vector<double>> contrib(nodes.size(), std::vector<double>(ns, 0.0));
  parallel_for(nodes.size(), o.threads, [&](std::size_t n) {
    const double t = nodes[n];
    // endpoints of every cell's s-range on the ordered side of t
    std::vector<double> ends;
    ends.push_back(t);
    for (double e : s_edges) {
      if (airy ? e < t : e > t) ends.push_back(e);
    }
    const auto gap = conditioned_gap_row(family, t, ends, o);
    auto gap_at = [&](double x) {
      for (std::size_t k = 0; k < ends.size(); ++k) {
        if (ends[k] == x) return gap[k];
      }
      throw DomainError("joint_cell_masses: missing endpoint");
    };
    const double density = rho1(base, t);
    for (std::size_t j = 0; j < ns; ++j) {
      const double a = airy ? s_edges[j] : std::max(s_edges[j], t);
      const double b = airy ? std::min(s_edges[j + 1], t) : s_edges[j + 1];
      if (!(a < b)) continue;
      // the conditioned gap grows toward the locus, so each term is >= 0
      const double delta = airy ? gap_at(b) - gap_at(a) : gap_at(a) - gap_at(b);
      contrib[n][j] = weights[n] * density * delta;
    }
  });
  std::vector<double> mass(nt * ns, 0.0);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    for (std::size_t j = 0; j < ns; ++j) mass[bin[n] * ns + j] += contrib[n][j];
  }
  return mass;
}

double joint_cell_mass(FamilyTag family, double t_lo, double t_hi, double s_lo, double s_hi,
                       const DistributionOptions& o, int t_order) {
  return joint_cell_masses(family, {t_lo, t_hi}, {s_lo, s_hi}, o, t_order)[0];
}

double to_singular_values(double t, double s, const std::function<double(double, double)>& p) {
  if (!(t > 0.0) || !(s > 0.0)) throw DomainError("to_singular_values: t and s must be > 0");
  return 4.0 * t * s * p(t * t, s * s);
}

}  // namespace janossy
