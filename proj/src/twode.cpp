#include "janossy/twode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "janossy/error.hpp"
#include "janossy/specfun.hpp"

namespace janossy {

namespace {

constexpr int kStateSize = TWState::kSize;
constexpr int kLogdetIndex = 10;
constexpr double kImagWarning = 1e-5;
constexpr double kCauchyRatio = 0.75;
// panel doubling stops once the moments agree to a few dozen ulps; a 1e-16
// increment sits below the summation noise of the composite rule
constexpr double kTailTolerance = 1e-14;

template <std::size_t N>
cplx coef(const std::array<cplx, N>& c, int j) {
  return j >= 0 && j < static_cast<int>(N) ? c[j] : cplx{};
}

template <std::size_t N>
void copy_coeffs(const Polynomial& p, std::array<cplx, N>& out, const char* name) {
  if (p.degree() >= static_cast<int>(N)) {
    throw DomainError(std::string("build_system: degree of ") + name + " too large");
  }
  for (std::size_t j = 0; j < N; ++j) out[j] = p.coeff(static_cast<int>(j));
}

}  // namespace

StateVector TWState::pack() const {
  StateVector y(kSize);
  y << q0, p0, u[0], u[1], u[2], v[0], v[1], v[2], w[0], w[1], logdet;
  return y;
}

TWState TWState::unpack(const StateVector& y) {
  if (y.size() != kSize) throw DomainError("TWState: wrong state size");
  TWState st;
  st.q0 = y(0);
  st.p0 = y(1);
  st.u = {y(2), y(3), y(4)};
  st.v = {y(5), y(6), y(7)};
  st.w = {y(8), y(9)};
  st.logdet = y(10);
  return st;
}

TWSystemSpec build_system(const KernelSpec& conditioned) {
  if (conditioned.loci().size() != 1) {
    throw DomainError("build_system: exactly one conditioning locus is supported");
  }
  const FamilyTag root = conditioned.root();
  TWFamily family;
  if (root.kind == FamilyKind::airy) {
    family = TWFamily::airy;
  } else if (root.kind == FamilyKind::bessel) {
    family = TWFamily::bessel;
  } else {
    throw DomainError("build_system: only Airy and Bessel kernels have a TW system");
  }
  const auto& c = conditioned.connection();
  TWSystemSpec sys{family, {}, {}, {}, conditioned.loci()[0].t, root.nu, conditioned};
  copy_coeffs(c.A, sys.alpha, "A");
  copy_coeffs(c.B, sys.beta, "B");
  copy_coeffs(c.C, sys.gamma, "C");
  return sys;
}

TWClosure algebraic_closure(const TWSystemSpec&, cplx s, const TWState& st) {
  const auto& u = st.u;
  const auto& v = st.v;
  const auto& w = st.w;
  TWClosure e;
  e.vt[0] = v[0];
  e.vt[1] = v[1] - v[0] * e.vt[0] + u[0] * w[0];
  e.vt[2] = v[2] - v[0] * e.vt[1] - v[1] * e.vt[0] + u[0] * w[1] + u[1] * w[0];
  e.q1 = s * st.q0 - v[0] * st.q0 + u[0] * st.p0;
  e.p1 = s * st.p0 - w[0] * st.q0 + e.vt[0] * st.p0;
  e.q2 = s * s * st.q0 - v[0] * e.q1 - v[1] * st.q0 + u[0] * e.p1 + u[1] * st.p0;
  e.p2 = s * s * st.p0 - w[0] * e.q1 - w[1] * st.q0 + e.vt[0] * e.p1 + e.vt[1] * st.p0;
  e.q3 = s * s * s * st.q0 - v[0] * e.q2 - v[1] * e.q1 - v[2] * st.q0 + u[0] * e.p2 +
         u[1] * e.p1 + u[2] * st.p0;
  return e;
}

TWState rhs(const TWSystemSpec& sys, cplx s, const TWState& st) {
  const bool bessel = sys.family == TWFamily::bessel;
  const cplx t = sys.t;
  const cplx st_ = s - t;
  const cplx den = bessel ? s * st_ * st_ : st_ * st_;
  if (std::abs(den) < 1e-26) throw SingularityError("twode rhs: pole at the locus");

  const TWClosure e = algebraic_closure(sys, s, st);
  const std::array<cplx, 4> q{st.q0, e.q1, e.q2, e.q3};
  const std::array<cplx, 3> p{st.p0, e.p1, e.p2};
  const auto& al = sys.alpha;
  const auto& be = sys.beta;
  const auto& ga = sys.gamma;
  const auto& u = st.u;
  const auto& v = st.v;
  const auto& w = st.w;
  const auto& vt = e.vt;

  cplx n1 = 0.0, n2 = 0.0;
  for (int j = 0; j < 3; ++j) {
    cplx cq = coef(al, j), cp = coef(be, j), cp2 = -coef(al, j);
    for (int k = 0; k < 2; ++k) {
      cq += coef(al, j + k + 1) * v[k];
      cp += coef(al, j + k + 1) * u[k] + coef(be, j + k + 1) * v[k];
      cp2 += coef(al, j + k + 1) * vt[k] + coef(be, j + k + 1) * w[k];
    }
    for (int k = 0; k < 3; ++k) cq += coef(ga, j + k + 1) * u[k];
    n1 += cq * q[j] + cp * p[j];
    n2 += cp2 * p[j];
  }
  for (int j = 0; j < 4; ++j) {
    cplx cq2 = -coef(ga, j);
    for (int k = 0; k < 2; ++k) cq2 += coef(al, j + k + 1) * w[k];
    for (int k = 0; k < 3; ++k) cq2 += coef(ga, j + k + 1) * vt[k];
    n2 += cq2 * q[j];
  }
  if (bessel) {
    n1 += 2.0 * t * v[0] * st.q0 - 2.0 * v[1] * st.q0 - v[0] * e.q1 - 2.0 * t * u[0] * st.p0 +
          2.0 * u[1] * st.p0 + u[0] * e.p1;
    n2 += 2.0 * t * w[0] * st.q0 - 2.0 * w[1] * st.q0 - w[0] * e.q1 - 2.0 * t * vt[0] * st.p0 +
          2.0 * vt[1] * st.p0 + vt[0] * e.p1;
  } else {
    n1 += -v[0] * st.q0 + u[0] * st.p0;
    n2 += -w[0] * st.q0 + vt[0] * st.p0;
  }
  const double sign = bessel ? 1.0 : -1.0;
  TWState d;
  d.q0 = n1 / den;
  d.p0 = n2 / den;
  d.u = {sign * st.q0 * st.q0, sign * st.q0 * e.q1, sign * st.q0 * e.q2};
  d.v = {sign * st.q0 * st.p0, sign * st.q0 * e.p1, sign * st.q0 * e.p2};
  d.w = {sign * st.p0 * st.p0, sign * st.p0 * e.p1};
  d.logdet = st.p0 * d.q0 - st.q0 * d.p0;
  return d;
}

namespace {

struct Moments {
  std::array<cplx, 3> u{}, v{};
  std::array<cplx, 2> w{};

  void add(double x, double weight, cplx f, cplx g) {
    double xk = 1.0;
    for (int k = 0; k < 3; ++k) {
      u[k] += weight * xk * f * f;
      v[k] += weight * xk * f * g;
      if (k < 2) w[k] += weight * xk * g * g;
      xk *= x;
    }
  }

  double max_rel_change(const Moments& o) const {
    double r = 0.0;
    auto upd = [&r](cplx a, cplx b) {
      const double scale = std::max(std::abs(a), 1e-300);
      r = std::max(r, std::abs(a - b) / scale);
    };
    for (int k = 0; k < 3; ++k) upd(u[k], o.u[k]), upd(v[k], o.v[k]);
    for (int k = 0; k < 2; ++k) upd(w[k], o.w[k]);
    return r;
  }
};

// Tail moments over (cutoff, inf) with x = cutoff + y^2; the integrand
// decays like exp(-(4/3) x^{3/2}), so the range stops once that factor has
// dropped by e^-80 relative to the cutoff.
Moments airy_tail_moments(const KernelSpec& kernel, double cutoff) {
  const double x_end = std::pow(std::pow(cutoff, 1.5) + 60.0, 2.0 / 3.0);
  const double y_end = std::sqrt(x_end - cutoff);
  const auto unit = gauss_legendre(20, 0.0, 1.0);
  auto composite = [&](int panels) {
    Moments m;
    const double hp = y_end / panels;
    for (int i = 0; i < panels; ++i) {
      for (std::size_t j = 0; j < unit.nodes.size(); ++j) {
        const double y = hp * (i + unit.nodes[j]);
        const double x = cutoff + y * y;
        const double wgt = hp * unit.weights[j] * 2.0 * y;
        m.add(x, wgt, kernel.phi(x), kernel.psi(x));
      }
    }
    return m;
  };
  Moments prev = composite(2);
  for (int panels = 4; panels <= 1024; panels *= 2) {
    Moments next = composite(panels);
    if (next.max_rel_change(prev) < kTailTolerance) return next;
    prev = next;
  }
  throw ConvergenceError("boundary_state: tail quadrature did not converge");
}

Moments bessel_head_moments(const KernelSpec& kernel, double cutoff) {
  Moments m;
  const auto rule = gauss_legendre(20, 0.0, cutoff);
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double x = rule.nodes[j];
    m.add(x, rule.weights[j], kernel.phi(x), kernel.psi(x));
  }
  return m;
}

}  // namespace

TWState boundary_state(const TWSystemSpec& sys, double cutoff) {
  Moments m;
  if (sys.family == TWFamily::airy) {
    if (!(cutoff >= 8.0)) throw DomainError("boundary_state: Airy cutoff must be >= 8");
    m = airy_tail_moments(sys.kernel, cutoff);
  } else {
    if (!(cutoff > 0.0 && cutoff <= 1e-8)) {
      throw DomainError("boundary_state: Bessel cutoff must lie in (0, 1e-8]");
    }
    m = bessel_head_moments(sys.kernel, cutoff);
  }
  TWState st;
  st.q0 = sys.kernel.phi(cutoff);
  st.p0 = sys.kernel.psi(cutoff);
  st.u = m.u;
  st.v = m.v;
  st.w = m.w;
  st.logdet = 0.0;
  return st;
}

TWSolveOptions default_solve_options(TWFamily family) {
  TWSolveOptions o;
  if (family == TWFamily::airy) {
    o.cutoff = 10.0;
    o.logdet_atol = 1e-22;
  } else {
    o.cutoff = 1e-10;
    o.logdet_atol = 1e-16;
  }
  return o;
}

namespace {

class Solver {
 public:
  Solver(const TWSystemSpec& sys, const TWSolveOptions& opt) : sys_(sys), opt_(opt) {
    atol_ = Eigen::VectorXd::Constant(kStateSize, opt.state_atol);
    atol_(kLogdetIndex) = opt.logdet_atol;
  }

  Trajectory real_segment(double from, double to, const StateVector& y0) {
    OdeProblem p;
    p.rhs = [this](double s, const StateVector& y, StateVector& dy) {
      dy = rhs(sys_, s, TWState::unpack(y)).pack();
    };
    p.s0 = from;
    p.s1 = to;
    p.y0 = y0;
    p.rtol = opt_.rtol;
    p.atol_components = atol_;
    Trajectory tr = integrate(p);
    account(tr);
    return tr;
  }

  // s(theta) = center + offset * exp(-i theta), theta in [0, 2 pi]
  Trajectory circle(double center, double offset, const StateVector& y0) {
    OdeProblem p;
    p.rhs = [this, center, offset](double th, const StateVector& y, StateVector& dy) {
      const cplx e = std::exp(cplx(0.0, -th));
      const cplx z = center + offset * e;
      const cplx dz = cplx(0.0, -1.0) * offset * e;
      dy = rhs(sys_, z, TWState::unpack(y)).pack() * dz;
    };
    p.s0 = 0.0;
    p.s1 = 2.0 * std::numbers::pi;
    p.y0 = y0;
    p.rtol = opt_.rtol;
    p.atol_components = atol_;
    Trajectory tr = integrate(p);
    account(tr);
    return tr;
  }

  void account(const Trajectory& tr) {
    evaluations_ += tr.rhs_evaluations;
    for (const auto& y : tr.states) {
      max_q0_ = std::max(max_q0_, std::abs(y(0)));
      max_p0_ = std::max(max_p0_, std::abs(y(1)));
    }
  }

  long evaluations_ = 0;
  double max_q0_ = 0.0, max_p0_ = 0.0;

 private:
  const TWSystemSpec& sys_;
  const TWSolveOptions& opt_;
  Eigen::VectorXd atol_;
};

}  // namespace

TWSolution solve(const TWSystemSpec& sys, const std::vector<double>& targets) {
  return solve(sys, targets, default_solve_options(sys.family));
}

TWSolution solve(const TWSystemSpec& sys, const std::vector<double>& targets,
                 const TWSolveOptions& opt) {
  const bool airy = sys.family == TWFamily::airy;
  const double dir = airy ? -1.0 : 1.0;
  const double cut = opt.cutoff;
  if (targets.empty()) return {};
  for (double s : targets) {
    if (!std::isfinite(s) || dir * (s - cut) < 0.0) {
      throw DomainError(airy ? "solve: Airy targets must not exceed the cutoff"
                             : "solve: Bessel targets must not lie below the cutoff");
    }
  }
  const double t0 = sys.t.real();
  double r = opt.radius;
  if (!airy) r = std::min(r, 0.5 * t0);
  const double p1 = t0 - dir * r;  // entry point of the circle
  const double p2 = t0 + dir * r;  // exit point on the far side
  const bool locus_ahead = dir * (t0 - cut) > 0.0;
  double farthest = cut;
  for (double s : targets) {
    if (dir * (s - farthest) > 0.0) farthest = s;
  }
  const bool detour = locus_ahead && dir * (farthest - p1) > 0.0;
  if (detour && dir * (p1 - cut) <= 0.0) {
    throw DomainError("solve: locus too close to the cutoff");
  }

  Solver solver(sys, opt);
  const StateVector y0 = boundary_state(sys, cut).pack();
  const double seg1_end = detour ? p1 : farthest;
  Trajectory seg1;
  const bool has_seg1 = seg1_end != cut;
  if (has_seg1) seg1 = solver.real_segment(cut, seg1_end, y0);
  solver.max_q0_ = std::max(solver.max_q0_, std::abs(y0(0)));
  solver.max_p0_ = std::max(solver.max_p0_, std::abs(y0(1)));

  TWSolution out;
  out.points.resize(targets.size());
  std::vector<StateVector> states(targets.size());
  std::vector<cplx> resolvent(targets.size());
  std::vector<bool> done(targets.size(), false);

  auto real_point = [&](std::size_t i, const StateVector& y) {
    states[i] = y;
    resolvent[i] = rhs(sys, targets[i], TWState::unpack(y)).logdet;
    done[i] = true;
  };

  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double s = targets[i];
    if (!detour || dir * (s - p1) <= 0.0) {
      real_point(i, has_seg1 ? eval_dense(seg1, s) : y0);
    }
  }

  if (detour) {
    out.crossed_locus = true;
    const StateVector y1 = seg1.states.back();
    const Trajectory ring = solver.circle(t0, p1 - t0, y1);
    const int nodes = opt.circle_nodes;
    std::vector<StateVector> ys(nodes);
    std::vector<cplx> zs(nodes), rs(nodes);
    cplx q0_mean = 0.0, p0_mean = 0.0;
    for (int k = 0; k < nodes; ++k) {
      const double th = 2.0 * std::numbers::pi * k / nodes;
      ys[k] = eval_dense(ring, th);
      zs[k] = t0 + (p1 - t0) * std::exp(cplx(0.0, -th));
      rs[k] = rhs(sys, zs[k], TWState::unpack(ys[k])).logdet;
      q0_mean += ys[k](0);
      p0_mean += ys[k](1);
    }
    out.q0_at_locus = q0_mean / static_cast<double>(nodes);
    out.p0_at_locus = p0_mean / static_cast<double>(nodes);
    const StateVector y2 = eval_dense(ring, std::numbers::pi);

    // remaining targets: Cauchy formula inside the circle, short real
    // branches near its rim, and a real segment beyond the exit point
    const double inner = kCauchyRatio * r;
    bool need_side1 = false, need_side2 = false;
    double far = t0;  // farthest target past the exit point
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (done[i]) continue;
      const double off = targets[i] - t0;
      if (std::abs(off) < inner) {
        StateVector y = StateVector::Zero(kStateSize);
        cplx rv = 0.0;
        for (int k = 0; k < nodes; ++k) {
          const cplx wk = (zs[k] - t0) / (zs[k] - targets[i]);
          y += ys[k] * wk;
          rv += rs[k] * wk;
        }
        states[i] = y / static_cast<double>(nodes);
        resolvent[i] = rv / static_cast<double>(nodes);
        done[i] = true;
      } else if (dir * off < 0.0) {
        need_side1 = true;
      } else if (std::abs(off) < r) {
        need_side2 = true;
      } else {
        if (dir * (targets[i] - far) > 0.0) far = targets[i];
      }
    }
    if (need_side1) {
      const Trajectory side = solver.real_segment(p1, t0 - dir * inner, y1);
      for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!done[i] && dir * (targets[i] - t0) < 0.0) real_point(i, eval_dense(side, targets[i]));
      }
    }
    if (need_side2) {
      const Trajectory side = solver.real_segment(p2, t0 + dir * inner, y2);
      for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!done[i] && std::abs(targets[i] - t0) < r) real_point(i, eval_dense(side, targets[i]));
      }
    }
    if (dir * (far - p2) > 0.0) {
      const Trajectory seg2 = solver.real_segment(p2, far, y2);
      for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!done[i]) real_point(i, eval_dense(seg2, targets[i]));
      }
    } else {
      for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!done[i]) real_point(i, y2);
      }
    }
  }

  for (std::size_t i = 0; i < targets.size(); ++i) {
    const cplx acc = states[i](kLogdetIndex);
    const cplx integral = dir * acc;
    TWPoint& pt = out.points[i];
    pt.s = targets[i];
    pt.R = resolvent[i].real();
    pt.integral = integral.real();
    pt.q0 = states[i](0).real();
    pt.p0 = states[i](1).real();
    out.max_imag_residue = std::max(
        {out.max_imag_residue, std::abs(integral.imag()), std::abs(resolvent[i].imag())});
  }
  out.imag_warning = out.max_imag_residue > kImagWarning;
  out.max_abs_q0 = solver.max_q0_;
  out.max_abs_p0 = solver.max_p0_;
  out.rhs_evaluations = solver.evaluations_;
  return out;
}

}  // namespace janossy
