#include "janossy/odeengine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "janossy/error.hpp"

namespace janossy {

namespace {

// Dormand-Prince 5(4) tableau with Hairer's dense output coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;

void check_finite(const StateVector& v, const char* what) {
  if (!v.allFinite()) throw ConvergenceError(std::string("integrate: non-finite ") + what);
}

}  // namespace

Trajectory integrate(const OdeProblem& p) {
  if (!p.rhs) throw DomainError("integrate: missing right-hand side");
  if (p.s0 == p.s1) throw DomainError("integrate: s0 must differ from s1");
  if (!(p.rtol >= 1e-13)) throw DomainError("integrate: rtol must be >= 1e-13");
  const Eigen::Index n = p.y0.size();
  Eigen::VectorXd atol = p.atol_components.size() == n
                             ? p.atol_components
                             : Eigen::VectorXd::Constant(n, p.atol);
  if (p.atol_components.size() != 0 && p.atol_components.size() != n) {
    throw DomainError("integrate: atol_components has the wrong size");
  }
  if ((atol.array() <= 0.0).any()) throw DomainError("integrate: atol must be positive");

  const double dir = p.s1 > p.s0 ? 1.0 : -1.0;
  const double span = std::abs(p.s1 - p.s0);
  Trajectory tr;
  tr.nodes.push_back(p.s0);
  tr.states.push_back(p.y0);

  StateVector y = p.y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), tmp(n);
  double s = p.s0;
  p.rhs(s, y, k1);
  ++tr.rhs_evaluations;
  check_finite(k1, "right-hand side at the initial point");

  double h = 1e-4 * span;
  bool last_rejected = false;
  long steps = 0;
  while (dir * (p.s1 - s) > 0.0) {
    if (++steps > p.max_steps) throw ConvergenceError("integrate: step limit exceeded");
    bool final_step = false;
    if (h >= std::abs(p.s1 - s)) {
      h = std::abs(p.s1 - s);
      final_step = true;
    }
    if (h <= 1e-14 * std::max(1.0, std::abs(s))) {
      throw ConvergenceError("integrate: step size underflow at s = " + std::to_string(s));
    }
    const double hs = dir * h;
    tmp = y + hs * a21 * k1;
    p.rhs(s + c2 * hs, tmp, k2);
    tmp = y + hs * (a31 * k1 + a32 * k2);
    p.rhs(s + c3 * hs, tmp, k3);
    tmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    p.rhs(s + c4 * hs, tmp, k4);
    tmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    p.rhs(s + c5 * hs, tmp, k5);
    tmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const double s_next = final_step ? p.s1 : s + hs;
    p.rhs(s_next, tmp, k6);
    ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    p.rhs(s_next, ynew, k7);
    tr.rhs_evaluations += 6;

    const StateVector err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = atol(i) + p.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
      const double r = std::abs(err(i)) / sc;
      acc += r * r;
    }
    double norm = std::sqrt(acc / static_cast<double>(n));
    if (!std::isfinite(norm) || !ynew.allFinite() || !k7.allFinite()) norm = 1e10;

    if (norm <= 1.0) {
      std::array<StateVector, 5> dense;
      dense[0] = y;
      dense[1] = ynew - y;
      dense[2] = hs * k1 - dense[1];
      dense[3] = dense[1] - hs * k7 - dense[2];
      dense[4] = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      tr.dense.push_back(std::move(dense));
      tr.error_estimates.push_back(norm);
      s = s_next;
      y = ynew;
      k1 = k7;
      tr.nodes.push_back(s);
      tr.states.push_back(y);
      double fac = norm == 0.0 ? kMaxFactor : kSafety * std::pow(norm, -0.2);
      fac = std::clamp(fac, kMinFactor, last_rejected ? 1.0 : kMaxFactor);
      h *= fac;
      last_rejected = false;
    } else {
      ++tr.rejected_steps;
      h *= std::clamp(kSafety * std::pow(norm, -0.2), kMinFactor, 1.0);
      last_rejected = true;
    }
  }
  return tr;
}

StateVector eval_dense(const Trajectory& tr, double s) {
  const double a = tr.begin(), b = tr.end();
  const bool increasing = b > a;
  // rounding slack of a few ulps at either end
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max({std::abs(a), std::abs(b), 1.0});
  const double lo = std::min(a, b), hi = std::max(a, b);
  if (s < lo - slack || s > hi + slack) {
    throw DomainError("eval_dense: point outside the integration range");
  }
  s = std::clamp(s, lo, hi);
  // index of the step containing s
  auto it = increasing
                ? std::upper_bound(tr.nodes.begin(), tr.nodes.end(), s)
                : std::upper_bound(tr.nodes.begin(), tr.nodes.end(), s, std::greater<>());
  std::size_t i = static_cast<std::size_t>(it - tr.nodes.begin());
  if (i > 0 && tr.nodes[i - 1] == s) return tr.states[i - 1];
  if (i < tr.nodes.size() && tr.nodes[i] == s) return tr.states[i];
  if (i == 0) return tr.states.front();
  if (i >= tr.nodes.size()) return tr.states.back();
  const std::size_t step = i - 1;
  const double theta = (s - tr.nodes[step]) / (tr.nodes[step + 1] - tr.nodes[step]);
  const double theta1 = 1.0 - theta;
  const auto& r = tr.dense[step];
  return r[0] + theta * (r[1] + theta1 * (r[2] + theta * (r[3] + theta1 * r[4])));
}

}  // namespace janossy
