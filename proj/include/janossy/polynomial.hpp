#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace janossy {

using cplx = std::complex<double>;

/// Polynomial with complex coefficients stored in ascending degree.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<cplx> coeffs);
  explicit Polynomial(std::vector<cplx> coeffs);

  static Polynomial constant(cplx c) { return Polynomial{c}; }
  /// x - root
  static Polynomial linear_factor(cplx root) { return Polynomial{-root, 1.0}; }

  cplx operator()(cplx x) const;
  /// Coefficient of x^j; zero beyond the stored degree.
  cplx coeff(int j) const;
  /// Degree after trimming exact zeros; -1 for the zero polynomial.
  int degree() const;
  const std::vector<cplx>& coefficients() const { return coeffs_; }

  Polynomial derivative() const;
  /// n-th derivative evaluated at x.
  cplx derivative_at(cplx x, int n) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(cplx scale);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, cplx s) { return a *= s; }
  friend Polynomial operator*(cplx s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  void trim();
  std::vector<cplx> coeffs_;
};

}  // namespace janossy
