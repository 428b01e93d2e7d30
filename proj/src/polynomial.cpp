#include "janossy/polynomial.hpp"

#include <algorithm>

namespace janossy {

Polynomial::Polynomial(std::initializer_list<cplx> coeffs) : coeffs_(coeffs) { trim(); }

Polynomial::Polynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == cplx{}) coeffs_.pop_back();
}

cplx Polynomial::operator()(cplx x) const {
  cplx r = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + *it;
  return r;
}

cplx Polynomial::coeff(int j) const {
  return j >= 0 && j < static_cast<int>(coeffs_.size()) ? coeffs_[j] : cplx{};
}

int Polynomial::degree() const { return static_cast<int>(coeffs_.size()) - 1; }

Polynomial Polynomial::derivative() const {
  std::vector<cplx> d;
  for (std::size_t j = 1; j < coeffs_.size(); ++j) {
    d.push_back(coeffs_[j] * static_cast<double>(j));
  }
  return Polynomial(std::move(d));
}

cplx Polynomial::derivative_at(cplx x, int n) const {
  Polynomial p = *this;
  for (int k = 0; k < n; ++k) p = p.derivative();
  return p(x);
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (coeffs_.size() < other.coeffs_.size()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t j = 0; j < other.coeffs_.size(); ++j) coeffs_[j] += other.coeffs_[j];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (coeffs_.size() < other.coeffs_.size()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t j = 0; j < other.coeffs_.size(); ++j) coeffs_[j] -= other.coeffs_[j];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(cplx scale) {
  for (auto& c : coeffs_) c *= scale;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.coeffs_.empty() || b.coeffs_.empty()) return {};
  std::vector<cplx> c(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Polynomial(std::move(c));
}

}  // namespace janossy
