#pragma once

// Sparse real polynomials in a fixed number of variables with exact first
// and second derivatives.

#include <string>
#include <vector>

#include "maslovkit/linalg.hpp"

namespace maslovkit {

struct Monomial {
  double coef = 0.0;
  std::vector<int> powers;
};

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int variables) : vars_(variables) {}
  Polynomial(int variables, std::vector<Monomial> terms);

  static Polynomial constant(int variables, double c);
  /// The coordinate function x_i.
  static Polynomial variable(int variables, int i);

  int variables() const noexcept { return vars_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }
  int degree() const;

  Polynomial& add_term(double coef, std::vector<int> powers);

  double operator()(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  /// Partial derivative with respect to x_i, as a polynomial.
  Polynomial derivative(int i) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double c) const;

 private:
  void check(const Vec& x) const;

  int vars_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace maslovkit
