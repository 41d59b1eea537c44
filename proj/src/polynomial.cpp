#include "maslovkit/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "maslovkit/errors.hpp"

namespace maslovkit {
namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

// Product of x_j^{p_j} with the exponents of the listed variables lowered.
double monomial_value(const Monomial& m, const Vec& x, int lower_a = -1, int lower_b = -1) {
  double v = m.coef;
  for (std::size_t j = 0; j < m.powers.size(); ++j) {
    int p = m.powers[j];
    if (static_cast<int>(j) == lower_a) v *= p--;
    if (static_cast<int>(j) == lower_b) v *= p--;
    if (p < 0) return 0.0;
    v *= ipow(x(static_cast<Eigen::Index>(j)), p);
  }
  return v;
}

}  // namespace

Polynomial::Polynomial(int variables, std::vector<Monomial> terms) : vars_(variables) {
  for (auto& t : terms) add_term(t.coef, std::move(t.powers));
}

Polynomial Polynomial::constant(int variables, double c) {
  Polynomial p(variables);
  p.add_term(c, std::vector<int>(variables, 0));
  return p;
}

Polynomial Polynomial::variable(int variables, int i) {
  std::vector<int> pw(variables, 0);
  pw.at(i) = 1;
  Polynomial p(variables);
  p.add_term(1.0, pw);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int p : t.powers) s += p;
    d = std::max(d, s);
  }
  return d;
}

Polynomial& Polynomial::add_term(double coef, std::vector<int> powers) {
  if (static_cast<int>(powers.size()) != vars_)
    throw Error(ErrorKind::Shape, "monomial has the wrong number of exponents");
  for (int p : powers)
    if (p < 0) throw Error(ErrorKind::Shape, "negative exponent");
  if (coef == 0.0) return *this;
  for (auto& t : terms_) {
    if (t.powers == powers) {
      t.coef += coef;
      return *this;
    }
  }
  terms_.push_back({coef, std::move(powers)});
  return *this;
}

void Polynomial::check(const Vec& x) const {
  if (x.size() != vars_) throw Error(ErrorKind::Shape, "polynomial evaluated at a point of wrong size");
}

double Polynomial::operator()(const Vec& x) const {
  check(x);
  double v = 0.0;
  for (const auto& t : terms_) v += monomial_value(t, x);
  return v;
}

Vec Polynomial::gradient(const Vec& x) const {
  check(x);
  Vec g = Vec::Zero(vars_);
  for (const auto& t : terms_)
    for (int i = 0; i < vars_; ++i)
      if (t.powers[i] > 0) g(i) += monomial_value(t, x, i);
  return g;
}

Mat Polynomial::hessian(const Vec& x) const {
  check(x);
  Mat h = Mat::Zero(vars_, vars_);
  for (const auto& t : terms_)
    for (int i = 0; i < vars_; ++i)
      for (int j = i; j < vars_; ++j) {
        if (t.powers[i] == 0 || t.powers[j] == 0) continue;
        const double v = monomial_value(t, x, i, j);
        h(i, j) += v;
        if (i != j) h(j, i) += v;
      }
  return h;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial d(vars_);
  for (const auto& t : terms_) {
    if (t.powers.at(i) == 0) continue;
    auto pw = t.powers;
    const double c = t.coef * pw[i]--;
    d.add_term(c, pw);
  }
  return d;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (o.vars_ != vars_) throw Error(ErrorKind::Shape, "polynomials in different variables");
  Polynomial r = *this;
  for (const auto& t : o.terms_) r.add_term(t.coef, t.powers);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (o.vars_ != vars_) throw Error(ErrorKind::Shape, "polynomials in different variables");
  Polynomial r(vars_);
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) {
      std::vector<int> pw(vars_);
      for (int i = 0; i < vars_; ++i) pw[i] = a.powers[i] + b.powers[i];
      r.add_term(a.coef * b.coef, pw);
    }
  return r;
}

Polynomial Polynomial::operator*(double c) const {
  Polynomial r(vars_);
  for (const auto& t : terms_) r.add_term(c * t.coef, t.powers);
  return r;
}

}  // namespace maslovkit
