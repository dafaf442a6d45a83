#include "crq/polynomial.hpp"

#include <sstream>
#include <stdexcept>

namespace crq {

std::complex<double> ComplexRational::to_complex() const {
  return {re.convert_to<double>(), im.convert_to<double>()};
}

ComplexRational operator/(const ComplexRational& a, const ComplexRational& b) {
  const Rational den = b.re * b.re + b.im * b.im;
  if (den == 0) throw std::domain_error("ComplexRational: division by zero");
  const ComplexRational num = a * b.conj();
  return {num.re / den, num.im / den};
}

Polynomial Polynomial::constant(ComplexRational c) { return monomial(Exponent{}, std::move(c)); }

Polynomial Polynomial::monomial(Exponent e, ComplexRational c) {
  Polynomial p;
  p.add_term(e, c);
  return p;
}

Polynomial Polynomial::variable(Var v) {
  Exponent e;
  e[v] = 1;
  return monomial(e);
}

ComplexRational Polynomial::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? ComplexRational() : it->second;
}

void Polynomial::add_term(const Exponent& e, const ComplexRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const ComplexRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, coeff] : terms_) coeff = coeff * c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponent e;
      for (int k = 0; k < 4; ++k) e.e[k] = ea.e[k] + eb.e[k];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::derivative(Var v) const {
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    const int power = e[v];
    if (power == 0) continue;
    Exponent d = e;
    d[v] = power - 1;
    out.add_term(d, c * ComplexRational(power));
  }
  return out;
}

Polynomial Polynomial::conj() const {
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    Exponent s;
    s.e = {e.e[2], e.e[3], e.e[0], e.e[1]};
    out.add_term(s, c.conj());
  }
  return out;
}

std::complex<double> Polynomial::evaluate(std::complex<double> z1, std::complex<double> z2) const {
  const std::array<std::complex<double>, 4> x{z1, z2, std::conj(z1), std::conj(z2)};
  std::complex<double> sum = 0.0;
  for (const auto& [e, c] : terms_) {
    std::complex<double> term = c.to_complex();
    for (int k = 0; k < 4; ++k) {
      for (int j = 0; j < e.e[k]; ++j) term *= x[k];
    }
    sum += term;
  }
  return sum;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  static constexpr const char* names[4] = {"z1", "z2", "zb1", "zb2"};
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.re;
    if (c.im != 0) os << (c.im > 0 ? "+" : "") << c.im << "i";
    os << ")";
    for (int k = 0; k < 4; ++k) {
      if (e.e[k] == 0) continue;
      os << "*" << names[k];
      if (e.e[k] > 1) os << "^" << e.e[k];
    }
  }
  return os.str();
}

Polynomial apply_vector_field(VectorField field, const Polynomial& f) {
  const auto z1 = Polynomial::variable(Var::z1);
  const auto z2 = Polynomial::variable(Var::z2);
  const auto zb1 = Polynomial::variable(Var::zbar1);
  const auto zb2 = Polynomial::variable(Var::zbar2);
  switch (field) {
    case VectorField::Z1:
      return zb2 * f.derivative(Var::z1) - zb1 * f.derivative(Var::z2);
    case VectorField::Zbar1:
      return z2 * f.derivative(Var::zbar1) - z1 * f.derivative(Var::zbar2);
    case VectorField::T: {
      // Euler-weight count: each monomial is an eigenfunction.
      Polynomial out;
      for (const auto& [e, c] : f.terms()) {
        const int w = e.holomorphic_degree() - e.antiholomorphic_degree();
        out.add_term(e, c * ComplexRational(Rational(0), Rational(w)));
      }
      return out;
    }
  }
  throw std::invalid_argument("apply_vector_field: unknown field");
}

Polynomial flat_laplacian(const Polynomial& f) {
  Polynomial out = f.derivative(Var::z1).derivative(Var::zbar1);
  out += f.derivative(Var::z2).derivative(Var::zbar2);
  return out * ComplexRational(4);
}

}  // namespace crq
