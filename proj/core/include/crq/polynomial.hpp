#pragma once

#include <array>
#include <complex>
#include <compare>
#include <map>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace crq {

using Rational = boost::multiprecision::cpp_rational;

/// Complex number with exact rational real and imaginary parts.
struct ComplexRational {
  Rational re{0};
  Rational im{0};

  ComplexRational() = default;
  ComplexRational(Rational r) : re(std::move(r)) {}
  ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  ComplexRational(int r) : re(r) {}

  static ComplexRational i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return re == 0 && im == 0; }
  ComplexRational conj() const { return {re, -im}; }
  std::complex<double> to_complex() const;

  ComplexRational& operator+=(const ComplexRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  ComplexRational& operator-=(const ComplexRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
  friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
  friend ComplexRational operator-(const ComplexRational& a) { return {-a.re, -a.im}; }
  friend ComplexRational operator*(const ComplexRational& a, const ComplexRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ComplexRational operator/(const ComplexRational& a, const ComplexRational& b);
  friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

/// The four coordinate functions on C^2 in which polynomials are written.
enum class Var { z1 = 0, z2 = 1, zbar1 = 2, zbar2 = 3 };

/// Exponents of z1, z2, zbar1, zbar2.
struct Exponent {
  std::array<int, 4> e{0, 0, 0, 0};

  int& operator[](Var v) { return e[static_cast<int>(v)]; }
  int operator[](Var v) const { return e[static_cast<int>(v)]; }

  int holomorphic_degree() const { return e[0] + e[1]; }
  int antiholomorphic_degree() const { return e[2] + e[3]; }
  /// Torus weight (k1, k2): the function picks up e^{i(k1 phi1 + k2 phi2)}.
  std::array<int, 2> weight() const { return {e[0] - e[2], e[1] - e[3]}; }

  auto operator<=>(const Exponent&) const = default;
};

/// Polynomial in z1, z2, zbar1, zbar2 with exact complex-rational coefficients.
/// Zero coefficients are never stored.
class Polynomial {
 public:
  using Terms = std::map<Exponent, ComplexRational>;

  Polynomial() = default;

  static Polynomial constant(ComplexRational c);
  static Polynomial monomial(Exponent e, ComplexRational c = ComplexRational(1));
  static Polynomial variable(Var v);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Coefficient of the given monomial (zero when absent).
  ComplexRational coefficient(const Exponent& e) const;
  void add_term(const Exponent& e, const ComplexRational& c);

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const ComplexRational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const ComplexRational& c) { return a *= c; }
  friend Polynomial operator*(const ComplexRational& c, Polynomial a) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  /// Partial derivative with respect to one of the four coordinates (Wirtinger sense).
  Polynomial derivative(Var v) const;
  /// Complex conjugate as a function: swaps z <-> zbar and conjugates coefficients.
  Polynomial conj() const;

  /// Evaluate at a point of C^2.
  std::complex<double> evaluate(std::complex<double> z1, std::complex<double> z2) const;

  std::string to_string() const;

 private:
  Terms terms_;
};

/// Horizontal frame and Reeb field on the standard sphere.
enum class VectorField { Z1, Zbar1, T };

/// Exact action of Z1 = zbar2 d/dz1 - zbar1 d/dz2, Zbar1 = z2 d/dzbar1 - z1 d/dzbar2,
/// T = i(z1 d/dz1 + z2 d/dz2 - zbar1 d/dzbar1 - zbar2 d/dzbar2).
Polynomial apply_vector_field(VectorField field, const Polynomial& f);

/// Flat Laplacian 4 (d^2/dz1 dzbar1 + d^2/dz2 dzbar2) on C^2.
Polynomial flat_laplacian(const Polynomial& f);

}  // namespace crq
