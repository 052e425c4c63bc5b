#pragma once

// Truncated power series ("jets") in one variable.
//
// A Jet of order K holds the Taylor coefficients c_0..c_K of a function of the
// transform variable mu around an expansion point, so that
//   f(mu0 + e) = c_0 + c_1 e + ... + c_K e^K + O(e^{K+1}).
// Arithmetic and the elementary functions below propagate the coefficients
// exactly (up to rounding). c_0 is always computed with the same double
// operation the scalar code path would use, so templated code evaluated on a
// Jet reproduces the scalar result bitwise in c_0.
//
// A Jet of order 0 is a constant and mixes freely with jets of any order.
// Mixing two non-constant jets of different orders is a logic error.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace coxaff {

class Jet {
 public:
  Jet() : c_(1, 0.0) {}
  Jet(double value) : c_(1, value) {}  // NOLINT: implicit constant lift
  Jet(std::initializer_list<double> coeffs) : c_(coeffs) {
    if (c_.empty()) c_.push_back(0.0);
  }
  explicit Jet(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(0.0);
  }

  // mu0 + e, truncated at `order`.
  static Jet variable(double mu0, std::size_t order) {
    std::vector<double> c(order + 1, 0.0);
    c[0] = mu0;
    if (order >= 1) c[1] = 1.0;
    return Jet(std::move(c));
  }

  static Jet constant(double value, std::size_t order) {
    std::vector<double> c(order + 1, 0.0);
    c[0] = value;
    return Jet(std::move(c));
  }

  std::size_t order() const { return c_.size() - 1; }
  std::size_t size() const { return c_.size(); }
  bool is_constant() const { return c_.size() == 1; }

  double value() const { return c_[0]; }
  // Coefficient k; zero beyond the stored order.
  double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
  double& coeff(std::size_t k) { return c_.at(k); }

  std::span<const double> coeffs() const { return c_; }

  Jet operator-() const {
    Jet r(*this);
    for (double& v : r.c_) v = -v;
    return r;
  }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(const Jet& a, const Jet& b) {
    const std::size_t n = common_size(a, b);
    std::vector<double> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = add_coeff(a, b, k, 1.0);
    return Jet(std::move(c));
  }

  friend Jet operator-(const Jet& a, const Jet& b) {
    const std::size_t n = common_size(a, b);
    std::vector<double> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = add_coeff(a, b, k, -1.0);
    return Jet(std::move(c));
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (a.is_constant()) return scale(b, a.c_[0]);
    if (b.is_constant()) return scale(a, b.c_[0]);
    const std::size_t n = common_size(a, b);
    std::vector<double> c(n);
    for (std::size_t k = 0; k < n; ++k) {
      double s = a.c_[0] * b.c_[k];
      for (std::size_t j = 1; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
      c[k] = s;
    }
    return Jet(std::move(c));
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.is_constant()) {
      Jet r(a);
      for (double& v : r.c_) v = v / b.c_[0];
      return r;
    }
    const std::size_t n = common_size(a, b);
    std::vector<double> q(n);
    q[0] = a[0] / b.c_[0];
    for (std::size_t k = 1; k < n; ++k) {
      double s = a[k];
      for (std::size_t j = 1; j <= k; ++j) s -= b.c_[j] * q[k - j];
      q[k] = s / b.c_[0];
    }
    return Jet(std::move(q));
  }

  friend bool operator<(const Jet& a, const Jet& b) { return a.value() < b.value(); }
  friend bool operator>(const Jet& a, const Jet& b) { return a.value() > b.value(); }
  friend bool operator<=(const Jet& a, const Jet& b) { return a.value() <= b.value(); }
  friend bool operator>=(const Jet& a, const Jet& b) { return a.value() >= b.value(); }
  friend bool operator==(const Jet& a, const Jet& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Jet& a, const Jet& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const Jet& j) {
    os << '[';
    for (std::size_t k = 0; k < j.c_.size(); ++k) os << (k ? ", " : "") << j.c_[k];
    return os << ']';
  }

  // Elementary functions; each uses the ODE f' = F(f) g' to recur on
  // coefficients.
  friend Jet exp(const Jet& g) {
    const std::size_t n = g.size();
    std::vector<double> f(n);
    f[0] = std::exp(g.c_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      double s = 0.0;
      for (std::size_t j = 1; j <= k; ++j) s += double(j) * g.c_[j] * f[k - j];
      f[k] = s / double(k);
    }
    return Jet(std::move(f));
  }

  friend Jet log(const Jet& g) { return log_impl(g, std::log(g.c_[0]), g.c_[0]); }

  // log(1 + g), accurate when g is small in every coefficient.
  friend Jet log1p(const Jet& g) { return log_impl(g, std::log1p(g.c_[0]), 1.0 + g.c_[0]); }

  friend Jet sqrt(const Jet& g) {
    const std::size_t n = g.size();
    std::vector<double> f(n);
    f[0] = std::sqrt(g.c_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      double s = g.c_[k];
      for (std::size_t j = 1; j < k; ++j) s -= f[j] * f[k - j];
      f[k] = s / (2.0 * f[0]);
    }
    return Jet(std::move(f));
  }

  friend Jet pow(const Jet& g, double p) {
    Jet r = exp(p * log(g));
    r.c_[0] = std::pow(g.c_[0], p);
    return r;
  }

  friend Jet abs(const Jet& g) { return g.value() < 0.0 ? -g : g; }

 private:
  static std::size_t common_size(const Jet& a, const Jet& b) {
    if (a.size() != b.size() && !a.is_constant() && !b.is_constant())
      throw std::logic_error("Jet: mixing jets of different orders");
    return std::max(a.size(), b.size());
  }

  static double add_coeff(const Jet& a, const Jet& b, std::size_t k, double sign) {
    if (k >= a.size()) return sign * b.c_[k];
    if (k >= b.size()) return a.c_[k];
    return sign > 0 ? a.c_[k] + b.c_[k] : a.c_[k] - b.c_[k];
  }

  static Jet scale(const Jet& a, double s) {
    Jet r(a);
    for (double& v : r.c_) v = s * v;
    return r;
  }

  // f = log(w) with w_0 = w0 and w_k = g_k (k >= 1).
  static Jet log_impl(const Jet& g, double f0, double w0) {
    const std::size_t n = g.size();
    std::vector<double> f(n);
    f[0] = f0;
    for (std::size_t k = 1; k < n; ++k) {
      double s = double(k) * g.c_[k];
      for (std::size_t j = 1; j < k; ++j) s -= double(j) * f[j] * g.c_[k - j];
      f[k] = s / (double(k) * w0);
    }
    return Jet(std::move(f));
  }

  std::vector<double> c_;
};

// Scalar-generic helpers so templated numerics read the same for both types.
inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }
inline std::size_t coeff_count(double) { return 1; }
inline std::size_t coeff_count(const Jet& x) { return x.size(); }
inline double coeff_at(double x, std::size_t) { return x; }
inline double coeff_at(const Jet& x, std::size_t k) { return x[k]; }

}  // namespace coxaff

namespace Eigen {

template <>
struct NumTraits<coxaff::Jet> : GenericNumTraits<double> {
  using Real = coxaff::Jet;
  using NonInteger = coxaff::Jet;
  using Nested = coxaff::Jet;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 8,
    MulCost = 32
  };
  static inline Real epsilon() { return coxaff::Jet(std::numeric_limits<double>::epsilon()); }
  static inline Real dummy_precision() { return coxaff::Jet(1e-12); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

}  // namespace Eigen
