#ifndef AHEM_JET_HPP
#define AHEM_JET_HPP

// Second-order truncated Taylor jets in up to kMaxDim variables.
//
// A Jet carries a value, a gradient and a (packed, symmetric) Hessian. Its
// `order` records how many derivative levels are valid: products and
// quotients take the minimum order of their operands, and differentiation
// lowers the order by one. Slots above `order` are kept at zero.

#include <array>
#include <cassert>
#include <cmath>

namespace ahem {

inline constexpr int kMaxDim = 7;
inline constexpr int kPacked = kMaxDim * (kMaxDim + 1) / 2;

constexpr int packed_index(int i, int j) {
  if (i > j) {
    const int t = i;
    i = j;
    j = t;
  }
  return i * kMaxDim - i * (i - 1) / 2 + (j - i);
}

struct Jet {
  double v = 0.0;
  std::array<double, kMaxDim> d{};
  std::array<double, kPacked> dd{};
  int order = 2;
  int dim = 0;

  Jet() = default;
  Jet(double value, int dimension, int ord = 2) : v(value), order(ord), dim(dimension) {}

  static Jet constant(double value, int dimension) { return Jet(value, dimension, 2); }
  static Jet variable(double value, int index, int dimension) {
    Jet j(value, dimension, 2);
    j.d[index] = 1.0;
    return j;
  }

  double grad(int i) const { return d[i]; }
  double hess(int i, int j) const { return dd[packed_index(i, j)]; }
  double& hess(int i, int j) { return dd[packed_index(i, j)]; }

  // Partial derivative along coordinate i, one order lower.
  Jet derivative(int i) const {
    assert(order >= 1);
    Jet r(d[i], dim, order - 1);
    if (r.order >= 1) {
      for (int k = 0; k < dim; ++k) r.d[k] = hess(i, k);
    }
    return r;
  }

  Jet truncated(int ord) const {
    Jet r = *this;
    if (ord < r.order) r.order = ord;
    if (r.order < 2) r.dd.fill(0.0);
    if (r.order < 1) r.d.fill(0.0);
    return r;
  }

  Jet& operator+=(const Jet& o) {
    dim = dim > o.dim ? dim : o.dim;
    order = order < o.order ? order : o.order;
    v += o.v;
    if (order >= 1)
      for (int k = 0; k < dim; ++k) d[k] += o.d[k];
    else
      d.fill(0.0);
    if (order >= 2)
      for (int k = 0; k < kPacked; ++k) dd[k] += o.dd[k];
    else
      dd.fill(0.0);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    Jet m = o;
    m *= -1.0;
    return *this += m;
  }
  Jet& operator*=(double s) {
    v *= s;
    for (auto& x : d) x *= s;
    for (auto& x : dd) x *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    v += s;
    return *this;
  }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator-(Jet a) { return a *= -1.0; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }
inline Jet operator+(Jet a, double s) { return a += s; }
inline Jet operator+(double s, Jet a) { return a += s; }
inline Jet operator-(Jet a, double s) { return a += -s; }
inline Jet operator-(double s, Jet a) {
  a *= -1.0;
  return a += s;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.dim = a.dim > b.dim ? a.dim : b.dim;
  r.order = a.order < b.order ? a.order : b.order;
  r.v = a.v * b.v;
  if (r.order >= 1) {
    for (int i = 0; i < r.dim; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  }
  if (r.order >= 2) {
    for (int i = 0; i < r.dim; ++i) {
      for (int j = i; j < r.dim; ++j) {
        const int p = packed_index(i, j);
        r.dd[p] = a.dd[p] * b.v + a.v * b.dd[p] + a.d[i] * b.d[j] + a.d[j] * b.d[i];
      }
    }
  }
  return r;
}

// Composition f(a) given f(a.v), f'(a.v), f''(a.v).
inline Jet compose(const Jet& a, double f0, double f1, double f2) {
  Jet r(f0, a.dim, a.order);
  if (a.order >= 1) {
    for (int i = 0; i < a.dim; ++i) r.d[i] = f1 * a.d[i];
  }
  if (a.order >= 2) {
    for (int i = 0; i < a.dim; ++i) {
      for (int j = i; j < a.dim; ++j) {
        const int p = packed_index(i, j);
        r.dd[p] = f1 * a.dd[p] + f2 * a.d[i] * a.d[j];
      }
    }
  }
  return r;
}

inline Jet inverse(const Jet& a) {
  const double x = 1.0 / a.v;
  return compose(a, x, -x * x, 2.0 * x * x * x);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }
inline Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
inline Jet operator/(double s, const Jet& b) { return s * inverse(b); }

inline Jet pow(const Jet& a, double p) {
  const double x = std::pow(a.v, p);
  return compose(a, x, p * x / a.v, p * (p - 1.0) * x / (a.v * a.v));
}
inline Jet sqrt(const Jet& a) { return pow(a, 0.5); }
inline Jet sin(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return compose(a, s, c, -s);
}
inline Jet cos(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return compose(a, c, -s, -c);
}
inline Jet log(const Jet& a) { return compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }

}  // namespace ahem

#endif  // AHEM_JET_HPP
