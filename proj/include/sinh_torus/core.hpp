#pragma once

// Value types for frames on S^3 and the so(4) algebra acting on them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace sinh_torus {

inline constexpr double kPi = 3.14159265358979323846;

/// A point or direction in the ambient R^4.
struct Vector4 {
  std::array<double, 4> c{};

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  static constexpr Vector4 basis(std::size_t i) {
    Vector4 e;
    e.c[i] = 1.0;
    return e;
  }

  constexpr Vector4& operator+=(const Vector4& o) {
    for (std::size_t i = 0; i < 4; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr Vector4& operator-=(const Vector4& o) {
    for (std::size_t i = 0; i < 4; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr Vector4& operator*=(double a) {
    for (auto& x : c) x *= a;
    return *this;
  }

  friend constexpr Vector4 operator+(Vector4 a, const Vector4& b) { return a += b; }
  friend constexpr Vector4 operator-(Vector4 a, const Vector4& b) { return a -= b; }
  friend constexpr Vector4 operator-(Vector4 a) { return a *= -1.0; }
  friend constexpr Vector4 operator*(double s, Vector4 a) { return a *= s; }
  friend constexpr Vector4 operator*(Vector4 a, double s) { return a *= s; }
  friend constexpr bool operator==(const Vector4&, const Vector4&) = default;
};

constexpr double dot(const Vector4& a, const Vector4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline double norm(const Vector4& a) { return std::sqrt(dot(a, a)); }

inline double max_abs(const Vector4& a) {
  double m = 0.0;
  for (double x : a.c) m = std::max(m, std::abs(x));
  return m;
}

inline bool is_finite(const Vector4& a) {
  return std::all_of(a.c.begin(), a.c.end(), [](double x) { return std::isfinite(x); });
}

/// Dense 4x4 matrix, row-major.
struct Matrix4 {
  std::array<double, 16> a{};

  constexpr double& operator()(std::size_t i, std::size_t j) { return a[4 * i + j]; }
  constexpr double operator()(std::size_t i, std::size_t j) const { return a[4 * i + j]; }

  static constexpr Matrix4 identity() {
    Matrix4 m;
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
  }

  /// Matrix whose columns are the given vectors.
  static constexpr Matrix4 from_columns(const Vector4& c0, const Vector4& c1, const Vector4& c2,
                                        const Vector4& c3) {
    Matrix4 m;
    const std::array<const Vector4*, 4> cols{&c0, &c1, &c2, &c3};
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t i = 0; i < 4; ++i) m(i, j) = (*cols[j])[i];
    return m;
  }

  constexpr Vector4 column(std::size_t j) const {
    return Vector4{{(*this)(0, j), (*this)(1, j), (*this)(2, j), (*this)(3, j)}};
  }

  constexpr Matrix4 transposed() const {
    Matrix4 t;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) t(i, j) = (*this)(j, i);
    return t;
  }

  friend constexpr Matrix4 operator*(const Matrix4& x, const Matrix4& y) {
    Matrix4 r;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < 4; ++k) {
        const double xik = x(i, k);
        for (std::size_t j = 0; j < 4; ++j) r(i, j) += xik * y(k, j);
      }
    return r;
  }

  friend constexpr Vector4 operator*(const Matrix4& m, const Vector4& v) {
    Vector4 r;
    for (std::size_t i = 0; i < 4; ++i)
      r[i] = m(i, 0) * v[0] + m(i, 1) * v[1] + m(i, 2) * v[2] + m(i, 3) * v[3];
    return r;
  }

  friend constexpr Matrix4 operator+(Matrix4 x, const Matrix4& y) {
    for (std::size_t i = 0; i < 16; ++i) x.a[i] += y.a[i];
    return x;
  }
  friend constexpr Matrix4 operator*(double s, Matrix4 x) {
    for (auto& e : x.a) e *= s;
    return x;
  }
};

inline double max_abs_diff(const Matrix4& x, const Matrix4& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < 16; ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
  return m;
}

inline double max_abs(const Matrix4& x) {
  double m = 0.0;
  for (double e : x.a) m = std::max(m, std::abs(e));
  return m;
}

constexpr double determinant(const Matrix4& m) {
  // Laplace expansion along the first row with 2x2 minors of the lower rows.
  const double s0 = m(2, 0) * m(3, 1) - m(2, 1) * m(3, 0);
  const double s1 = m(2, 0) * m(3, 2) - m(2, 2) * m(3, 0);
  const double s2 = m(2, 0) * m(3, 3) - m(2, 3) * m(3, 0);
  const double s3 = m(2, 1) * m(3, 2) - m(2, 2) * m(3, 1);
  const double s4 = m(2, 1) * m(3, 3) - m(2, 3) * m(3, 1);
  const double s5 = m(2, 2) * m(3, 3) - m(2, 3) * m(3, 2);
  const double c0 = m(1, 1) * s5 - m(1, 2) * s4 + m(1, 3) * s3;
  const double c1 = m(1, 0) * s5 - m(1, 2) * s2 + m(1, 3) * s1;
  const double c2 = m(1, 0) * s4 - m(1, 1) * s2 + m(1, 3) * s0;
  const double c3 = m(1, 0) * s3 - m(1, 1) * s1 + m(1, 2) * s0;
  return m(0, 0) * c0 - m(0, 1) * c1 + m(0, 2) * c2 - m(0, 3) * c3;
}

/// An element of so(4), stored through its upper triangle:
///   B12=b1, B13=b2, B14=b3, B23=b4, B24=b5, B34=b6.
/// The realized matrix is antisymmetric by construction.
class SkewMatrix4 {
 public:
  using Params = std::array<double, 6>;

  constexpr SkewMatrix4() = default;
  constexpr explicit SkewMatrix4(const Params& b) : b_(b) {}

  constexpr const Params& params() const { return b_; }
  /// One-based accessor matching the b1..b6 naming.
  constexpr double b(int k) const { return b_[static_cast<std::size_t>(k - 1)]; }

  /// Entry (i, j), zero-based.
  constexpr double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i > j) return -(*this)(j, i);
    return b_[upper_index(i, j)];
  }

  constexpr Matrix4 matrix() const {
    Matrix4 m;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  constexpr Vector4 apply(const Vector4& v) const {
    const auto& b = b_;
    return Vector4{{b[0] * v[1] + b[1] * v[2] + b[2] * v[3],
                    -b[0] * v[0] + b[3] * v[2] + b[4] * v[3],
                    -b[1] * v[0] - b[3] * v[1] + b[5] * v[3],
                    -b[2] * v[0] - b[4] * v[1] - b[5] * v[2]}};
  }

  /// <B x, y>
  constexpr double pairing(const Vector4& x, const Vector4& y) const { return dot(apply(x), y); }

  /// Largest entry magnitude.
  double max_norm() const {
    double m = 0.0;
    for (double x : b_) m = std::max(m, std::abs(x));
    return m;
  }

  /// Q^T B Q for an orthogonal Q. With Q the frame matrix [p|V1|V2|nu] this
  /// expresses B in the coordinates of that frame.
  SkewMatrix4 conjugated(const Matrix4& q) const {
    const Matrix4 c = q.transposed() * matrix() * q;
    return SkewMatrix4(Params{c(0, 1), c(0, 2), c(0, 3), c(1, 2), c(1, 3), c(2, 3)});
  }

  friend constexpr SkewMatrix4 operator+(const SkewMatrix4& x, const SkewMatrix4& y) {
    Params r{};
    for (std::size_t i = 0; i < 6; ++i) r[i] = x.b_[i] + y.b_[i];
    return SkewMatrix4(r);
  }
  friend constexpr SkewMatrix4 operator*(double s, const SkewMatrix4& x) {
    Params r{};
    for (std::size_t i = 0; i < 6; ++i) r[i] = s * x.b_[i];
    return SkewMatrix4(r);
  }
  friend constexpr bool operator==(const SkewMatrix4&, const SkewMatrix4&) = default;

 private:
  static constexpr std::size_t upper_index(std::size_t i, std::size_t j) {
    // (0,1)->0 (0,2)->1 (0,3)->2 (1,2)->3 (1,3)->4 (2,3)->5
    return i == 0 ? j - 1 : (i == 1 ? j + 1 : 5);
  }

  Params b_{};
};

/// Builds B from its six independent entries. Rejects non-finite input.
inline SkewMatrix4 skew_from_params(double b1, double b2, double b3, double b4, double b5,
                                    double b6) {
  const SkewMatrix4::Params b{b1, b2, b3, b4, b5, b6};
  for (double x : b)
    if (!std::isfinite(x)) throw std::invalid_argument("skew_from_params: non-finite entry");
  return SkewMatrix4(b);
}

inline SkewMatrix4 skew_from_params(const SkewMatrix4::Params& b) {
  return skew_from_params(b[0], b[1], b[2], b[3], b[4], b[5]);
}

/// A point of the 18-dimensional phase space: an ambient frame (p, V1, V2, nu)
/// together with the conformal data r (a = e^{2r}) and s (= dr/dv).
struct FrameState {
  Vector4 p;
  Vector4 v1;
  Vector4 v2;
  Vector4 nu;
  double r = 0.0;
  double s = 0.0;

  static constexpr std::size_t kDim = 18;
  using Flat = std::array<double, kDim>;

  constexpr Flat flat() const {
    Flat f{};
    for (std::size_t i = 0; i < 4; ++i) {
      f[i] = p[i];
      f[4 + i] = v1[i];
      f[8 + i] = v2[i];
      f[12 + i] = nu[i];
    }
    f[16] = r;
    f[17] = s;
    return f;
  }

  static constexpr FrameState from_flat(const Flat& f) {
    FrameState x;
    for (std::size_t i = 0; i < 4; ++i) {
      x.p[i] = f[i];
      x.v1[i] = f[4 + i];
      x.v2[i] = f[8 + i];
      x.nu[i] = f[12 + i];
    }
    x.r = f[16];
    x.s = f[17];
    return x;
  }

  /// Columns p, V1, V2, nu.
  constexpr Matrix4 frame_matrix() const { return Matrix4::from_columns(p, v1, v2, nu); }

  /// Principal curvature a = e^{2r}.
  double principal_curvature() const { return std::exp(2.0 * r); }

  /// (e1, e2, e3, e4, r0, s0)
  static constexpr FrameState standard(double r0 = 0.0, double s0 = 0.0) {
    return FrameState{Vector4::basis(0), Vector4::basis(1), Vector4::basis(2), Vector4::basis(3),
                      r0, s0};
  }

  /// Frame given by the columns of q.
  static constexpr FrameState from_matrix(const Matrix4& q, double r0 = 0.0, double s0 = 0.0) {
    return FrameState{q.column(0), q.column(1), q.column(2), q.column(3), r0, s0};
  }

  friend constexpr bool operator==(const FrameState&, const FrameState&) = default;
};

inline bool is_finite(const FrameState& x) {
  return is_finite(x.p) && is_finite(x.v1) && is_finite(x.v2) && is_finite(x.nu) &&
         std::isfinite(x.r) && std::isfinite(x.s);
}

/// Largest component-wise difference over all 18 coordinates.
inline double max_abs_diff(const FrameState& x, const FrameState& y) {
  const auto a = x.flat();
  const auto b = y.flat();
  double m = 0.0;
  for (std::size_t i = 0; i < FrameState::kDim; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Max of |<a,b> - delta_ab| over the ten pairs of (p, V1, V2, nu) and |det - 1|.
/// A defect is only reported, never repaired.
inline double frame_defect(const FrameState& x) {
  if (!is_finite(x)) return std::numeric_limits<double>::infinity();
  const std::array<const Vector4*, 4> f{&x.p, &x.v1, &x.v2, &x.nu};
  double d = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i; j < 4; ++j)
      d = std::max(d, std::abs(dot(*f[i], *f[j]) - (i == j ? 1.0 : 0.0)));
  d = std::max(d, std::abs(determinant(x.frame_matrix()) - 1.0));
  return d;
}

/// The data (B, theta) selecting one instance of the commuting pair of fields.
struct SystemParams {
  SkewMatrix4 b;
  double theta = 0.0;
};

struct Tolerances {
  double frame_tol = 1e-8;
  double integral_tol = 1e-8;
  double residual_tol = 1e-3;
  /// Threshold for the flow commutator check.
  double commutator_tol = 1e-7;

  void validate() const {
    if (!(frame_tol > 0 && integral_tol > 0 && residual_tol > 0 && commutator_tol > 0))
      throw std::invalid_argument("tolerances must be positive");
  }
};

/// e^{tB} by scaling and squaring around a Taylor core.
inline Matrix4 isometry_exp(const SkewMatrix4& b, double t) {
  Matrix4 a = t * b.matrix();
  // Infinity norm bound of tB.
  double nrm = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 4; ++j) row += std::abs(a(i, j));
    nrm = std::max(nrm, row);
  }
  int squarings = 0;
  if (nrm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.25)));
  a = std::ldexp(1.0, -squarings) * a;

  Matrix4 result = Matrix4::identity();
  Matrix4 term = Matrix4::identity();
  for (int k = 1; k <= 30; ++k) {
    term = (1.0 / k) * (term * a);
    result = result + term;
    if (max_abs(term) < 1e-18) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace sinh_torus
