#include "slicelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "slicelab/errors.hpp"
#include "slicelab/specfun.hpp"

namespace slicelab {
namespace {

using std::numbers::pi;

// In-place Cholesky of a packed symmetric matrix; returns the determinant.
double cholesky_det(std::vector<double>& m, int d) {
  double det = 1.0;
  for (int j = 0; j < d; ++j) {
    double diag = m[j * d + j];
    for (int k = 0; k < j; ++k) diag -= m[j * d + k] * m[j * d + k];
    if (!(diag > 0.0)) throw std::domain_error("gram_det: matrix is not positive definite");
    const double ljj = std::sqrt(diag);
    m[j * d + j] = ljj;
    det *= diag;
    for (int i = j + 1; i < d; ++i) {
      double s = m[i * d + j];
      for (int k = 0; k < j; ++k) s -= m[i * d + k] * m[j * d + k];
      m[i * d + j] = s / ljj;
    }
  }
  return det;
}

}  // namespace

double gram_det(const SubspaceBasis& basis, std::span<const double> x) {
  const int d = basis.d();
  const int n = basis.n();
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("gram_det: weight vector has wrong length");
  std::vector<double> m(static_cast<std::size_t>(d) * d, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int a = 0; a < d; ++a) {
      const double va = x[j] * basis.at(a, j);
      for (int b = 0; b <= a; ++b) m[a * d + b] += va * basis.at(b, j);
    }
  }
  return cholesky_det(m, d);
}

GramAccumulator::GramAccumulator(const SubspaceBasis& basis)
    : d_(basis.d()), n_(basis.n()), tri_(basis.d() * (basis.d() + 1) / 2) {
  outer_.resize(static_cast<std::size_t>(n_) * tri_);
  for (int j = 0; j < n_; ++j) {
    int k = 0;
    for (int a = 0; a < d_; ++a) {
      for (int b = 0; b <= a; ++b) outer_[static_cast<std::size_t>(j) * tri_ + k++] = basis.at(a, j) * basis.at(b, j);
    }
  }
}

double GramAccumulator::det(std::span<const double> x) const {
  const double* o = outer_.data();
  if (d_ == 1) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += x[j] * o[j];
    if (!(s > 0.0)) throw std::domain_error("gram_det: matrix is not positive definite");
    return s;
  }
  if (d_ == 2) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < n_; ++j, o += 3) {
      s0 += x[j] * o[0];
      s1 += x[j] * o[1];
      s2 += x[j] * o[2];
    }
    const double det = s0 * s2 - s1 * s1;
    if (!(s0 > 0.0 && det > 0.0)) throw std::domain_error("gram_det: matrix is not positive definite");
    return det;
  }
  std::vector<double> acc(tri_, 0.0);
  for (int j = 0; j < n_; ++j, o += tri_) {
    for (int k = 0; k < tri_; ++k) acc[k] += x[j] * o[k];
  }
  std::vector<double> m(static_cast<std::size_t>(d_) * d_, 0.0);
  int k = 0;
  for (int a = 0; a < d_; ++a) {
    for (int b = 0; b <= a; ++b) m[a * d_ + b] = acc[k++];
  }
  return cholesky_det(m, d_);
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (r > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
    r = r * num / static_cast<std::uint64_t>(i);
  }
  return r;
}

double small_det(std::span<const double> m, int dim) {
  if (dim == 1) return m[0];
  if (dim == 2) return m[0] * m[3] - m[1] * m[2];
  if (dim == 3) {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6]);
  }
  std::vector<double> a(m.begin(), m.end());
  double det = 1.0;
  for (int c = 0; c < dim; ++c) {
    int piv = c;
    for (int r = c + 1; r < dim; ++r) {
      if (std::abs(a[r * dim + c]) > std::abs(a[piv * dim + c])) piv = r;
    }
    if (a[piv * dim + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int k = 0; k < dim; ++k) std::swap(a[c * dim + k], a[piv * dim + k]);
      det = -det;
    }
    det *= a[c * dim + c];
    for (int r = c + 1; r < dim; ++r) {
      const double f = a[r * dim + c] / a[c * dim + c];
      for (int k = c; k < dim; ++k) a[r * dim + k] -= f * a[c * dim + k];
    }
  }
  return det;
}

CauchyBinetCoeffs::CauchyBinetCoeffs(const SubspaceBasis& basis) : d_(basis.d()) {
  const int n = basis.n();
  const std::uint64_t count = binomial(n, d_);
  if (count > kMaxTuples) {
    throw EnumerationGuardError("CauchyBinetCoeffs: C(" + std::to_string(n) + ", " + std::to_string(d_) +
                                ") exceeds the enumeration guard");
  }
  tuples_.reserve(count * d_);
  squared_minors_.reserve(count);
  std::vector<int> idx(d_);
  for (int i = 0; i < d_; ++i) idx[i] = i;
  std::vector<double> minor(static_cast<std::size_t>(d_) * d_);
  for (;;) {
    for (int r = 0; r < d_; ++r) {
      for (int c = 0; c < d_; ++c) minor[r * d_ + c] = basis.at(r, idx[c]);
    }
    const double det = small_det(minor, d_);
    tuples_.insert(tuples_.end(), idx.begin(), idx.end());
    squared_minors_.push_back(det * det);
    int pos = d_ - 1;
    while (pos >= 0 && idx[pos] == n - d_ + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int k = pos + 1; k < d_; ++k) idx[k] = idx[k - 1] + 1;
  }
}

double CauchyBinetCoeffs::ordered_coefficient(std::size_t k) const {
  double fact = 1.0;
  for (int i = 2; i <= d_; ++i) fact *= i;
  return squared_minors_[k] / fact;
}

double CauchyBinetCoeffs::total() const {
  double s = 0.0;
  for (double v : squared_minors_) s += v;
  return s;
}

double CauchyBinetCoeffs::weighted_sum(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    double w = squared_minors_[k];
    for (int i : tuple(k)) w *= x[i];
    s += w;
  }
  return s;
}

SubspaceBasis complement_basis(const SubspaceBasis& basis) {
  const int n = basis.n();
  const int d = basis.d();
  if (n == d) throw std::invalid_argument("complement_basis: complement is trivial");
  Eigen::MatrixXd a(n, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < n; ++j) a(j, i) = basis.at(i, j);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  std::vector<double> rows(static_cast<std::size_t>(n - d) * n);
  for (int k = 0; k < n - d; ++k) {
    for (int j = 0; j < n; ++j) rows[static_cast<std::size_t>(k) * n + j] = q(j, d + k);
  }
  return SubspaceBasis(n - d, n, std::move(rows));
}

double lp_norm(PNorm p, std::span<const double> v) {
  if (p.cube()) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  const double pv = p.value();
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x) / scale, pv);
  return scale * std::pow(s, 1.0 / pv);
}

double section_volume_oracle(PNorm p, const SubspaceBasis& basis) {
  const int k = basis.section_dim();
  if (k != 1 && k != 2) throw RegimeError("section_volume_oracle: section dimension must be 1 or 2");
  const SubspaceBasis h = complement_basis(basis);
  const int n = basis.n();
  if (k == 1) return 2.0 / lp_norm(p, h.row(0));

  const auto e1 = h.row(0);
  const auto e2 = h.row(1);
  std::vector<double> cuts{0.0, pi};
  for (int j = 0; j < n; ++j) {
    if (e1[j] == 0.0 && e2[j] == 0.0) continue;
    double t = std::atan2(-e1[j], e2[j]);
    if (t < 0.0) t += pi;
    if (t >= pi) t -= pi;
    cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a < 1e-15; }), cuts.end());

  std::vector<double> v(n);
  auto inv_norm2 = [&](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int j = 0; j < n; ++j) v[j] = c * e1[j] + s * e2[j];
    const double r = lp_norm(p, v);
    return 1.0 / (r * r);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-14) continue;
    double err = 0.0;
    double l1 = 0.0;
    area += ts.integrate(inv_norm2, cuts[i], cuts[i + 1], 1e-12, &err, &l1);
    if (err > 1e-10 * std::max(l1, 1.0)) throw QuadratureError("section_volume_oracle: radial quadrature did not converge");
  }
  return area;
}

double cube_density_exact(double x, std::span<const double> u, double max_growth) {
  std::vector<long double> c;
  for (double ui : u) {
    if (ui != 0.0) c.push_back(std::abs(static_cast<long double>(ui)));
  }
  const int k = static_cast<int>(c.size());
  if (k < 2) throw RegimeError("cube density: need at least two nonzero coordinates");
  if (k > 24) throw RegimeError("cube density: too many coordinates for the exact formula");
  long double prod = 1.0L, sum = std::abs(static_cast<long double>(x)), fact = 1.0L;
  for (long double ci : c) {
    prod *= ci;
    sum += ci;
  }
  for (int i = 2; i < k; ++i) fact *= i;
  const long double growth = std::pow(sum, k - 1) / (fact * prod);
  if (!(growth <= max_growth)) throw RegimeError("cube density: exact formula too ill-conditioned");

  long double total = 0.0L;
  const std::uint32_t patterns = 1u << k;
  for (std::uint32_t mask = 0; mask < patterns; ++mask) {
    long double shift = x;
    int sign = 1;
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        shift -= c[i];
        sign = -sign;
      } else {
        shift += c[i];
      }
    }
    if (shift > 0.0L) total += sign * std::pow(shift, k - 1);
  }
  const long double value = total / (fact * std::ldexp(1.0L, k) * prod);
  return static_cast<double>(std::max(value, 0.0L));
}

double cube_density_cf(double x, std::span<const double> u) {
  std::vector<double> c;
  for (double ui : u) {
    if (ui != 0.0) c.push_back(std::abs(ui));
  }
  if (c.size() < 2) throw RegimeError("cube density: need at least two nonzero coordinates");
  const double cmax = *std::max_element(c.begin(), c.end());

  // |prod sinc(c_i t)| <= prod_{c_i t >= 1} 1/(c_i t) bounds the tail beyond T
  auto log_tail_bound = [&](double t) {
    int m = 0;
    double lb = std::log(t);
    for (double ci : c) {
      if (ci * t >= 1.0) {
        ++m;
        lb -= std::log(ci * t);
      }
    }
    if (m < 2) return std::numeric_limits<double>::infinity();
    return lb - std::log(m - 1.0);
  };
  double t_end = 1.0;
  while (log_tail_bound(t_end) > std::log(1e-13)) {
    t_end *= 1.25;
    if (t_end > 1e7) throw QuadratureError("cube density: characteristic function tail decays too slowly");
  }

  auto integrand = [&](double t) {
    double prod = std::cos(x * t);
    for (double ci : c) {
      const double z = ci * t;
      if (z != 0.0) prod *= std::sin(z) / z;
    }
    return prod;
  };
  const double width = pi / (cmax + std::abs(x));
  // each panel spans at most half a period of the fastest factor, where a
  // single 31-point rule is exact to rounding
  const auto panels = static_cast<std::int64_t>(std::ceil(t_end / width));
  double total = 0.0;
  for (std::int64_t i = 0; i < panels; ++i) {
    const double a = static_cast<double>(i) * width;
    const double b = std::min(t_end, static_cast<double>(i + 1) * width);
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 0, 0.0);
  }
  return total / pi;
}

double cube_parallel_section_oracle(double x, const SubspaceBasis& basis) {
  if (basis.d() != 1) throw RegimeError("cube_parallel_section_oracle: codimension must be 1");
  const auto u = basis.row(0);
  int nonzero = 0;
  for (double ui : u) nonzero += ui != 0.0;
  if (nonzero < 2) throw RegimeError("cube_parallel_section_oracle: need at least two nonzero coordinates");
  if (nonzero <= 16) {
    try {
      return cube_density_exact(x, u);
    } catch (const RegimeError&) {
      // fall through to the characteristic function
    }
  }
  return cube_density_cf(x, u);
}

}  // namespace slicelab
