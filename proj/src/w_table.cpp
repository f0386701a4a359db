#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "slicelab/errors.hpp"
#include "slicelab/sampling.hpp"
#include "slicelab/specfun.hpp"

namespace slicelab {
namespace {

using std::numbers::pi;

constexpr double kQuadTol = 1e-13;
constexpr double kTailMass = 1e-8;
constexpr double kLogStep = 1.0 / 64.0;

boost::math::quadrature::tanh_sinh<double>& integrator() {
  thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
  return ts;
}

double integrate_piece(const std::function<double(double, double)>& g, double a, double b, const char* what) {
  double err = 0.0;
  double l1 = 0.0;
  const double value = integrator().integrate(g, a, b, kQuadTol, &err, &l1);
  if (!std::isfinite(value) || (err > 1e-9 * l1 && err > 1e-14)) {
    throw QuadratureError(std::string("W table: quadrature did not converge in ") + what);
  }
  return value;
}

// Integrates f(u, pi - u) over (0, pi). The integrands switch off where
// A(u) crosses s, which for large s happens in a thin layer at u = pi; the
// range is split there so both pieces see the layer at an endpoint.
template <class F>
double integrate_u(F&& f, double split_comp, const char* what) {
  if (!(split_comp > 0.0 && split_comp < pi)) {
    auto g = [&](double x, double xc) {
      const double u = x < 0.5 * pi ? -xc : x;
      const double comp = x > 0.5 * pi ? xc : pi - x;
      return f(u, comp);
    };
    return integrate_piece(g, 0.0, pi, what);
  }
  const double mid = pi - split_comp;
  auto left = [&](double x, double xc) {
    const double u = x < 0.5 * mid ? -xc : x;
    const double comp = x > 0.5 * mid ? split_comp + xc : pi - x;
    return f(u, comp);
  };
  auto right = [&](double x, double) { return f(pi - x, x); };
  return integrate_piece(left, 0.0, mid, what) + integrate_piece(right, 0.0, split_comp, what);
}

}  // namespace

double zolotarev_log_a(double alpha, double u, double comp) {
  const double ia = 1.0 / (1.0 - alpha);
  const double sin_u = std::sin(u < 0.5 * pi ? u : comp);
  return alpha * ia * std::log(std::sin(alpha * u)) + std::log(std::sin((1.0 - alpha) * u)) - ia * std::log(sin_u);
}

namespace {

struct WLaw {
  double alpha;
  double c;       // (1-alpha)/(2 alpha)
  double z;       // E Y^{-1/2}
  double scale;   // Gamma(c+1)/(Z pi)

  explicit WLaw(double a)
      : alpha(a),
        c((1.0 - a) / (2.0 * a)),
        z(stable_moment(a, -0.5)),
        scale(boost::math::tgamma(c + 1.0) / (z * pi)) {}

  double log_s(double log_t) const { return alpha / (1.0 - alpha) * log_t; }

  // pi - u at which log A(u) = log s, or 0 when A > s on all of (0, pi)
  double split(double ls) const {
    auto gap = [&](double lc) { return zolotarev_log_a(alpha, pi - std::exp(lc), std::exp(lc)) - ls; };
    double lo = -700.0;
    double hi = std::log(pi) - 1e-12;
    if (gap(hi) >= 0.0 || gap(lo) <= 0.0) return 0.0;
    std::uintmax_t iters = 100;
    const auto r = boost::math::tools::toms748_solve(gap, lo, hi, boost::math::tools::eps_tolerance<double>(30), iters);
    return std::exp(0.5 * (r.first + r.second));
  }

  double lower(double log_t) const {
    const double ls = log_s(log_t);
    auto f = [&](double u, double comp) {
      const double la = zolotarev_log_a(alpha, u, comp);
      const double lz = la - ls;
      if (lz > 700.0) return 0.0;
      return std::exp(-c * la) * boost::math::gamma_q(c + 1.0, std::exp(lz));
    };
    return scale * integrate_u(f, split(ls), "cdf");
  }

  double upper(double log_t) const {
    const double ls = log_s(log_t);
    auto f = [&](double u, double comp) {
      const double la = zolotarev_log_a(alpha, u, comp);
      const double lz = la - ls;
      if (lz > 700.0) return std::exp(-c * la);
      if (lz < -700.0) return 0.0;
      return std::exp(-c * la) * boost::math::gamma_p(c + 1.0, std::exp(lz));
    };
    return scale * integrate_u(f, split(ls), "survival");
  }

  // t f_W(t) = t^{1/2} g_alpha(t) / Z
  double log_slope(double log_t) const {
    const double ls = log_s(log_t);
    const double ia = 1.0 / (1.0 - alpha);
    auto f = [&](double u, double comp) {
      const double la = zolotarev_log_a(alpha, u, comp);
      const double lz = la - ls;
      if (lz > 700.0) return 0.0;
      return std::exp(la - std::exp(lz) + (0.5 - ia) * log_t);
    };
    return alpha * ia / (pi * z) * integrate_u(f, split(ls), "density");
  }
};

}  // namespace

WSamplerTable WSamplerTable::build(double alpha, double accuracy) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("WSamplerTable: alpha must lie in (0,1)");
  if (!(accuracy > 0.0)) throw std::invalid_argument("WSamplerTable: accuracy must be positive");
  const WLaw law(alpha);
  WSamplerTable t;
  t.alpha_ = alpha;
  t.accuracy_ = accuracy;
  t.z_ = law.z;

  const double tail = std::min(kTailMass, accuracy);
  double lo = 0.0;
  while (law.lower(lo) >= tail) lo -= 1.0;
  double hi = 0.0;
  while (law.upper(hi) >= tail) hi += 1.0;

  const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / kLogStep)) + 1;
  const double h = (hi - lo) / static_cast<double>(count - 1);
  t.log_t_.resize(count);
  t.f_.resize(count);
  t.slope_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = lo + h * static_cast<double>(i);
    t.log_t_[i] = x;
    const double f = law.lower(x);
    t.f_[i] = f < 0.5 ? f : 1.0 - law.upper(x);
    t.slope_[i] = law.log_slope(x);
  }
  for (std::size_t i = 1; i < count; ++i) {
    if (!(t.f_[i] > t.f_[i - 1])) {
      throw QuadratureError("WSamplerTable: tabulated CDF is not strictly increasing at knot " + std::to_string(i));
    }
  }
  // spot-check the interpolant against the exact CDF at segment midpoints
  for (std::size_t i = 0; i + 1 < count; i += 7) {
    const double x = t.log_t_[i] + 0.5 * h;
    const double exact = t.cdf(std::exp(x));
    if (std::abs(t.hermite_cdf(i, x) - exact) > accuracy) {
      throw QuadratureError("WSamplerTable: interpolation error exceeds requested accuracy");
    }
  }

  const std::size_t bins = count * 2;
  t.guide_.resize(bins + 1);
  const double f0 = t.f_.front();
  const double span = t.f_.back() - f0;
  std::size_t seg = 0;
  for (std::size_t k = 0; k <= bins; ++k) {
    const double target = f0 + span * static_cast<double>(k) / static_cast<double>(bins);
    while (seg + 2 < count && t.f_[seg + 1] <= target) ++seg;
    t.guide_[k] = static_cast<std::uint32_t>(seg);
  }
  return t;
}

double WSamplerTable::cdf(double t) const {
  if (!(t > 0.0)) return 0.0;
  if (std::isinf(t)) return 1.0;
  const WLaw law(alpha_);
  const double x = std::log(t);
  const double f = law.lower(x);
  return f < 0.5 ? f : 1.0 - law.upper(x);
}

double WSamplerTable::survival(double t) const {
  if (!(t > 0.0)) return 1.0;
  if (std::isinf(t)) return 0.0;
  const WLaw law(alpha_);
  const double x = std::log(t);
  const double s = law.upper(x);
  return s < 0.5 ? s : 1.0 - law.lower(x);
}

double WSamplerTable::density(double t) const {
  if (!(t > 0.0) || std::isinf(t)) return 0.0;
  return WLaw(alpha_).log_slope(std::log(t)) / t;
}

double WSamplerTable::hermite_cdf(std::size_t seg, double x) const {
  const double h = log_t_[seg + 1] - log_t_[seg];
  const double tau = (x - log_t_[seg]) / h;
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  return (2 * t3 - 3 * t2 + 1) * f_[seg] + (t3 - 2 * t2 + tau) * h * slope_[seg] + (-2 * t3 + 3 * t2) * f_[seg + 1] +
         (t3 - t2) * h * slope_[seg + 1];
}

double WSamplerTable::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("WSamplerTable::quantile: u must lie in (0,1)");
  if (u <= f_.front() || u >= f_.back()) return exact_quantile(u);

  const double pos = (u - f_.front()) / (f_.back() - f_.front()) * static_cast<double>(guide_.size() - 1);
  std::size_t seg = guide_[std::min(static_cast<std::size_t>(pos), guide_.size() - 1)];
  while (seg + 2 < f_.size() && f_[seg + 1] <= u) ++seg;

  const double h = log_t_[seg + 1] - log_t_[seg];
  const double f0 = f_[seg];
  const double f1 = f_[seg + 1];
  const double m0 = h * slope_[seg];
  const double m1 = h * slope_[seg + 1];
  double a = 0.0;
  double b = 1.0;
  double tau = (u - f0) / (f1 - f0);
  for (int iter = 0; iter < 60; ++iter) {
    const double t2 = tau * tau;
    const double t3 = t2 * tau;
    const double val = (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + tau) * m0 + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * m1;
    const double der = (6 * t2 - 6 * tau) * (f0 - f1) + (3 * t2 - 4 * tau + 1) * m0 + (3 * t2 - 2 * tau) * m1;
    const double r = val - u;
    if (r > 0.0) b = tau; else a = tau;
    double next = der > 0.0 ? tau - r / der : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - tau) < 1e-13) {
      tau = next;
      break;
    }
    tau = next;
  }
  return std::exp(log_t_[seg] + tau * h);
}

double WSamplerTable::exact_quantile(double u) const {
  const bool upper = u > 0.5;
  const double target = upper ? 1.0 - u : u;
  const WLaw law(alpha_);
  auto gap = [&](double x) { return upper ? target - law.upper(x) : law.lower(x) - target; };
  double a = upper ? log_t_.back() : log_t_.front();
  double step = upper ? 1.0 : -1.0;
  double b = a + step;
  const bool a_side = gap(a) < 0.0;
  while ((gap(b) < 0.0) == a_side) {
    a = b;
    step *= 2.0;
    b = a + step;
    if (std::abs(b) > 1e4) throw QuadratureError("WSamplerTable: tail inversion failed to bracket");
  }
  if (a > b) std::swap(a, b);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(gap, a, b, boost::math::tools::eps_tolerance<double>(48), iters);
  return std::exp(0.5 * (r.first + r.second));
}

std::shared_ptr<const WSamplerTable> shared_w_table(double alpha) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const WSamplerTable>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(alpha);
  if (it == cache.end()) {
    it = cache.emplace(alpha, std::make_shared<const WSamplerTable>(WSamplerTable::build(alpha))).first;
  }
  return it->second;
}

double sample_w(const WSamplerTable& table, RngStream& rng) { return table.sample(rng); }

}  // namespace slicelab
