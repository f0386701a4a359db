#include "slicelab/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "slicelab/errors.hpp"
#include "slicelab/specfun.hpp"

namespace slicelab {
namespace {

constexpr double kTableEnd = 40.0;
constexpr double kCoarseStep = 1.0 / 16.0;
constexpr int kMaxDepth = 24;

boost::math::quadrature::exp_sinh<double>& ray_integrator() {
  thread_local boost::math::quadrature::exp_sinh<double> es(12);
  return es;
}

double integrate_ray(const std::function<double(double)>& f) {
  double err = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double value = ray_integrator().integrate(f, 1e-15, &err, &l1, &levels);
  if (!std::isfinite(value) || err > 1e-12 * std::max(l1, 1.0)) {
    throw QuadratureError("characteristic function quadrature did not converge");
  }
  return value;
}

double hermite_segment(double h, double tau, double v0, double v1, double d0, double d1) {
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + tau) * h * d0 + (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * h * d1;
}

}  // namespace

PsiValue psi_direct(double p, double s, bool with_derivative) {
  s = std::abs(s);
  const double theta = std::numbers::pi / (2.0 * (p + 1.0));
  const double st = std::sin(theta);
  const double ct = std::cos(theta);
  const double cp = std::cos(p * theta);
  const double sp = std::sin(p * theta);
  // the damped integrand lives on r ~ 1/s for large s
  const double scale = 1.0 / std::max(1.0, s);
  auto phase = [&](double rho, double& amp, double& arg) {
    const double r = rho * scale;
    const double rp = std::pow(r, p);
    amp = std::exp(-s * r * st - rp * cp) * scale;
    arg = s * r * ct - rp * sp;
  };
  PsiValue out;
  out.value = integrate_ray([&](double rho) {
    double amp, arg;
    phase(rho, amp, arg);
    return amp == 0.0 ? 0.0 : amp * std::cos(theta + arg);
  });
  if (!with_derivative) return out;
  out.derivative = integrate_ray([&](double rho) {
    double amp, arg;
    phase(rho, amp, arg);
    return amp == 0.0 ? 0.0 : -rho * scale * amp * std::sin(2.0 * theta + arg);
  });
  return out;
}

double psi_tail_series(double p, double s) {
  s = std::abs(s);
  const double log_s = std::log(s);
  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 200; ++k) {
    const double kp = k * p;
    const double mag = std::exp(std::lgamma(kp + 1.0) - std::lgamma(k + 1.0) - (kp + 1.0) * log_s);
    if (mag > prev) return std::numeric_limits<double>::quiet_NaN();
    const double sn = std::sin(0.5 * std::numbers::pi * kp);
    const double term = (k % 2 ? 1.0 : -1.0) * mag * sn;
    sum += term;
    if (mag < 1e-18 * std::abs(sum) || mag < 1e-300) return sum;
    prev = mag;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double pgauss_charfn_direct(PNorm p, double t) {
  const double beta = pgauss_beta(p);
  return 2.0 / beta * psi_direct(p.value(), t / beta, false).value;
}

PGaussCharFn PGaussCharFn::build(PNorm p, double tolerance) {
  if (p.cube()) throw std::invalid_argument("PGaussCharFn: p must be finite");
  PGaussCharFn fn(p);
  fn.beta_ = pgauss_beta(p);
  const double pv = p.value();

  std::map<double, PsiValue> knots;
  auto eval = [&](double s) -> const PsiValue& {
    auto it = knots.find(s);
    if (it == knots.end()) it = knots.emplace(s, psi_direct(pv, s)).first;
    return it->second;
  };
  // accept [a,b] once the cubic matches the exact value at the midpoint
  std::function<void(double, double, int)> refine = [&](double a, double b, int depth) {
    const PsiValue& va = eval(a);
    const PsiValue& vb = eval(b);
    const double mid = 0.5 * (a + b);
    const double approx = hermite_segment(b - a, 0.5, va.value, vb.value, va.derivative, vb.derivative);
    const double exact = eval(mid).value;
    if (std::abs(approx - exact) <= tolerance) return;
    if (depth >= kMaxDepth) throw QuadratureError("PGaussCharFn: grid refinement did not reach tolerance");
    refine(a, mid, depth + 1);
    refine(mid, b, depth + 1);
  };
  const int coarse = static_cast<int>(kTableEnd / kCoarseStep);
  for (int i = 0; i < coarse; ++i) refine(i * kCoarseStep, (i + 1) * kCoarseStep, 0);

  // midpoints evaluated during refinement are valid knots as well
  for (const auto& [s, v] : knots) {
    fn.s_.push_back(s);
    fn.v_.push_back(v.value);
    fn.dv_.push_back(v.derivative);
  }
  double min_gap = kCoarseStep;
  for (std::size_t i = 1; i < fn.s_.size(); ++i) min_gap = std::min(min_gap, fn.s_[i] - fn.s_[i - 1]);
  fn.guide_step_ = min_gap;

  // beyond the table the asymptotic series replaces quadrature when it
  // reproduces the direct values there
  const double end = fn.s_.back();
  fn.tail_series_ = true;
  for (double s : {end, 1.5 * end, 3.0 * end, 10.0 * end}) {
    const double series = psi_tail_series(pv, s);
    const double direct = psi_direct(pv, s, false).value;
    if (!(std::abs(series - direct) <= tolerance)) fn.tail_series_ = false;
  }
  const auto bins = static_cast<std::size_t>(std::ceil(kTableEnd / min_gap)) + 1;
  fn.guide_.resize(bins);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < bins; ++k) {
    const double target = static_cast<double>(k) * min_gap;
    while (seg + 2 < fn.s_.size() && fn.s_[seg + 1] <= target) ++seg;
    fn.guide_[k] = static_cast<std::uint32_t>(seg);
  }
  return fn;
}

double PGaussCharFn::psi(double s) const {
  if (s >= s_.back()) {
    if (tail_series_) {
      const double v = psi_tail_series(p_.value(), s);
      if (std::isfinite(v)) return v;
    }
    return psi_direct(p_.value(), s, false).value;
  }
  std::size_t seg = guide_[static_cast<std::size_t>(s / guide_step_)];
  while (s_[seg + 1] <= s) ++seg;
  const double h = s_[seg + 1] - s_[seg];
  return hermite_segment(h, (s - s_[seg]) / h, v_[seg], v_[seg + 1], dv_[seg], dv_[seg + 1]);
}

double PGaussCharFn::operator()(double t) const { return 2.0 / beta_ * psi(std::abs(t) / beta_); }

std::shared_ptr<const PGaussCharFn> shared_charfn(PNorm p) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const PGaussCharFn>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(p.value());
  if (it == cache.end()) {
    it = cache.emplace(p.value(), std::make_shared<const PGaussCharFn>(PGaussCharFn::build(p))).first;
  }
  return it->second;
}

}  // namespace slicelab
