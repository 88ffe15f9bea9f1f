#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavityxy {

struct Tolerance {
  double rel = 1e-10;
  double abs = 1e-12;
};

// Raised when adaptive stepping cannot make progress. Carries the last accepted state.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t, std::vector<double> state)
      : std::runtime_error(what), t_(t), state_(std::move(state)) {}
  double time() const noexcept { return t_; }
  const std::vector<double>& last_state() const noexcept { return state_; }

 private:
  double t_;
  std::vector<double> state_;
};

// Dormand-Prince 5(4) with PI step-size control.
//
// rhs(t, y, dydt) must write the derivative of y into dydt, both std::span of length dim.
class DormandPrince {
 public:
  explicit DormandPrince(std::size_t dim, Tolerance tol = {}) : dim_(dim), tol_(tol) {
    for (auto& k : k_) k.resize(dim);
    ytmp_.resize(dim);
    ynew_.resize(dim);
  }

  const Tolerance& tolerance() const { return tol_; }
  std::size_t accepted_steps() const { return accepted_; }
  std::size_t rejected_steps() const { return rejected_; }
  std::size_t evaluations() const { return evals_; }
  void set_max_steps(std::size_t n) { max_steps_ = n; }

  // Forget the step-size history, e.g. after a discontinuous change of the right-hand side.
  void reset() {
    h_ = 0.0;
    err_old_ = 1e-4;
  }

  // Advances y from t to t_end; t is updated to t_end on return.
  template <class Rhs>
  void advance(Rhs&& rhs, double& t, std::vector<double>& y, double t_end) {
    if (y.size() != dim_) throw std::invalid_argument("DormandPrince: state dimension mismatch");
    if (t_end == t) return;
    if (t_end < t) throw std::invalid_argument("DormandPrince: t_end before t");

    eval(rhs, t, y, k_[0]);
    if (h_ <= 0.0) h_ = initial_step(rhs, t, y, t_end - t);

    std::size_t steps = 0;
    bool last_rejected = false;
    while (t < t_end) {
      if (++steps > max_steps_) {
        throw IntegrationError("integrator: step budget exhausted", t, y);
      }
      const double remaining = t_end - t;
      bool clipped = false;
      double h = h_;
      if (h >= remaining * (1.0 - 1e-12)) {
        h = remaining;
        clipped = true;
      }
      const double h_min = 16.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(t), std::abs(t_end));
      if (remaining <= h_min) {
        // Rounding leftover from an earlier clipped target; an Euler step is exact enough.
        for (std::size_t i = 0; i < dim_; ++i) y[i] += remaining * k_[0][i];
        t = t_end;
        break;
      }
      if (h <= h_min) throw IntegrationError("integrator: step size underflow", t, y);

      const double err = attempt(rhs, t, y, h);
      if (!std::isfinite(err)) {
        h_ = 0.2 * h;
        ++rejected_;
        last_rejected = true;
        continue;
      }
      if (err <= 1.0) {
        t = clipped ? t_end : t + h;
        std::swap(y, ynew_);
        std::swap(k_[0], k_[6]);  // FSAL
        ++accepted_;
        double fac = err == 0.0 ? kMaxFactor
                                : kSafety * std::pow(err, -kAlpha) * std::pow(err_old_, kBeta);
        fac = std::clamp(fac, kMinFactor, last_rejected ? 1.0 : kMaxFactor);
        err_old_ = std::max(err, 1e-4);
        // A step clipped to hit an output time says nothing about the natural step size.
        if (!clipped || h * fac > h_) h_ = h * fac;
        last_rejected = false;
      } else {
        ++rejected_;
        const double fac = std::max(kMinFactor, kSafety * std::pow(err, -0.2));
        h_ = h * fac;
        last_rejected = true;
      }
    }
  }

 private:
  static constexpr double kSafety = 0.9;
  static constexpr double kMinFactor = 0.2;
  static constexpr double kMaxFactor = 10.0;
  static constexpr double kAlpha = 0.7 / 5.0;
  static constexpr double kBeta = 0.4 / 5.0;

  template <class Rhs>
  void eval(Rhs& rhs, double t, const std::vector<double>& y, std::vector<double>& out) {
    ++evals_;
    rhs(t, std::span<const double>(y), std::span<double>(out));
  }

  double norm(const std::vector<double>& v, const std::vector<double>& y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double sc = tol_.abs + tol_.rel * std::max(std::abs(y[i]), std::abs(ynew_[i]));
      const double r = v[i] / sc;
      s += r * r;
    }
    return std::sqrt(s / static_cast<double>(std::max<std::size_t>(dim_, 1)));
  }

  template <class Rhs>
  double initial_step(Rhs& rhs, double t, const std::vector<double>& y, double span) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double sc = tol_.abs + tol_.rel * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k_[0][i] / sc) * (k_[0][i] / sc);
    }
    d0 = std::sqrt(d0 / dim_);
    d1 = std::sqrt(d1 / dim_);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    for (std::size_t i = 0; i < dim_; ++i) ytmp_[i] = y[i] + h0 * k_[0][i];
    eval(rhs, t + h0, ytmp_, k_[1]);
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double sc = tol_.abs + tol_.rel * std::abs(y[i]);
      const double r = (k_[1][i] - k_[0][i]) / sc;
      d2 += r * r;
    }
    d2 = std::sqrt(d2 / dim_) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min({100.0 * h0, h1, span});
  }

  template <class Rhs>
  double attempt(Rhs& rhs, double t, const std::vector<double>& y, double h) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto& k1 = k_[0];
    auto& k2 = k_[1];
    auto& k3 = k_[2];
    auto& k4 = k_[3];
    auto& k5 = k_[4];
    auto& k6 = k_[5];
    auto& k7 = k_[6];
    const std::size_t n = dim_;

    for (std::size_t i = 0; i < n; ++i) ytmp_[i] = y[i] + h * a21 * k1[i];
    eval(rhs, t + c2 * h, ytmp_, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp_[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    eval(rhs, t + c3 * h, ytmp_, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp_[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    eval(rhs, t + c4 * h, ytmp_, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp_[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    eval(rhs, t + c5 * h, ytmp_, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp_[i] =
          y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    eval(rhs, t + h, ytmp_, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew_[i] =
          y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    eval(rhs, t + h, ynew_, k7);
    for (std::size_t i = 0; i < n; ++i)
      ytmp_[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                      e7 * k7[i]);
    return norm(ytmp_, y);
  }

  std::size_t dim_;
  Tolerance tol_;
  std::vector<double> k_[7];
  std::vector<double> ytmp_, ynew_;
  double h_ = 0.0;
  double err_old_ = 1e-4;
  std::size_t accepted_ = 0, rejected_ = 0, evals_ = 0;
  std::size_t max_steps_ = 50'000'000;
};

}  // namespace cavityxy
