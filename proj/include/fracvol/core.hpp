#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracvol {

/// Argument outside the mathematical domain of a function.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative evaluation exhausted its iteration cap.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration (bad parameter combination, out-of-range count).
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Hurst exponent, strictly inside (0, 1).
class HurstParam {
 public:
  explicit HurstParam(double h) : h_(h) {
    if (!(h > 0.0 && h < 1.0)) {
      throw domain_error("Hurst parameter must lie strictly inside (0,1), got " + std::to_string(h));
    }
  }

  double value() const noexcept { return h_; }
  bool is_brownian() const noexcept { return h_ == 0.5; }

  friend bool operator==(HurstParam a, HurstParam b) noexcept { return a.h_ == b.h_; }

 private:
  double h_;
};

/// Uniform grid t_i = i * t_end / n_steps, i = 0..n_steps.
class TimeGrid {
 public:
  TimeGrid(double t_end, std::size_t n_steps) : t_end_(t_end), n_steps_(n_steps) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw domain_error("grid horizon must be positive and finite");
    if (n_steps == 0) throw domain_error("grid needs at least one step");
  }

  double t_end() const noexcept { return t_end_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t n_points() const noexcept { return n_steps_ + 1; }
  double dt() const noexcept { return t_end_ / static_cast<double>(n_steps_); }

  double point(std::size_t i) const {
    if (i > n_steps_) throw std::out_of_range("grid index out of range");
    // i == n_steps returns t_end exactly.
    return t_end_ * static_cast<double>(i) / static_cast<double>(n_steps_);
  }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) noexcept {
    return a.t_end_ == b.t_end_ && a.n_steps_ == b.n_steps_;
  }

 private:
  double t_end_;
  std::size_t n_steps_;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace fracvol
