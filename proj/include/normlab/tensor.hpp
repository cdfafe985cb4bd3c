#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace nlab {

// Dense real array with `rank` indices, each ranging over 0..n-1.
// Indices are row-major: the last index varies fastest.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int n, int rank, double fill = 0.0)
      : n_(n), rank_(rank), data_(count(n, rank), fill) {}

  int dim() const noexcept { return n_; }
  int rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return data_.size(); }
  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  template <class... I>
  double& operator()(I... idx) {
    return data_[offset(idx...)];
  }
  template <class... I>
  double operator()(I... idx) const {
    return data_[offset(idx...)];
  }

  double max_abs() const {
    double m = 0.0;
    for (double d : data_) m = std::max(m, std::fabs(d));
    return m;
  }

  Tensor& operator+=(const Tensor& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }

  static std::size_t count(int n, int rank) {
    std::size_t c = 1;
    for (int r = 0; r < rank; ++r) c *= static_cast<std::size_t>(n);
    return c;
  }

 private:
  template <class... I>
  std::size_t offset(I... idx) const {
    std::size_t o = 0;
    ((o = o * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx)), ...);
    return o;
  }

  int n_ = 0;
  int rank_ = 0;
  std::vector<double> data_;
};

// max |a - b| over entries.
inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double d : a) m = std::max(m, std::fabs(d));
  return m;
}

// ‖a − b‖∞ / max(1, ‖b‖∞): absolute near zero, relative for large values.
inline double relative_deviation(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  return max_abs_diff(a, b) / std::max(1.0, max_abs(b));
}

}  // namespace nlab
