#include "dagdepth/stats.hpp"

#include <algorithm>
#include <cmath>

#include "dagdepth/errors.hpp"

namespace dagdepth {

namespace {

// Type-7 interpolated quantile of a sorted sample.
double sorted_quantile(const std::vector<double>& v, double p) {
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace

StatSummary::StatSummary(std::size_t retain_cap) : retain_cap_(retain_cap) {
  if (retain_cap_ < 8) retain_cap_ = 8;  // P-squared seeding needs a few points
}

void StatSummary::add(double value) {
  ++count_;
  if (count_ == 1) {
    min_ = max_ = value;
  } else {
    min_ = std::min(min_, value);
    max_ = std::max(max_, value);
  }
  const double delta = value - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (value - mean_);

  if (!fallback_) {
    retained_.push_back(value);
    if (retained_.size() > retain_cap_) activate_fallback();
  } else {
    for (auto& marker : markers_) marker.add(value);
  }
}

void StatSummary::activate_fallback() {
  std::sort(retained_.begin(), retained_.end());
  for (std::size_t i = 0; i < kProbs.size(); ++i) {
    markers_[i].seed(kProbs[i], retained_);
  }
  retained_.clear();
  retained_.shrink_to_fit();
  fallback_ = true;
}

double StatSummary::mean() const {
  if (count_ == 0) throw EmptyError("StatSummary: no samples");
  return mean_;
}

double StatSummary::variance() const {
  if (count_ == 0) throw EmptyError("StatSummary: no samples");
  if (count_ < 2) return 0.0;
  return m2_ / static_cast<double>(count_ - 1);
}

double StatSummary::min() const {
  if (count_ == 0) throw EmptyError("StatSummary: no samples");
  return min_;
}

double StatSummary::max() const {
  if (count_ == 0) throw EmptyError("StatSummary: no samples");
  return max_;
}

std::array<double, 5> StatSummary::quantiles() const {
  if (count_ == 0) throw EmptyError("StatSummary: no samples");
  std::array<double, 5> q{};
  if (!fallback_) {
    std::vector<double> sorted = retained_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < kProbs.size(); ++i) q[i] = sorted_quantile(sorted, kProbs[i]);
  } else {
    for (std::size_t i = 0; i < kProbs.size(); ++i) q[i] = markers_[i].estimate();
  }
  return q;
}

void StatSummary::P2::seed(double p, const std::vector<double>& sorted) {
  prob = p;
  const std::array<double, 5> cuts{0.0, p / 2.0, p, (1.0 + p) / 2.0, 1.0};
  const auto n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < 5; ++i) {
    height[i] = sorted_quantile(sorted, cuts[i]);
    pos[i] = 1.0 + cuts[i] * (n - 1.0);
    want[i] = pos[i];
  }
}

void StatSummary::P2::add(double value) {
  int cell;
  if (value < height[0]) {
    height[0] = value;
    cell = 0;
  } else if (value >= height[4]) {
    height[4] = value;
    cell = 3;
  } else {
    cell = 0;
    while (cell < 3 && value >= height[static_cast<std::size_t>(cell) + 1]) ++cell;
  }

  for (int i = cell + 1; i < 5; ++i) pos[static_cast<std::size_t>(i)] += 1.0;
  const std::array<double, 5> inc{0.0, prob / 2.0, prob, (1.0 + prob) / 2.0, 1.0};
  for (std::size_t i = 0; i < 5; ++i) want[i] += inc[i];

  for (std::size_t i = 1; i <= 3; ++i) {
    const double d = want[i] - pos[i];
    const bool up = d >= 1.0 && pos[i + 1] - pos[i] > 1.0;
    const bool down = d <= -1.0 && pos[i - 1] - pos[i] < -1.0;
    if (!up && !down) continue;
    const double s = up ? 1.0 : -1.0;
    // Parabolic prediction, falling back to linear when it breaks order.
    const double np = pos[i + 1] - pos[i - 1];
    const double parabolic =
        height[i] +
        s / np *
            ((pos[i] - pos[i - 1] + s) * (height[i + 1] - height[i]) / (pos[i + 1] - pos[i]) +
             (pos[i + 1] - pos[i] - s) * (height[i] - height[i - 1]) / (pos[i] - pos[i - 1]));
    if (height[i - 1] < parabolic && parabolic < height[i + 1]) {
      height[i] = parabolic;
    } else {
      const std::size_t j = s > 0 ? i + 1 : i - 1;
      height[i] += s * (height[j] - height[i]) / (pos[j] - pos[i]);
    }
    pos[i] += s;
  }
}

nlohmann::json to_json(const StatSummary& s) {
  const auto q = s.quantiles();
  return {{"count", s.count()}, {"mean", s.mean()},  {"variance", s.variance()},
          {"min", s.min()},     {"max", s.max()},    {"q05", q[0]},
          {"q25", q[1]},        {"q50", q[2]},       {"q75", q[3]},
          {"q95", q[4]}};
}

}  // namespace dagdepth
