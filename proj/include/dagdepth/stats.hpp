#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <json.hpp>

namespace dagdepth {

// Streaming summary: Welford moments plus the five standard quantiles.
// Quantiles are exact (type-7 interpolation on the sorted retained samples)
// up to the retention cap; past the cap the summary switches to P-squared
// marker estimators seeded from the exact quantiles at the switch point.
class StatSummary {
public:
  static constexpr std::array<double, 5> kProbs{0.05, 0.25, 0.5, 0.75, 0.95};
  static constexpr std::size_t kDefaultRetainCap = 1'000'000;

  explicit StatSummary(std::size_t retain_cap = kDefaultRetainCap);

  void add(double value);

  std::uint64_t count() const { return count_; }
  double mean() const;
  double variance() const;  // sample variance, n-1 denominator
  double min() const;
  double max() const;
  std::array<double, 5> quantiles() const;
  bool exact_quantiles() const { return !fallback_; }

private:
  struct P2 {
    double prob = 0.5;
    std::array<double, 5> height{};
    std::array<double, 5> pos{};
    std::array<double, 5> want{};

    void seed(double prob, const std::vector<double>& sorted);
    void add(double value);
    double estimate() const { return height[2]; }
  };

  void activate_fallback();

  std::size_t retain_cap_;
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
  std::vector<double> retained_;
  bool fallback_ = false;
  std::array<P2, 5> markers_{};
};

nlohmann::json to_json(const StatSummary& s);

}  // namespace dagdepth
