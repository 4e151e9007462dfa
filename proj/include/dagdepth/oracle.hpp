#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace dagdepth {

// Reduced fraction with positive denominator. Magnitudes stay well inside
// int64 because enumeration totals are capped (see exact_depths).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational of(std::int64_t num, std::int64_t den);
  double to_double() const;
  std::string to_string() const;  // "7/4", integers without the slash

  friend bool operator==(const Rational& a, const Rational& b) = default;
};

struct ExactDepthResult {
  std::int64_t n = 0;
  int k = 0;
  std::uint64_t configs = 0;                     // product over x of x^k
  std::vector<std::pair<int, Rational>> dist_dn; // P(D_n = d), ascending d
  Rational mean_dn;
  Rational mean_min_half;
  Rational mean_max_all;
};

// Exhaustive mixed-radix enumeration of every parent configuration of the
// uniform k-DAG on n+1 nodes, with exact rational accumulation. BudgetError
// when the configuration count exceeds the budget (hard cap 4e9 regardless).
// Chunks of the index range run in parallel; integer merges keep the result
// identical for every worker count.
ExactDepthResult exact_depths(std::int64_t n, int k,
                              std::uint64_t budget = 100'000'000, int workers = 0);

// Fractions serialize as strings so the fixtures stay exact.
nlohmann::json to_json(const ExactDepthResult& r);

}  // namespace dagdepth
