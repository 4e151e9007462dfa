#include "dagdepth/oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "dagdepth/errors.hpp"
#include "dagdepth/parallel.hpp"

namespace dagdepth {

Rational Rational::of(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

double Rational::to_double() const {
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string Rational::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

namespace {

constexpr std::uint64_t kHardCap = 4'000'000'000ULL;

struct Accumulator {
  std::map<int, std::uint64_t> dn_counts;
  std::uint64_t sum_dn = 0;
  std::uint64_t sum_min_half = 0;
  std::uint64_t sum_max_all = 0;

  void merge(const Accumulator& other) {
    for (const auto& [d, c] : other.dn_counts) dn_counts[d] += c;
    sum_dn += other.sum_dn;
    sum_min_half += other.sum_min_half;
    sum_max_all += other.sum_max_all;
  }
};

// Walks configurations [begin, end) of the mixed-radix parent counter.
// Digit (x, p) has base x; node n digits vary fastest.
void enumerate_range(std::int64_t n, int k, std::uint64_t begin, std::uint64_t end,
                     Accumulator& acc) {
  const std::size_t digits = static_cast<std::size_t>(n) * k;
  std::vector<std::int32_t> parent(digits, 0);
  std::vector<std::int32_t> base(digits, 0);
  for (std::int64_t x = 1; x <= n; ++x) {
    for (int p = 0; p < k; ++p) {
      base[static_cast<std::size_t>(x - 1) * k + p] = static_cast<std::int32_t>(x);
    }
  }
  // Decode the starting configuration from the flat index.
  std::uint64_t rem = begin;
  for (std::size_t i = digits; i-- > 0;) {
    const auto b = static_cast<std::uint64_t>(base[i]);
    parent[i] = static_cast<std::int32_t>(rem % b);
    rem /= b;
  }

  std::vector<std::int32_t> depth(static_cast<std::size_t>(n) + 1, 0);
  const std::int64_t half = (n + 1) / 2;
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    std::int32_t d_n = 0;
    std::int32_t min_half = 0;
    std::int32_t max_all = 0;
    for (std::int64_t x = 1; x <= n; ++x) {
      std::int32_t best = 0;
      const std::size_t row = static_cast<std::size_t>(x - 1) * k;
      for (int p = 0; p < k; ++p) {
        best = std::max(best, depth[static_cast<std::size_t>(parent[row + p])]);
      }
      const std::int32_t dx = best + 1;
      depth[static_cast<std::size_t>(x)] = dx;
      if (x == n) d_n = dx;
      if (x == half) min_half = dx;
      if (x > half) min_half = std::min(min_half, dx);
      max_all = std::max(max_all, dx);
    }
    acc.dn_counts[d_n] += 1;
    acc.sum_dn += static_cast<std::uint64_t>(d_n);
    acc.sum_min_half += static_cast<std::uint64_t>(min_half);
    acc.sum_max_all += static_cast<std::uint64_t>(max_all);

    // Odometer increment, fastest digit last.
    for (std::size_t i = digits; i-- > 0;) {
      if (++parent[i] < base[i]) break;
      parent[i] = 0;
    }
  }
}

}  // namespace

ExactDepthResult exact_depths(std::int64_t n, int k, std::uint64_t budget, int workers) {
  if (n < 1) throw DomainError("exact_depths: n must be >= 1");
  if (k < 1) throw DomainError("exact_depths: k must be >= 1");
  const std::uint64_t cap = std::min(budget, kHardCap);
  std::uint64_t total = 1;
  for (std::int64_t x = 2; x <= n; ++x) {
    for (int p = 0; p < k; ++p) {
      if (total > cap / static_cast<std::uint64_t>(x)) {
        throw BudgetError("exact_depths: configuration count exceeds the budget");
      }
      total *= static_cast<std::uint64_t>(x);
    }
  }

  const int w = std::max(1, par::resolve_workers(workers));
  const auto chunks = static_cast<std::uint64_t>(w);
  std::vector<Accumulator> parts(chunks);
  par::for_each_index(chunks, w, [&](std::uint64_t c) {
    const std::uint64_t begin = total / chunks * c + std::min<std::uint64_t>(c, total % chunks);
    const std::uint64_t len = total / chunks + (c < total % chunks ? 1 : 0);
    enumerate_range(n, k, begin, begin + len, parts[c]);
  });
  Accumulator acc;
  for (const Accumulator& part : parts) acc.merge(part);

  std::uint64_t count_check = 0;
  for (const auto& [d, c] : acc.dn_counts) count_check += c;
  if (count_check != total) {
    throw DomainError("exact_depths: enumeration dropped configurations");
  }

  ExactDepthResult r;
  r.n = n;
  r.k = k;
  r.configs = total;
  const auto tot = static_cast<std::int64_t>(total);
  for (const auto& [d, c] : acc.dn_counts) {
    r.dist_dn.emplace_back(d, Rational::of(static_cast<std::int64_t>(c), tot));
  }
  r.mean_dn = Rational::of(static_cast<std::int64_t>(acc.sum_dn), tot);
  r.mean_min_half = Rational::of(static_cast<std::int64_t>(acc.sum_min_half), tot);
  r.mean_max_all = Rational::of(static_cast<std::int64_t>(acc.sum_max_all), tot);
  return r;
}

nlohmann::json to_json(const ExactDepthResult& r) {
  nlohmann::json dist = nlohmann::json::object();
  for (const auto& [d, p] : r.dist_dn) dist[std::to_string(d)] = p.to_string();
  return {{"n", r.n},
          {"k", r.k},
          {"configs", r.configs},
          {"dist_dn", dist},
          {"mean_dn", r.mean_dn.to_string()},
          {"mean_min_half", r.mean_min_half.to_string()},
          {"mean_max_all", r.mean_max_all.to_string()}};
}

}  // namespace dagdepth
