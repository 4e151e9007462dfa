#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dagdepth/distributions.hpp"

namespace dagdepth {

struct BrwMinResult {
  int m = 0;
  int k = 1;
  double min_value = 0.0;
  std::uint64_t nodes_visited = 0;
  std::uint64_t seed = 0;
  std::vector<int> witness;  // letters 1..k of an argmin leaf; filled on request
};

// Minimum position at generation m of a k-ary branching walk with iid steps.
// Variates are tied to tree nodes by pre-order index (counter-based stream),
// so pruning and traversal order change the work done but not the value;
// simulate_min and simulate_min_exhaustive agree exactly for equal seeds.
// Pruning drops a subtree as soon as its partial sum reaches the incumbent,
// which is valid because steps are nonnegative.
BrwMinResult simulate_min(const StepSpec& spec, int k, int m, std::uint64_t seed,
                          bool store_witness = false);

// Full-enumeration serial reference. Visits every node; only sensible for
// small k^m, used by tests and the benchmark.
BrwMinResult simulate_min_exhaustive(const StepSpec& spec, int k, int m,
                                     std::uint64_t seed, bool store_witness = false);

// Exact law of the minimum for integer-scalable lattice steps: cdf[t] is
// P(M_m <= t/denom). Computed by the survival recursion
// G_j(t) = (sum_y p_y G_{j-1}(t - y))^k with G_0 = 1 on t < 0.
struct LatticeMinCdf {
  std::uint32_t denom = 1;
  std::vector<double> cdf;

  double prob_le(double t) const;
};

LatticeMinCdf exact_lattice_min_cdf(const StepSpec& spec, int k, int m,
                                    std::uint64_t max_table = 10'000'000);

struct TailRow {
  int m = 0;
  std::uint64_t hits = 0;
  std::uint64_t reps = 0;
  double p_hat = 0.0;
  double se = 0.0;
};

struct TailEstimate {
  std::string side;  // "right" | "left"
  double eps = 0.0;
  std::vector<TailRow> rows;
  std::optional<double> fitted_rate;  // only when >= 3 grid points have >= 10 hits
  std::optional<double> theory_rate;  // k*alpha*eps (right, Exponential only),
                                      // legendre(gamma-eps) - log k (left)
  double gamma = 0.0;                 // growth constant used for the thresholds
};

nlohmann::json to_json(const TailEstimate& est);

// P(M_m >= (gamma+eps) m) along m_grid. Replications are parallel over
// derived seeds. Throws UnderpoweredError (carrying the raw-count JSON) when
// fewer than 3 grid points collect 10 hits.
TailEstimate right_tail_estimate(const StepSpec& spec, int k, double eps,
                                 const std::vector<int>& m_grid, std::uint64_t reps,
                                 std::uint64_t seed, int workers = 0);

// P(M_m <= (gamma-eps) m); DomainError unless 0 < eps < gamma.
TailEstimate left_tail_estimate(const StepSpec& spec, int k, double eps,
                                const std::vector<int>& m_grid, std::uint64_t reps,
                                std::uint64_t seed, int workers = 0);

}  // namespace dagdepth
