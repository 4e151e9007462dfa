#include "dagdepth/brw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dagdepth/constants.hpp"
#include "dagdepth/errors.hpp"
#include "dagdepth/parallel.hpp"

namespace dagdepth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// subtree_size[d] = number of nodes of a full k-ary tree of depth m in the
// subtree rooted at depth d (the node itself included). Pre-order child
// indexing needs these offsets; BudgetError when they leave 64 bits.
std::vector<std::uint64_t> subtree_sizes(int k, int m) {
  std::vector<std::uint64_t> size(static_cast<std::size_t>(m) + 1);
  size[static_cast<std::size_t>(m)] = 1;
  const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
  for (int d = m - 1; d >= 0; --d) {
    const std::uint64_t below = size[static_cast<std::size_t>(d) + 1];
    if (below > (cap - 1) / static_cast<std::uint64_t>(k)) {
      throw BudgetError("simulate_min: pre-order index space exceeds 64 bits");
    }
    size[static_cast<std::size_t>(d)] = 1 + static_cast<std::uint64_t>(k) * below;
  }
  return size;
}

void check_walk_args(int k, int m) {
  if (k < 1) throw DomainError("simulate_min: k must be >= 1");
  if (m < 0) throw DomainError("simulate_min: m must be >= 0");
}

struct Child {
  double y;
  std::uint64_t node;
  int letter;
};

}  // namespace

BrwMinResult simulate_min(const StepSpec& spec, int k, int m, std::uint64_t seed,
                          bool store_witness) {
  check_walk_args(k, m);
  BrwMinResult result;
  result.m = m;
  result.k = k;
  result.seed = seed;
  result.nodes_visited = 1;
  if (m == 0) return result;

  if (static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(k) > 100'000'000ULL) {
    throw BudgetError("simulate_min: frame storage m*k exceeds 1e8");
  }
  const auto size = subtree_sizes(k, m);

  // frames[d] holds the children (depth d+1) of the node being expanded at
  // depth d, sorted by step so the cheapest subtree is explored first and a
  // single comparison prunes the remaining siblings.
  struct Frame {
    std::vector<Child> kids;
    int next = 0;
    double base = 0.0;  // cumulative sum at the parent
  };
  std::vector<Frame> frames(static_cast<std::size_t>(m));
  for (auto& f : frames) f.kids.resize(static_cast<std::size_t>(k));
  std::vector<int> letters(static_cast<std::size_t>(m), 0);

  const auto expand = [&](int d, std::uint64_t node, double base) {
    Frame& f = frames[static_cast<std::size_t>(d)];
    const std::uint64_t step_size = size[static_cast<std::size_t>(d) + 1];
    for (int c = 0; c < k; ++c) {
      const std::uint64_t idx = node + 1 + static_cast<std::uint64_t>(c) * step_size;
      f.kids[static_cast<std::size_t>(c)] =
          Child{sample_step(spec, SplitMix64::unit_at(seed, idx)), idx, c + 1};
    }
    std::sort(f.kids.begin(), f.kids.end(), [](const Child& a, const Child& b) {
      return a.y != b.y ? a.y < b.y : a.letter < b.letter;
    });
    f.next = 0;
    f.base = base;
    result.nodes_visited += static_cast<std::uint64_t>(k);
  };

  double best = kInf;
  expand(0, 0, 0.0);
  int d = 0;
  while (d >= 0) {
    Frame& f = frames[static_cast<std::size_t>(d)];
    if (f.next == k) {
      --d;
      continue;
    }
    const Child& c = f.kids[static_cast<std::size_t>(f.next)];
    const double s = f.base + c.y;
    if (s >= best) {
      // Siblings are sorted by step, so everything left in this frame is at
      // least as expensive; nonnegative steps make the whole block prunable.
      f.next = k;
      continue;
    }
    ++f.next;
    letters[static_cast<std::size_t>(d)] = c.letter;
    if (d + 1 == m) {
      best = s;
      if (store_witness) result.witness = letters;
    } else {
      expand(d + 1, c.node, s);
      ++d;
    }
  }

  result.min_value = best;
  return result;
}

BrwMinResult simulate_min_exhaustive(const StepSpec& spec, int k, int m,
                                     std::uint64_t seed, bool store_witness) {
  check_walk_args(k, m);
  BrwMinResult result;
  result.m = m;
  result.k = k;
  result.seed = seed;
  result.nodes_visited = 1;
  if (m == 0) return result;
  subtree_sizes(k, m);  // same index-space guard as the pruned walk

  SplitMix64 rng(seed);
  std::vector<int> child(static_cast<std::size_t>(m), 0);
  std::vector<int> letters(static_cast<std::size_t>(m), 0);
  std::vector<double> sum(static_cast<std::size_t>(m) + 1, 0.0);
  double best = kInf;
  int d = 0;
  while (d >= 0) {
    if (child[static_cast<std::size_t>(d)] == k) {
      --d;
      continue;
    }
    const int c = child[static_cast<std::size_t>(d)]++;
    const double y = sample_step(spec, rng.next_double());
    ++result.nodes_visited;
    const double s = sum[static_cast<std::size_t>(d)] + y;
    letters[static_cast<std::size_t>(d)] = c + 1;
    if (d + 1 == m) {
      if (s < best) {
        best = s;
        if (store_witness) result.witness = letters;
      }
    } else {
      ++d;
      sum[static_cast<std::size_t>(d)] = s;
      child[static_cast<std::size_t>(d)] = 0;
    }
  }
  result.min_value = best;
  return result;
}

double LatticeMinCdf::prob_le(double t) const {
  if (t < 0.0) return 0.0;
  const double scaled = t * denom + 1e-9;
  const auto idx = static_cast<std::size_t>(scaled);
  if (idx >= cdf.size()) return 1.0;
  return cdf[idx];
}

LatticeMinCdf exact_lattice_min_cdf(const StepSpec& spec, int k, int m,
                                    std::uint64_t max_table) {
  check_walk_args(k, m);
  if (spec.kind != StepKind::kLattice) {
    throw DomainError("exact_lattice_min_cdf: lattice steps only");
  }

  // Scale the support onto the integers: smallest q <= 1e4 with q*y integral.
  std::uint32_t denom = 0;
  for (std::uint32_t q = 1; q <= 10'000; ++q) {
    bool ok = true;
    for (const double y : spec.support) {
      const double scaled = y * q;
      if (std::abs(scaled - std::round(scaled)) > 1e-9 * q) {
        ok = false;
        break;
      }
    }
    if (ok) {
      denom = q;
      break;
    }
  }
  if (denom == 0) {
    throw DomainError("exact_lattice_min_cdf: support is not rational with denominator <= 1e4");
  }

  std::vector<std::int64_t> scaled(spec.support.size());
  std::int64_t y_max = 0;
  for (std::size_t i = 0; i < spec.support.size(); ++i) {
    scaled[i] = static_cast<std::int64_t>(std::llround(spec.support[i] * denom));
    y_max = std::max(y_max, scaled[i]);
  }
  const std::uint64_t table = static_cast<std::uint64_t>(m) * y_max + 1;
  if (table > max_table) {
    throw BudgetError("exact_lattice_min_cdf: table exceeds the entry budget");
  }

  // Survival function G_j(t) = P(M_j > t) on t = 0..m*y_max; t < 0 is 1.
  std::vector<double> g(table, 0.0);
  std::vector<double> next(table, 0.0);
  for (int j = 1; j <= m; ++j) {
    for (std::uint64_t t = 0; t < table; ++t) {
      double h = 0.0;
      for (std::size_t i = 0; i < scaled.size(); ++i) {
        const std::int64_t shifted = static_cast<std::int64_t>(t) - scaled[i];
        const double gv =
            shifted < 0 ? 1.0 : g[static_cast<std::uint64_t>(shifted)];
        h += spec.probs[i] * gv;
      }
      double powed = 1.0;
      for (int c = 0; c < k; ++c) powed *= h;
      next[t] = powed;
    }
    g.swap(next);
  }

  LatticeMinCdf out;
  out.denom = denom;
  out.cdf.resize(table);
  for (std::uint64_t t = 0; t < table; ++t) out.cdf[t] = 1.0 - g[t];
  return out;
}

namespace {

TailEstimate run_tail(const StepSpec& spec, int k, double eps,
                      const std::vector<int>& m_grid, std::uint64_t reps,
                      std::uint64_t seed, int workers, bool right) {
  if (m_grid.empty()) throw DomainError("tail estimate: empty m grid");
  if (reps < 1) throw DomainError("tail estimate: reps must be >= 1");
  for (const int m : m_grid) {
    if (m < 1) throw DomainError("tail estimate: grid entries must be >= 1");
  }
  for (std::size_t i = 1; i < m_grid.size(); ++i) {
    if (m_grid[i] <= m_grid[i - 1]) {
      throw DomainError("tail estimate: m grid must be strictly increasing");
    }
  }

  TailEstimate est;
  est.side = right ? "right" : "left";
  est.eps = eps;
  est.gamma = gamma_constant(spec, k);

  if (right) {
    if (!(eps > 0.0)) throw DomainError("right_tail_estimate: eps must be positive");
    // Bounded lattices break the exponential-tail rate comparison; the rate
    // column is attached only when the step law supplies alpha.
    if (spec.kind == StepKind::kExponential) {
      est.theory_rate = static_cast<double>(k) * spec.rate * eps;
    }
  } else {
    if (!(eps > 0.0) || eps >= est.gamma) {
      throw DomainError("left_tail_estimate: need 0 < eps < gamma");
    }
    est.theory_rate =
        legendre(spec, est.gamma - eps) - std::log(static_cast<double>(k));
  }

  std::vector<std::uint8_t> hit(reps);
  for (std::size_t gi = 0; gi < m_grid.size(); ++gi) {
    const int m = m_grid[gi];
    const double threshold =
        (right ? est.gamma + eps : est.gamma - eps) * static_cast<double>(m);
    par::for_each_index(reps, workers, [&](std::uint64_t r) {
      const std::uint64_t s = derive_seed(seed, gi * reps + r);
      const double value = simulate_min(spec, k, m, s).min_value;
      hit[r] = right ? (value >= threshold) : (value <= threshold);
    });
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < reps; ++r) hits += hit[r];
    const double p = static_cast<double>(hits) / static_cast<double>(reps);
    TailRow row;
    row.m = m;
    row.hits = hits;
    row.reps = reps;
    row.p_hat = p;
    row.se = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    est.rows.push_back(row);
  }

  // Unweighted least squares of -log p_hat against m over well-hit points.
  std::vector<double> xs;
  std::vector<double> ys;
  for (const TailRow& row : est.rows) {
    if (row.hits >= 10) {
      xs.push_back(static_cast<double>(row.m));
      ys.push_back(-std::log(row.p_hat));
    }
  }
  if (xs.size() < 3) {
    throw UnderpoweredError(
        "tail estimate: fewer than 3 grid points with 10 hits; raw counts attached",
        to_json(est).dump());
  }
  double x_bar = 0.0;
  double y_bar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x_bar += xs[i];
    y_bar += ys[i];
  }
  x_bar /= static_cast<double>(xs.size());
  y_bar /= static_cast<double>(xs.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - x_bar) * (ys[i] - y_bar);
    sxx += (xs[i] - x_bar) * (xs[i] - x_bar);
  }
  est.fitted_rate = sxy / sxx;
  return est;
}

}  // namespace

TailEstimate right_tail_estimate(const StepSpec& spec, int k, double eps,
                                 const std::vector<int>& m_grid, std::uint64_t reps,
                                 std::uint64_t seed, int workers) {
  return run_tail(spec, k, eps, m_grid, reps, seed, workers, true);
}

TailEstimate left_tail_estimate(const StepSpec& spec, int k, double eps,
                                const std::vector<int>& m_grid, std::uint64_t reps,
                                std::uint64_t seed, int workers) {
  return run_tail(spec, k, eps, m_grid, reps, seed, workers, false);
}

nlohmann::json to_json(const TailEstimate& est) {
  nlohmann::json rows = nlohmann::json::array();
  for (const TailRow& row : est.rows) {
    rows.push_back({{"m", row.m},
                    {"hits", row.hits},
                    {"reps", row.reps},
                    {"p_hat", row.p_hat},
                    {"se", row.se}});
  }
  return {{"side", est.side},
          {"eps", est.eps},
          {"rows", rows},
          {"fitted_rate",
           est.fitted_rate ? nlohmann::json(*est.fitted_rate) : nlohmann::json(nullptr)},
          {"theory_rate",
           est.theory_rate ? nlohmann::json(*est.theory_rate) : nlohmann::json(nullptr)}};
}

}  // namespace dagdepth
