#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dagdepth/brw.hpp"
#include "dagdepth/constants.hpp"
#include "dagdepth/errors.hpp"
#include "dagdepth/rng.hpp"

using namespace dagdepth;

namespace {

StepSpec bernoulli_half() { return StepSpec::lattice({0.0, 1.0}, {0.5, 0.5}); }

// Re-sums a witness path through the node-indexed variate stream.
double resum_witness(const StepSpec& spec, int k, int m, std::uint64_t seed,
                     const std::vector<int>& witness) {
  REQUIRE(witness.size() == static_cast<std::size_t>(m));
  std::vector<std::uint64_t> subtree(static_cast<std::size_t>(m) + 1);
  subtree[static_cast<std::size_t>(m)] = 1;
  for (int d = m - 1; d >= 0; --d) {
    subtree[static_cast<std::size_t>(d)] =
        1 + static_cast<std::uint64_t>(k) * subtree[static_cast<std::size_t>(d) + 1];
  }
  std::uint64_t node = 0;
  double sum = 0.0;
  for (int d = 0; d < m; ++d) {
    const int c = witness[static_cast<std::size_t>(d)] - 1;
    REQUIRE(c >= 0);
    REQUIRE(c < k);
    node += 1 + static_cast<std::uint64_t>(c) * subtree[static_cast<std::size_t>(d) + 1];
    sum += sample_step(spec, SplitMix64::unit_at(seed, node));
  }
  return sum;
}

}  // namespace

TEST_CASE("generation zero minimum is zero") {
  for (const auto& spec : {StepSpec::exponential(1.0), bernoulli_half()}) {
    const auto r = simulate_min(spec, 2, 0, 5);
    CHECK(r.min_value == 0.0);
    CHECK(r.nodes_visited == 1);
    CHECK(r.m == 0);
  }
}

TEST_CASE("one generation of k = 1 is a single step") {
  const auto spec = StepSpec::exponential(2.0);
  const auto r = simulate_min(spec, 1, 1, 42, true);
  // Root is pre-order node 0, its child node 1; the child's variate has
  // stream index 1.
  const double expect = sample_step(spec, SplitMix64::unit_at(42, 1));
  CHECK(r.min_value == expect);
  REQUIRE(r.witness.size() == 1);
  CHECK(r.witness[0] == 1);
}

TEST_CASE("pruned search equals exhaustive enumeration exactly") {
  int checked = 0;
  for (int s = 0; s < 100; ++s) {
    const int m = 1 + (s % 12);
    const std::uint64_t seed = derive_seed(1000, s);
    for (const auto& spec : {StepSpec::exponential(1.0), bernoulli_half()}) {
      const auto fast = simulate_min(spec, 2, m, seed, true);
      const auto slow = simulate_min_exhaustive(spec, 2, m, seed, true);
      REQUIRE(fast.min_value == slow.min_value);  // identical, not just close
      // Each search reports some argmin leaf; both paths must re-sum to the
      // minimum through the node-indexed stream.
      CHECK(resum_witness(spec, 2, m, seed, fast.witness) == fast.min_value);
      CHECK(resum_witness(spec, 2, m, seed, slow.witness) == slow.min_value);
      if (spec.kind == StepKind::kExponential) {
        // Atomless steps: the argmin is a.s. unique, so the leaves coincide.
        CHECK(fast.witness == slow.witness);
      }
      CHECK(fast.nodes_visited <= slow.nodes_visited);
      ++checked;
    }
  }
  CHECK(checked == 200);

  // Ternary spot check.
  const auto f3 = simulate_min(StepSpec::exponential(1.0), 3, 8, 9);
  const auto s3 = simulate_min_exhaustive(StepSpec::exponential(1.0), 3, 8, 9);
  CHECK(f3.min_value == s3.min_value);
}

TEST_CASE("witness letters reproduce the minimum") {
  const auto spec = StepSpec::exponential(1.0);
  const auto r = simulate_min(spec, 3, 10, 77, true);
  REQUIRE(r.witness.size() == 10);
  // Walk the witness path and re-sum its steps from the node-indexed stream.
  std::uint64_t node = 0;
  std::vector<std::uint64_t> subtree(11);  // subtree sizes by depth, leaf = 1
  subtree[10] = 1;
  for (int d = 9; d >= 0; --d) subtree[d] = 1 + 3 * subtree[d + 1];
  double sum = 0.0;
  for (int d = 0; d < 10; ++d) {
    const int c = r.witness[static_cast<std::size_t>(d)] - 1;
    REQUIRE(c >= 0);
    REQUIRE(c < 3);
    node = node + 1 + static_cast<std::uint64_t>(c) * subtree[static_cast<std::size_t>(d) + 1];
    sum += sample_step(spec, SplitMix64::unit_at(77, node));
  }
  CHECK(sum == r.min_value);
}

TEST_CASE("fair Bernoulli: P(M_1 = 0) = 3/4") {
  const auto spec = bernoulli_half();
  const int reps = 100'000;
  int zero = 0;
  for (int r = 0; r < reps; ++r) {
    if (simulate_min(spec, 2, 1, derive_seed(8, r)).min_value == 0.0) ++zero;
  }
  const double p = 0.75;
  const double sigma = std::sqrt(p * (1 - p) / reps);
  CHECK(std::abs(static_cast<double>(zero) / reps - p) < 3 * sigma);
}

TEST_CASE("exact lattice minimum law: hand values and simulation agreement") {
  const auto spec = bernoulli_half();
  const auto cdf1 = exact_lattice_min_cdf(spec, 2, 1);
  CHECK(cdf1.prob_le(0.0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(cdf1.prob_le(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cdf1.prob_le(-0.5) == 0.0);

  // P(M_2 = 0) = (3/4)^2 * ... hand recursion gives 39/64.
  const auto cdf2 = exact_lattice_min_cdf(spec, 2, 2);
  CHECK(cdf2.prob_le(0.0) == doctest::Approx(39.0 / 64.0).epsilon(1e-14));
  CHECK(cdf2.prob_le(2.0) == doctest::Approx(1.0).epsilon(1e-14));

  // Dvoretzky-Kiefer-Wolfowitz band around the empirical CDF at m = 6.
  const int m = 6;
  const auto cdf = exact_lattice_min_cdf(spec, 2, m);
  const int reps = 50'000;
  std::vector<int> counts(m + 1, 0);
  for (int r = 0; r < reps; ++r) {
    const double v = simulate_min(spec, 2, m, derive_seed(20, r)).min_value;
    ++counts[static_cast<int>(v)];
  }
  const double band = std::sqrt(std::log(2.0 / 1e-3) / (2.0 * reps));
  int cum = 0;
  for (int t = 0; t <= m; ++t) {
    cum += counts[t];
    CHECK(std::abs(static_cast<double>(cum) / reps - cdf.prob_le(t)) < band);
  }

  // Non-unit grid with fractional support.
  const auto tri = StepSpec::lattice({0.0, 0.5, 1.0}, {0.3, 0.4, 0.3});
  const auto ctri = exact_lattice_min_cdf(tri, 2, 1);
  // P(M_1 = 0) = 1 - (1 - 0.3)^2 = 0.51
  CHECK(ctri.prob_le(0.0) == doctest::Approx(0.51).epsilon(1e-12));
  CHECK(ctri.prob_le(0.49) == doctest::Approx(0.51).epsilon(1e-12));
  CHECK(ctri.prob_le(0.5) == doctest::Approx(1.0 - std::pow(0.3, 2)).epsilon(1e-12));

  // Generation zero never moves.
  const auto cdf0 = exact_lattice_min_cdf(spec, 2, 0);
  CHECK(cdf0.prob_le(0.0) == 1.0);

  CHECK_THROWS_AS(exact_lattice_min_cdf(StepSpec::exponential(1.0), 2, 3), DomainError);
  CHECK_THROWS_AS(exact_lattice_min_cdf(spec, 2, 40, 30), BudgetError);
}

TEST_CASE("minimum grows linearly: LLN band around gamma") {
  const auto spec = StepSpec::exponential(1.0);
  const double gamma = gamma_constant(spec, 2);
  const int m = 30;
  const int reps = 400;
  double sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    sum += simulate_min(spec, 2, m, derive_seed(301, r)).min_value;
  }
  const double rate = sum / reps / m;
  // Slow convergence from above (the log-correction term), hence the skew.
  CHECK(rate > gamma - 0.02);
  CHECK(rate < gamma + 0.12);
}

TEST_CASE("mean minimum is monotone in generation and subadditive") {
  const auto spec = StepSpec::exponential(1.0);
  const int reps = 2'000;
  std::vector<double> mean(13, 0.0);
  for (int m = 1; m <= 12; ++m) {
    double sum = 0.0;
    for (int r = 0; r < reps; ++r) {
      sum += simulate_min(spec, 2, m, derive_seed(40 + m, r)).min_value;
    }
    mean[static_cast<std::size_t>(m)] = sum / reps;
  }
  for (int m = 2; m <= 12; ++m) {
    CHECK(mean[static_cast<std::size_t>(m)] > mean[static_cast<std::size_t>(m - 1)]);
  }
  // E[M_{a+b}] <= E[M_a] + E[M_b] up to Monte Carlo noise.
  CHECK(mean[12] <= mean[6] + mean[6] + 0.05);
  CHECK(mean[10] <= mean[4] + mean[6] + 0.05);
}

TEST_CASE("tail estimates return rates near theory") {
  const auto spec = StepSpec::exponential(1.0);
  const double gamma = gamma_constant(spec, 2);

  const auto right = right_tail_estimate(spec, 2, 0.3, {6, 9, 12, 15}, 40'000, 99, 0);
  CHECK(right.side == "right");
  REQUIRE(right.theory_rate.has_value());
  CHECK(*right.theory_rate == doctest::Approx(2 * 1.0 * 0.3).epsilon(1e-12));
  REQUIRE(right.fitted_rate.has_value());
  CHECK(right.rows.size() == 4);
  for (const auto& row : right.rows) {
    CHECK(row.reps == 40'000);
    CHECK(row.p_hat == doctest::Approx(static_cast<double>(row.hits) / row.reps));
  }
  // Loose agreement; tightness is the acceptance binary's job.
  CHECK(*right.fitted_rate > 0.25 * *right.theory_rate);
  CHECK(*right.fitted_rate < 2.5 * *right.theory_rate);

  const auto left = left_tail_estimate(spec, 2, 0.08, {6, 9, 12, 15}, 40'000, 98, 0);
  CHECK(left.side == "left");
  REQUIRE(left.theory_rate.has_value());
  CHECK(*left.theory_rate ==
        doctest::Approx(legendre(spec, gamma - 0.08) - std::log(2.0)).epsilon(1e-10));
  REQUIRE(left.fitted_rate.has_value());
  CHECK(*left.fitted_rate > 0.25 * *left.theory_rate);
  CHECK(*left.fitted_rate < 2.5 * *left.theory_rate);

  // Estimation is deterministic in (seed, grid, reps) and worker count.
  const auto again = right_tail_estimate(spec, 2, 0.3, {6, 9, 12, 15}, 40'000, 99, 4);
  for (std::size_t i = 0; i < right.rows.size(); ++i) {
    CHECK(again.rows[i].hits == right.rows[i].hits);
  }
}

TEST_CASE("lattice right tail is accepted without a theory rate") {
  const auto est = right_tail_estimate(bernoulli_half(), 2, 0.25, {4, 6, 8, 10}, 20'000, 7, 0);
  CHECK_FALSE(est.theory_rate.has_value());
  CHECK(est.gamma == doctest::Approx(0.0));
  CHECK(est.rows.size() == 4);
}

TEST_CASE("tail estimate argument errors") {
  const auto spec = StepSpec::exponential(1.0);
  const double gamma = gamma_constant(spec, 2);
  CHECK_THROWS_AS(right_tail_estimate(spec, 2, -0.1, {4, 6, 8}, 100, 1, 0), DomainError);
  CHECK_THROWS_AS(right_tail_estimate(spec, 2, 0.1, {}, 100, 1, 0), DomainError);
  CHECK_THROWS_AS(right_tail_estimate(spec, 2, 0.1, {4, 4}, 100, 1, 0), DomainError);
  CHECK_THROWS_AS(right_tail_estimate(spec, 2, 0.1, {4, 6}, 0, 1, 0), DomainError);
  // Left tail threshold must stay strictly inside (0, gamma).
  CHECK_THROWS_AS(left_tail_estimate(spec, 2, gamma, {4, 6, 8}, 100, 1, 0), DomainError);
  CHECK_THROWS_AS(left_tail_estimate(spec, 2, gamma + 0.1, {4, 6, 8}, 100, 1, 0), DomainError);
  // Bernoulli has gamma = 0: no admissible left epsilon.
  CHECK_THROWS_AS(left_tail_estimate(bernoulli_half(), 2, 0.01, {4, 6}, 100, 1, 0),
                  DomainError);
}

TEST_CASE("underpowered estimation throws with the raw counts attached") {
  // Extreme threshold: P(M_m >= (gamma+8) m) is essentially zero.
  const auto spec = StepSpec::exponential(1.0);
  try {
    right_tail_estimate(spec, 2, 8.0, {10, 14, 18}, 200, 5, 0);
    FAIL("expected UnderpoweredError");
  } catch (const UnderpoweredError& e) {
    CHECK(e.exit_code() == 3);
    const auto payload = nlohmann::json::parse(e.payload_json());
    CHECK(payload.at("side") == "right");
    CHECK(payload.at("rows").size() == 3);
    CHECK(payload.at("fitted_rate").is_null());
    for (const auto& row : payload.at("rows")) {
      CHECK(row.at("hits").get<std::uint64_t>() < 10);
    }
  }
}

TEST_CASE("tail estimate JSON schema") {
  const auto spec = StepSpec::exponential(1.0);
  const auto est = right_tail_estimate(spec, 2, 0.4, {5, 8, 11}, 20'000, 3, 0);
  const auto j = to_json(est);
  CHECK(j.at("side") == "right");
  CHECK(j.at("eps") == 0.4);
  REQUIRE(j.at("rows").is_array());
  CHECK(j.at("rows").size() == 3);
  for (const auto& row : j.at("rows")) {
    CHECK(row.contains("m"));
    CHECK(row.contains("hits"));
    CHECK(row.contains("reps"));
    CHECK(row.contains("p_hat"));
    CHECK(row.contains("se"));
  }
  CHECK(j.at("theory_rate").get<double>() == doctest::Approx(0.8));
  CHECK(j.contains("fitted_rate"));
  // Schema is exactly these five keys.
  CHECK(j.size() == 5);
}

TEST_CASE("budget guards on tree size") {
  // k^m overflows the frame budget long before memory would.
  CHECK_THROWS_AS(simulate_min_exhaustive(StepSpec::exponential(1.0), 2, 80, 1), BudgetError);
}
