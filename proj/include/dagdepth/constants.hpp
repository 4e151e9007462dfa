#pragma once

#include <optional>

#include <json.hpp>

#include "dagdepth/distributions.hpp"

namespace dagdepth {

// Limit constants of one (step law, k) pair. lambda_k is absent when the
// longest-path rate is infinite (atom at 0 with k * P(Y=0) >= 1); alpha and
// beta are absent when the spec has no exponential tail exponent.
struct LimitConstants {
  int k = 2;
  std::optional<double> lambda_k;
  double gamma = 0.0;
  std::optional<double> beta;
  std::optional<double> alpha;
  double mean_y = 1.0;
};

// Legendre dual sup_lambda { lambda*z - cumulant(lambda) }. Analytic fast
// paths for Exponential(rate) and the fair {0,1} lattice; other lattices go
// through golden-section maximization. DomainError outside the attainable
// range of means; tol must lie in (0, 1e-4].
double legendre(const StepSpec& spec, double z, double tol = 1e-10);

namespace detail {
// Numeric path (bracket expansion + golden section), exposed so tests can
// cross-check it against the analytic fast paths.
double legendre_numeric(const StepSpec& spec, double z, double tol);
}  // namespace detail

// inf{ z <= E[Y] : legendre(z) < log k }, the linear growth rate of the
// branching walk minimum. Returns the essential infimum when the rate
// function is already <= log k there (atom case); returns E[Y] for k = 1.
double gamma_constant(const StepSpec& spec, int k, double tol = 1e-10);

// Root of legendre(1/z) = log k on z >= 1/E[Y], the longest-path rate.
// For bounded lattices with y_min > 0 the sup can sit at the hull boundary
// 1/y_min (returned directly); NoRootError when the rate is infinite.
double lambda_k(const StepSpec& spec, int k, double tol = 1e-10);

// max(1 - 1/(k*alpha), 0).
double beta_constant(double alpha, int k);

// z * log(k*e/z) - 1; vanishes exactly at the uniform-attachment rate.
double uniform_equation_residual(double z, int k);

LimitConstants compute_limit_constants(const StepSpec& spec, int k,
                                       std::optional<double> alpha = std::nullopt,
                                       double tol = 1e-10);
LimitConstants compute_limit_constants(const AttachmentSpec& spec, int k,
                                       double tol = 1e-10);

nlohmann::json to_json(const LimitConstants& c);

}  // namespace dagdepth
