#include "dagdepth/constants.hpp"

#include <cmath>
#include <limits>

#include "dagdepth/errors.hpp"

namespace dagdepth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kIterCap = 200;
constexpr double kBracketCap = 1e9;

bool is_fair_binary(const StepSpec& s) {
  if (s.kind != StepKind::kLattice || s.support.size() != 2) return false;
  const bool points = (s.support[0] == 0.0 && s.support[1] == 1.0) ||
                      (s.support[0] == 1.0 && s.support[1] == 0.0);
  return points && s.probs[0] == 0.5 && s.probs[1] == 0.5;
}

// Mean of the exponentially tilted lattice law, anchored for stability.
double tilted_mean(const StepSpec& s, double lambda) {
  const double anchor = lambda > 0.0 ? s.max_support() : s.min_support();
  double w = 0.0;
  double wy = 0.0;
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    const double e = s.probs[i] * std::exp(lambda * (s.support[i] - anchor));
    w += e;
    wy += e * s.support[i];
  }
  return wy / w;
}

void check_tol(double tol) {
  if (!(tol > 0.0) || tol > 1e-4) throw DomainError("tol must lie in (0, 1e-4]");
}

// Value the rate function approaches at the lower support edge:
// -log P(Y = y_min) for lattices, +inf for continuous laws.
double edge_rate(const StepSpec& spec) {
  if (spec.kind == StepKind::kExponential) return kInf;
  return -std::log(spec.min_support_prob());
}

}  // namespace

namespace detail {

double legendre_numeric(const StepSpec& spec, double z, double tol) {
  if (spec.kind != StepKind::kLattice) {
    throw DomainError("legendre_numeric: lattice specs only");
  }
  const double y_min = spec.min_support();
  const double y_max = spec.max_support();
  if (z < y_min || z > y_max) {
    throw DomainError("legendre: z outside the attainable range of means");
  }
  if (z == y_min) return -std::log(spec.min_support_prob());
  if (z == y_max) {
    double p = 0.0;
    for (std::size_t i = 0; i < spec.support.size(); ++i) {
      if (spec.support[i] == y_max) p += spec.probs[i];
    }
    return -std::log(p);
  }

  // g(lambda) = lambda*z - cumulant(lambda) is concave with derivative
  // z - tilted_mean(lambda); expand until the derivative changes sign.
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < kIterCap && tilted_mean(spec, lo) > z; ++i) lo *= 2.0;
  for (int i = 0; i < kIterCap && tilted_mean(spec, hi) < z; ++i) hi *= 2.0;

  const auto g = [&](double lambda) { return lambda * z - cumulant(spec, lambda); };
  const double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double g1 = g(x1);
  double g2 = g(x2);
  const double width_goal = std::max(1e-13, tol * 1e-4);
  for (int i = 0; i < kIterCap && (b - a) > width_goal; ++i) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + inv_phi * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - inv_phi * (b - a);
      g1 = g(x1);
    }
  }
  return g(0.5 * (a + b));
}

}  // namespace detail

double legendre(const StepSpec& spec, double z, double tol) {
  check_tol(tol);
  if (spec.kind == StepKind::kExponential) {
    // sup at lambda = rate - 1/z, giving rate*z - 1 - log(rate*z).
    if (!(z > 0.0)) throw DomainError("legendre: z outside the attainable range of means");
    return spec.rate * z - 1.0 - std::log(spec.rate * z);
  }
  if (is_fair_binary(spec)) {
    if (z < 0.0 || z > 1.0) {
      throw DomainError("legendre: z outside the attainable range of means");
    }
    if (z == 0.0 || z == 1.0) return std::log(2.0);
    return z * std::log(2.0 * z) + (1.0 - z) * std::log(2.0 * (1.0 - z));
  }
  return detail::legendre_numeric(spec, z, tol);
}

double gamma_constant(const StepSpec& spec, int k, double tol) {
  check_tol(tol);
  if (k < 1) throw DomainError("gamma_constant: k must be >= 1");
  const double mean = mean_step(spec);
  // The rate function is positive below the mean, so for k = 1 the strict
  // sublevel set is empty and the growth rate is the plain LLN mean.
  if (k == 1) return mean;

  const double log_k = std::log(static_cast<double>(k));
  const double z_inf = spec.min_support();
  if (edge_rate(spec) <= log_k) return z_inf;

  // Bisection on the decreasing rate function over (z_inf, mean]:
  // legendre(lo) >= log k conceptually, legendre(hi) < log k.
  const double inner_tol = std::max(1e-14, tol * 1e-2);
  double lo = z_inf;
  double hi = mean;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (legendre(spec, mid, inner_tol) < log_k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double lambda_k(const StepSpec& spec, int k, double tol) {
  check_tol(tol);
  if (k < 2) throw DomainError("lambda_k: k must be >= 2");
  const double mean = mean_step(spec);
  if (!(mean > 0.0)) {
    throw NoRootError("lambda_k: zero mean step, longest-path rate is infinite");
  }

  const double log_k = std::log(static_cast<double>(k));
  const double inner_tol = std::max(1e-14, tol * 1e-2);
  const auto f = [&](double z) { return legendre(spec, 1.0 / z, inner_tol) - log_k; };

  const double y_min = spec.min_support();
  double lo = 1.0 / mean;  // legendre(mean) = 0 <= log k
  double hi;
  if (y_min > 0.0) {
    // Bounded support away from 0: the admissible ray ends at 1/y_min.
    const double z_cap = 1.0 / y_min;
    if (edge_rate(spec) <= log_k) return z_cap;  // sup attained at the hull edge
    hi = z_cap;
  } else {
    const double p0 = spec.min_support_prob();
    if (p0 > 0.0 && -std::log(p0) <= log_k) {
      throw NoRootError("lambda_k: k*P(Y=0) >= 1, longest-path rate is infinite");
    }
    hi = lo;
    bool crossed = false;
    for (int i = 0; i < kIterCap && hi <= kBracketCap; ++i) {
      hi *= 2.0;
      if (f(hi) > 0.0) {
        crossed = true;
        break;
      }
    }
    if (!crossed) throw NoRootError("lambda_k: no root within bracket cap 1e9");
    lo = hi / 2.0;
  }

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double beta_constant(double alpha, int k) {
  if (!(alpha > 0.0)) throw DomainError("beta_constant: alpha must be positive");
  if (k < 1) throw DomainError("beta_constant: k must be >= 1");
  return std::max(1.0 - 1.0 / (static_cast<double>(k) * alpha), 0.0);
}

double uniform_equation_residual(double z, int k) {
  if (!(z > 0.0)) throw DomainError("uniform_equation_residual: z must be positive");
  if (k < 1) throw DomainError("uniform_equation_residual: k must be >= 1");
  return z * (std::log(static_cast<double>(k)) + 1.0 - std::log(z)) - 1.0;
}

LimitConstants compute_limit_constants(const StepSpec& spec, int k,
                                       std::optional<double> alpha, double tol) {
  LimitConstants c;
  c.k = k;
  c.mean_y = mean_step(spec);
  c.gamma = gamma_constant(spec, k, tol);
  if (k >= 2) {
    try {
      c.lambda_k = lambda_k(spec, k, tol);
    } catch (const NoRootError&) {
      c.lambda_k = std::nullopt;  // rate is infinite; reported as null
    }
  }
  if (alpha) {
    c.alpha = alpha;
    c.beta = beta_constant(*alpha, k);
  }
  return c;
}

LimitConstants compute_limit_constants(const AttachmentSpec& spec, int k, double tol) {
  return compute_limit_constants(StepSpec::from_attachment(spec), k, spec.alpha, tol);
}

nlohmann::json to_json(const LimitConstants& c) {
  nlohmann::json j;
  j["k"] = c.k;
  j["lambda_k"] = c.lambda_k ? nlohmann::json(*c.lambda_k) : nlohmann::json(nullptr);
  j["gamma"] = c.gamma;
  j["beta"] = c.beta ? nlohmann::json(*c.beta) : nlohmann::json(nullptr);
  j["alpha"] = c.alpha ? nlohmann::json(*c.alpha) : nlohmann::json(nullptr);
  j["mean_y"] = c.mean_y;
  return j;
}

}  // namespace dagdepth
