#include "dagdepth/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dagdepth/errors.hpp"

namespace dagdepth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-round-trip decimal for labels; reuses the JSON dumper.
std::string num_label(double v) { return nlohmann::json(v).dump(); }

}  // namespace

// ----- AttachmentSpec -----

AttachmentSpec AttachmentSpec::uniform() {
  return AttachmentSpec{AttachmentKind::kUniform, 1.0, 1.0, 1.0};
}

AttachmentSpec AttachmentSpec::power_tail(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw SpecError("power_tail: alpha must be a positive real");
  }
  // Density alpha*t^(alpha-1) on [0,1]: bounded by alpha iff alpha >= 1.
  const double bound = alpha >= 1.0 ? alpha : kInf;
  return AttachmentSpec{AttachmentKind::kPowerTail, alpha, bound, 1.0 / alpha};
}

bool AttachmentSpec::bounded_density() const { return std::isfinite(density_bound); }

std::string AttachmentSpec::label() const {
  if (kind == AttachmentKind::kUniform) return "uniform";
  return "power_tail(" + num_label(alpha) + ")";
}

bool operator==(const AttachmentSpec& a, const AttachmentSpec& b) {
  return a.kind == b.kind && a.alpha == b.alpha;
}

double sample(const AttachmentSpec& spec, SplitMix64& rng) {
  const double u = rng.next_double();
  if (spec.kind == AttachmentKind::kUniform || spec.alpha == 1.0) return u;
  return std::pow(u, 1.0 / spec.alpha);
}

// ----- StepSpec -----

StepSpec StepSpec::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw SpecError("exponential: rate must be a positive real");
  }
  StepSpec s;
  s.kind = StepKind::kExponential;
  s.rate = rate;
  s.mean = 1.0 / rate;
  return s;
}

StepSpec StepSpec::lattice(std::vector<double> support, std::vector<double> probs) {
  if (support.empty() || support.size() != probs.size()) {
    throw SpecError("lattice: support and probs must be non-empty and equal length");
  }
  double total = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!(support[i] >= 0.0) || !std::isfinite(support[i])) {
      throw SpecError("lattice: support points must be nonnegative reals");
    }
    if (!(probs[i] > 0.0) || probs[i] > 1.0) {
      throw SpecError("lattice: probabilities must lie in (0, 1]");
    }
    total += probs[i];
    mean += probs[i] * support[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw SpecError("lattice: probabilities must sum to 1 within 1e-12");
  }
  StepSpec s;
  s.kind = StepKind::kLattice;
  s.rate = 0.0;
  s.support = std::move(support);
  s.probs = std::move(probs);
  s.mean = mean;
  return s;
}

StepSpec StepSpec::from_attachment(const AttachmentSpec& a) {
  return exponential(a.alpha);
}

double StepSpec::min_support() const {
  if (kind == StepKind::kExponential) return 0.0;
  return *std::min_element(support.begin(), support.end());
}

double StepSpec::min_support_prob() const {
  if (kind == StepKind::kExponential) return 0.0;
  const double lo = min_support();
  double p = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] == lo) p += probs[i];
  }
  return p;
}

double StepSpec::max_support() const {
  if (kind == StepKind::kExponential) return kInf;
  return *std::max_element(support.begin(), support.end());
}

std::string StepSpec::label() const {
  if (kind == StepKind::kExponential) return "exponential(" + num_label(rate) + ")";
  std::ostringstream os;
  os << "lattice(";
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (i) os << '|';
    os << num_label(support[i]) << ':' << num_label(probs[i]);
  }
  os << ')';
  return os.str();
}

bool operator==(const StepSpec& a, const StepSpec& b) {
  return a.kind == b.kind && a.rate == b.rate && a.support == b.support && a.probs == b.probs;
}

double cumulant(const StepSpec& spec, double lambda) {
  if (lambda == 0.0) return 0.0;
  if (spec.kind == StepKind::kExponential) {
    if (lambda >= spec.rate) {
      throw DomainError("cumulant: lambda >= rate, transform is infinite there");
    }
    return std::log(spec.rate / (spec.rate - lambda));
  }
  // log-sum-exp anchored at the dominating support point.
  double anchor = lambda > 0.0 ? spec.max_support() : spec.min_support();
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.support.size(); ++i) {
    acc += spec.probs[i] * std::exp(lambda * (spec.support[i] - anchor));
  }
  return lambda * anchor + std::log(acc);
}

double mean_step(const StepSpec& spec) { return spec.mean; }

double sample_step(const StepSpec& spec, double u) {
  if (spec.kind == StepKind::kExponential) {
    // u in [0,1) keeps 1-u in (0,1], so the log is finite.
    return -std::log1p(-u) / spec.rate;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < spec.support.size(); ++i) {
    acc += spec.probs[i];
    if (u < acc) return spec.support[i];
  }
  return spec.support.back();
}

// ----- JSON -----

nlohmann::json to_json(const AttachmentSpec& spec) {
  if (spec.kind == AttachmentKind::kUniform) return {{"kind", "uniform"}};
  return {{"kind", "power_tail"}, {"alpha", spec.alpha}};
}

AttachmentSpec attachment_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return AttachmentSpec::uniform();
  if (kind == "power_tail") return AttachmentSpec::power_tail(j.at("alpha").get<double>());
  throw SpecError("attachment_from_json: unknown kind '" + kind + "'");
}

nlohmann::json to_json(const StepSpec& spec) {
  if (spec.kind == StepKind::kExponential) {
    return {{"kind", "exponential"}, {"rate", spec.rate}};
  }
  return {{"kind", "lattice"}, {"support", spec.support}, {"probs", spec.probs}};
}

StepSpec step_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "exponential") return StepSpec::exponential(j.at("rate").get<double>());
  if (kind == "lattice") {
    return StepSpec::lattice(j.at("support").get<std::vector<double>>(),
                             j.at("probs").get<std::vector<double>>());
  }
  throw SpecError("step_from_json: unknown kind '" + kind + "'");
}

}  // namespace dagdepth
