#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dagdepth/rng.hpp"

namespace dagdepth {

// ----- attachment distributions (law of X on [0,1)) -----

enum class AttachmentKind { kUniform, kPowerTail };

// Validated at construction; invalid parameters throw SpecError.
struct AttachmentSpec {
  AttachmentKind kind = AttachmentKind::kUniform;
  double alpha = 1.0;          // tail exponent; 1 for uniform
  double density_bound = 1.0;  // sup of the density; +inf sentinel when unbounded
  double mean_log = 1.0;       // E[-log X] = 1/alpha

  static AttachmentSpec uniform();
  static AttachmentSpec power_tail(double alpha);

  bool bounded_density() const;
  // Compact label used in CSV rows; contains no commas.
  std::string label() const;
};

bool operator==(const AttachmentSpec& a, const AttachmentSpec& b);

// One draw of X. PowerTail uses the exact inverse CDF U^(1/alpha); alpha = 1
// reproduces the uniform stream bit for bit.
double sample(const AttachmentSpec& spec, SplitMix64& rng);

// ----- step distributions (law of Y >= 0 for the branching walk) -----

enum class StepKind { kExponential, kLattice };

struct StepSpec {
  StepKind kind = StepKind::kExponential;
  double rate = 1.0;            // Exponential only
  std::vector<double> support;  // Lattice only, nonnegative
  std::vector<double> probs;    // Lattice only, positive, sums to 1 within 1e-12
  double mean = 1.0;            // E[Y]

  static StepSpec exponential(double rate);
  static StepSpec lattice(std::vector<double> support, std::vector<double> probs);
  // Y = -log X. For X with CDF t^alpha this is exactly Exponential(alpha),
  // so the construction collapses to an exponential spec.
  static StepSpec from_attachment(const AttachmentSpec& a);

  double min_support() const;       // essential infimum of Y
  double min_support_prob() const;  // P(Y = min_support), 0 for Exponential
  double max_support() const;       // +inf for Exponential
  std::string label() const;
};

bool operator==(const StepSpec& a, const StepSpec& b);

// Cumulant generating function log E[exp(lambda Y)]. Natural log throughout.
// Exponential: finite only for lambda < rate, DomainError otherwise.
// Returns 0 exactly at lambda = 0.
double cumulant(const StepSpec& spec, double lambda);

double mean_step(const StepSpec& spec);

// Maps u in [0,1) to a step draw (inverse-CDF for both kinds).
double sample_step(const StepSpec& spec, double u);

// ----- JSON (de)serialization -----
// Attachment: {"kind":"uniform"} | {"kind":"power_tail","alpha":2.0}
// Step:       {"kind":"exponential","rate":1.0}
//           | {"kind":"lattice","support":[0,1],"probs":[0.5,0.5]}

nlohmann::json to_json(const AttachmentSpec& spec);
AttachmentSpec attachment_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StepSpec& spec);
StepSpec step_from_json(const nlohmann::json& j);

}  // namespace dagdepth
