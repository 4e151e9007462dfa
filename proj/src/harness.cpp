#include "dagdepth/harness.hpp"

#include <cmath>
#include <sstream>

#include "dagdepth/errors.hpp"
#include "dagdepth/parallel.hpp"
#include "dagdepth/rng.hpp"
#include "dagdepth/sarrd.hpp"

namespace dagdepth {

const char* const kCsvHeader =
    "experiment,n_or_m,k,spec,stat,count,mean,variance,q05,q25,q50,q75,q95,reference";

std::string format_double(double v) {
  if (!std::isfinite(v)) return "";
  return nlohmann::json(v).dump();
}

std::string csv_line(const CsvRow& row) {
  std::ostringstream os;
  os << row.experiment << ',' << row.n_or_m << ',' << row.k << ',' << row.spec << ','
     << row.stat << ',' << row.count << ',' << format_double(row.mean) << ','
     << format_double(row.variance);
  for (const double q : row.q) {
    os << ',';
    if (row.has_quantiles) os << format_double(q);
  }
  os << ',';
  if (row.reference) os << format_double(*row.reference);
  return os.str();
}

std::string csv_document(const std::vector<CsvRow>& rows) {
  std::string doc = kCsvHeader;
  doc.push_back('\n');
  for (const CsvRow& row : rows) {
    doc += csv_line(row);
    doc.push_back('\n');
  }
  return doc;
}

nlohmann::json to_json(const CsvRow& row) {
  nlohmann::json j{{"experiment", row.experiment}, {"n_or_m", row.n_or_m},
                   {"k", row.k},                   {"spec", row.spec},
                   {"stat", row.stat},             {"count", row.count},
                   {"mean", row.mean},             {"variance", row.variance}};
  if (row.has_quantiles) {
    j["q05"] = row.q[0];
    j["q25"] = row.q[1];
    j["q50"] = row.q[2];
    j["q75"] = row.q[3];
    j["q95"] = row.q[4];
  }
  j["reference"] = row.reference ? nlohmann::json(*row.reference) : nlohmann::json(nullptr);
  return j;
}

// ----- config JSON -----

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["experiment"] = config.experiment;
  if (config.attachment) j["attachment"] = to_json(*config.attachment);
  if (config.step) j["step"] = to_json(*config.step);
  j["k"] = config.k;
  if (!config.n_grid.empty()) j["n_grid"] = config.n_grid;
  if (!config.m_grid.empty()) j["m_grid"] = config.m_grid;
  j["replications"] = config.replications;
  j["master_seed"] = config.master_seed;
  if (!config.output_path.empty()) j["output_path"] = config.output_path;
  j["worker_count"] = config.worker_count;
  if (!config.side.empty()) {
    j["side"] = config.side;
    j["eps"] = config.eps;
  }
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  config.experiment = j.at("experiment").get<std::string>();
  if (j.contains("attachment")) config.attachment = attachment_from_json(j.at("attachment"));
  if (j.contains("step")) config.step = step_from_json(j.at("step"));
  if (j.contains("k")) config.k = j.at("k").get<int>();
  if (j.contains("n_grid")) config.n_grid = j.at("n_grid").get<std::vector<std::int64_t>>();
  if (j.contains("m_grid")) config.m_grid = j.at("m_grid").get<std::vector<int>>();
  if (j.contains("replications")) config.replications = j.at("replications").get<std::int64_t>();
  if (j.contains("master_seed")) config.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("output_path")) config.output_path = j.at("output_path").get<std::string>();
  if (j.contains("worker_count")) config.worker_count = j.at("worker_count").get<int>();
  if (j.contains("side")) config.side = j.at("side").get<std::string>();
  if (j.contains("eps")) config.eps = j.at("eps").get<double>();
  return config;
}

// ----- runners -----

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw DomainError(message);
}

StepSpec resolve_step(const ExperimentConfig& config) {
  if (config.step) return *config.step;
  if (config.attachment) return StepSpec::from_attachment(*config.attachment);
  throw DomainError("experiment needs an attachment or step spec");
}

std::optional<double> resolve_alpha(const ExperimentConfig& config) {
  if (config.attachment) return config.attachment->alpha;
  if (config.step && config.step->kind == StepKind::kExponential) return config.step->rate;
  return std::nullopt;
}

CsvRow summary_row(const ExperimentConfig& config, const std::string& spec_label,
                   std::int64_t n_or_m, const std::string& stat, const StatSummary& summary,
                   std::optional<double> reference) {
  CsvRow row;
  row.experiment = config.experiment;
  row.n_or_m = n_or_m;
  row.k = config.k;
  row.spec = spec_label;
  row.stat = stat;
  row.count = summary.count();
  row.mean = summary.mean();
  row.variance = summary.variance();
  row.q = summary.quantiles();
  row.has_quantiles = true;
  row.reference = reference;
  return row;
}

void emit(std::ostream* sink, bool& header_done, const std::vector<CsvRow>& rows,
          std::size_t from) {
  if (!sink) return;
  if (!header_done) {
    *sink << kCsvHeader << '\n';
    header_done = true;
  }
  for (std::size_t i = from; i < rows.size(); ++i) *sink << csv_line(rows[i]) << '\n';
  sink->flush();  // one grid point per flush keeps interrupted runs resumable
}

}  // namespace

ConvergenceResult run_convergence(const ExperimentConfig& config, std::ostream* csv_sink) {
  require(config.experiment == "convergence", "run_convergence: wrong experiment kind");
  require(config.attachment.has_value(), "run_convergence: attachment spec required");
  require(!config.n_grid.empty(), "run_convergence: n_grid required");
  require(config.k >= 1, "run_convergence: k must be >= 1");
  require(config.replications >= 1, "run_convergence: replications must be >= 1");

  const AttachmentSpec& att = *config.attachment;
  ConvergenceResult result;
  result.constants = compute_limit_constants(att, config.k);

  std::optional<double> ref_dn = result.constants.lambda_k;
  std::optional<double> ref_min;
  if (result.constants.lambda_k && result.constants.beta) {
    ref_min = *result.constants.beta * *result.constants.lambda_k;
  }
  std::optional<double> ref_max;
  if (att.kind == AttachmentKind::kUniform) {
    ref_max = static_cast<double>(config.k) * std::exp(1.0);
  }

  const auto reps = static_cast<std::uint64_t>(config.replications);
  const std::string spec_label = att.label();
  bool header_done = false;
  std::vector<double> dn(reps);
  std::vector<double> min_half(reps);
  std::vector<double> max_all(reps);

  for (std::size_t gi = 0; gi < config.n_grid.size(); ++gi) {
    const std::int64_t n = config.n_grid[gi];
    const double log_n = std::log(static_cast<double>(n));
    par::for_each_index(reps, config.worker_count, [&](std::uint64_t r) {
      const std::uint64_t seed = derive_seed(config.master_seed, gi * reps + r);
      const DepthProfile profile = generate_depths(n, config.k, att, seed);
      const DepthStats stats = depth_stats(profile);
      dn[r] = stats.d_n / log_n;
      min_half[r] = stats.min_half / log_n;
      max_all[r] = stats.max_all / log_n;
    });
    StatSummary s_dn;
    StatSummary s_min;
    StatSummary s_max;
    for (std::uint64_t r = 0; r < reps; ++r) {
      s_dn.add(dn[r]);
      s_min.add(min_half[r]);
      s_max.add(max_all[r]);
    }
    const std::size_t from = result.rows.size();
    result.rows.push_back(summary_row(config, spec_label, n, "dn_over_logn", s_dn, ref_dn));
    result.rows.push_back(
        summary_row(config, spec_label, n, "minhalf_over_logn", s_min, ref_min));
    result.rows.push_back(
        summary_row(config, spec_label, n, "maxall_over_logn", s_max, ref_max));
    emit(csv_sink, header_done, result.rows, from);
  }
  return result;
}

BrwTailsResult run_brw_tails(const ExperimentConfig& config, std::ostream* csv_sink) {
  require(config.experiment == "brw_tails", "run_brw_tails: wrong experiment kind");
  require(!config.m_grid.empty(), "run_brw_tails: m_grid required");
  require(config.side == "right" || config.side == "left",
          "run_brw_tails: side must be right or left");
  require(config.replications >= 1, "run_brw_tails: replications must be >= 1");

  const StepSpec step = resolve_step(config);
  BrwTailsResult result;
  result.constants = compute_limit_constants(step, config.k, resolve_alpha(config));

  const auto reps = static_cast<std::uint64_t>(config.replications);
  result.estimate =
      config.side == "right"
          ? right_tail_estimate(step, config.k, config.eps, config.m_grid, reps,
                                config.master_seed, config.worker_count)
          : left_tail_estimate(step, config.k, config.eps, config.m_grid, reps,
                               config.master_seed, config.worker_count);

  bool header_done = false;
  const std::string spec_label = step.label();
  const std::string stat = config.side + "_tail_p";
  for (const TailRow& tr : result.estimate.rows) {
    CsvRow row;
    row.experiment = config.experiment;
    row.n_or_m = tr.m;
    row.k = config.k;
    row.spec = spec_label;
    row.stat = stat;
    row.count = tr.reps;
    row.mean = tr.p_hat;
    row.variance = tr.se * tr.se;
    row.has_quantiles = false;
    row.reference = result.estimate.theory_rate;
    result.rows.push_back(row);
    emit(csv_sink, header_done, result.rows, result.rows.size() - 1);
  }
  return result;
}

OracleCheckResult run_oracle_check(const ExperimentConfig& config, std::ostream* csv_sink) {
  require(config.experiment == "oracle_check", "run_oracle_check: wrong experiment kind");
  require(!config.n_grid.empty(), "run_oracle_check: n_grid required");
  require(config.replications >= 1, "run_oracle_check: replications must be >= 1");
  const AttachmentSpec att =
      config.attachment ? *config.attachment : AttachmentSpec::uniform();
  require(att.kind == AttachmentKind::kUniform,
          "run_oracle_check: the exact oracle covers the uniform attachment only");

  OracleCheckResult result;
  const auto reps = static_cast<std::uint64_t>(config.replications);
  const std::string spec_label = att.label();
  bool header_done = false;
  std::vector<double> dn(reps);
  std::vector<double> min_half(reps);
  std::vector<double> max_all(reps);

  for (std::size_t gi = 0; gi < config.n_grid.size(); ++gi) {
    const std::int64_t n = config.n_grid[gi];
    result.exact.push_back(exact_depths(n, config.k, 100'000'000, config.worker_count));
    const ExactDepthResult& exact = result.exact.back();
    par::for_each_index(reps, config.worker_count, [&](std::uint64_t r) {
      const std::uint64_t seed = derive_seed(config.master_seed, gi * reps + r);
      const DepthProfile profile = generate_depths(n, config.k, att, seed);
      const DepthStats stats = depth_stats(profile);
      dn[r] = stats.d_n;
      min_half[r] = stats.min_half;
      max_all[r] = stats.max_all;
    });
    StatSummary s_dn;
    StatSummary s_min;
    StatSummary s_max;
    for (std::uint64_t r = 0; r < reps; ++r) {
      s_dn.add(dn[r]);
      s_min.add(min_half[r]);
      s_max.add(max_all[r]);
    }
    const std::size_t from = result.rows.size();
    result.rows.push_back(
        summary_row(config, spec_label, n, "dn", s_dn, exact.mean_dn.to_double()));
    result.rows.push_back(summary_row(config, spec_label, n, "min_half", s_min,
                                      exact.mean_min_half.to_double()));
    result.rows.push_back(summary_row(config, spec_label, n, "max_all", s_max,
                                      exact.mean_max_all.to_double()));
    emit(csv_sink, header_done, result.rows, from);
  }
  return result;
}

}  // namespace dagdepth
