#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dagdepth/brw.hpp"
#include "dagdepth/constants.hpp"
#include "dagdepth/distributions.hpp"
#include "dagdepth/oracle.hpp"
#include "dagdepth/stats.hpp"

namespace dagdepth {

// One experiment description; round-trips through snake_case JSON unchanged.
// side/eps apply to brw_tails only; worker_count 0 means auto.
struct ExperimentConfig {
  std::string experiment;  // "convergence" | "brw_tails" | "oracle_check"
  std::optional<AttachmentSpec> attachment;
  std::optional<StepSpec> step;
  int k = 2;
  std::vector<std::int64_t> n_grid;
  std::vector<int> m_grid;
  std::int64_t replications = 100;
  std::uint64_t master_seed = 42;
  std::string output_path;
  int worker_count = 0;
  std::string side;
  double eps = 0.0;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

// ----- CSV output -----

extern const char* const kCsvHeader;

struct CsvRow {
  std::string experiment;
  std::int64_t n_or_m = 0;
  int k = 2;
  std::string spec;
  std::string stat;
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  std::array<double, 5> q{};
  bool has_quantiles = false;
  std::optional<double> reference;
};

// Shortest decimal that round-trips; empty for non-finite values.
std::string format_double(double v);
std::string csv_line(const CsvRow& row);
std::string csv_document(const std::vector<CsvRow>& rows);
nlohmann::json to_json(const CsvRow& row);

// ----- runners -----
// Each runner derives one seed per replication from the master seed (stream
// index = grid_index * replications + rep), collects per-replication values
// into slots, and reduces them in index order, so results are identical for
// every worker count. When a CSV sink is given the header plus each grid
// point's rows are flushed as soon as that grid point finishes.

struct ConvergenceResult {
  LimitConstants constants;
  std::vector<CsvRow> rows;  // stats dn_over_logn, minhalf_over_logn, maxall_over_logn
};

ConvergenceResult run_convergence(const ExperimentConfig& config,
                                  std::ostream* csv_sink = nullptr);

struct BrwTailsResult {
  LimitConstants constants;
  TailEstimate estimate;
  std::vector<CsvRow> rows;
};

BrwTailsResult run_brw_tails(const ExperimentConfig& config,
                             std::ostream* csv_sink = nullptr);

struct OracleCheckResult {
  std::vector<ExactDepthResult> exact;
  std::vector<CsvRow> rows;  // Monte Carlo means with exact references
};

OracleCheckResult run_oracle_check(const ExperimentConfig& config,
                                   std::ostream* csv_sink = nullptr);

}  // namespace dagdepth
