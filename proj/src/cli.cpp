#include "dagdepth/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "dagdepth/brw.hpp"
#include "dagdepth/constants.hpp"
#include "dagdepth/distributions.hpp"
#include "dagdepth/errors.hpp"
#include "dagdepth/harness.hpp"
#include "dagdepth/oracle.hpp"
#include "dagdepth/parallel.hpp"
#include "dagdepth/rng.hpp"
#include "dagdepth/sarrd.hpp"
#include "dagdepth/stats.hpp"

namespace dagdepth {

namespace {

// --dist syntax: uniform | power:ALPHA | exp:RATE | lattice:FILE.
struct DistChoice {
  std::optional<AttachmentSpec> attachment;
  std::optional<StepSpec> step;

  AttachmentSpec require_attachment(const char* context) const {
    if (!attachment) {
      throw DomainError(std::string(context) + " requires an attachment law "
                        "(uniform or power:ALPHA)");
    }
    return *attachment;
  }

  StepSpec to_step() const {
    if (step) return *step;
    return StepSpec::from_attachment(*attachment);
  }

  std::optional<double> alpha() const {
    if (attachment) return attachment->alpha;
    if (step && step->kind == StepKind::kExponential) return step->rate;
    return std::nullopt;
  }

  std::string label() const { return attachment ? attachment->label() : step->label(); }
};

double parse_real(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw DomainError(std::string("invalid ") + what);
    return v;
  } catch (const std::logic_error&) {
    throw DomainError(std::string("invalid ") + what + ": '" + text + "'");
  }
}

DistChoice parse_dist(const std::string& text) {
  if (text == "uniform") return {AttachmentSpec::uniform(), std::nullopt};
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw DomainError("--dist must be uniform, power:ALPHA, exp:RATE or lattice:FILE");
  }
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (kind == "power") {
    return {AttachmentSpec::power_tail(parse_real(rest, "power exponent")), std::nullopt};
  }
  if (kind == "exp") {
    return {std::nullopt, StepSpec::exponential(parse_real(rest, "exponential rate"))};
  }
  if (kind == "lattice") {
    std::ifstream in(rest);
    if (!in) throw DomainError("lattice spec file not readable: " + rest);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw SpecError("lattice spec file is not valid JSON: " + std::string(e.what()));
    }
    return {std::nullopt, step_from_json(j)};
  }
  throw DomainError("--dist must be uniform, power:ALPHA, exp:RATE or lattice:FILE");
}

// Grid syntax: "a,b,c" or geometric "a:b:xSTEP"; scientific notation allowed.
std::vector<std::int64_t> parse_grid(const std::string& text) {
  std::vector<std::int64_t> grid;
  const auto push_value = [&grid](double v) {
    const double r = std::round(v);
    if (!(r >= 1.0) || std::abs(v - r) > 1e-6 * std::max(1.0, std::abs(v))) {
      throw DomainError("grid entries must be positive integers");
    }
    grid.push_back(static_cast<std::int64_t>(r));
  };

  if (text.find(':') != std::string::npos) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos || text.size() <= c2 + 1 || text[c2 + 1] != 'x') {
      throw DomainError("geometric grids use the form a:b:xSTEP");
    }
    const double a = parse_real(text.substr(0, c1), "grid start");
    const double b = parse_real(text.substr(c1 + 1, c2 - c1 - 1), "grid end");
    const double step = parse_real(text.substr(c2 + 2), "grid step");
    if (!(a >= 1.0) || !(b >= a) || !(step > 1.0)) {
      throw DomainError("geometric grids need 1 <= a <= b and step > 1");
    }
    for (double v = a; v <= b * (1.0 + 1e-12); v *= step) push_value(v);
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const std::string item =
          text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (item.empty()) throw DomainError("grid entries must be positive integers");
      push_value(parse_real(item, "grid entry"));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (grid.empty()) throw DomainError("empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw DomainError("grid entries must increase");
  }
  return grid;
}

std::vector<int> parse_m_grid(const std::string& text) {
  std::vector<int> out;
  for (const std::int64_t v : parse_grid(text)) {
    if (v > (std::int64_t{1} << 30)) throw DomainError("m grid entry out of range");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// DAGDEPTH_WORKERS beats --workers when set.
int effective_workers(int flag_value) {
  const char* env = std::getenv("DAGDEPTH_WORKERS");
  if (env == nullptr || *env == '\0') return flag_value;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 0 || v > 4096) {
    throw DomainError("DAGDEPTH_WORKERS must be an integer in [0, 4096]");
  }
  return static_cast<int>(v);
}

void print_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

CsvRow value_row(const std::string& experiment, std::int64_t n_or_m, int k,
                 const std::string& spec, const std::string& stat, double value) {
  CsvRow row;
  row.experiment = experiment;
  row.n_or_m = n_or_m;
  row.k = k;
  row.spec = spec;
  row.stat = stat;
  row.count = 1;
  row.mean = value;
  row.variance = 0.0;
  row.has_quantiles = false;
  return row;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and numerics for recursive DAG depths and "
               "branching random walk minima"};
  app.require_subcommand(1);

  std::string dist_text = "uniform";
  int k = 2;
  std::uint64_t seed = 42;
  std::int64_t reps = 100;
  int workers = 0;
  std::string format = "json";
  std::string output_path;
  double tol = 1e-10;

  auto* cmd_constants = app.add_subcommand("constants", "Limit constants for one law");
  cmd_constants->add_option("--dist", dist_text, "uniform | power:A | exp:R | lattice:FILE");
  cmd_constants->add_option("--k", k, "branching factor / parent count");
  cmd_constants->add_option("--tol", tol, "root-finder tolerance");

  std::int64_t n = 0;
  bool store_parents = false;
  std::string dump_path;
  auto* cmd_dag = app.add_subcommand("simulate-dag", "One recursive DAG realization");
  cmd_dag->add_option("--n", n, "number of non-root nodes")->required();
  cmd_dag->add_option("--k", k, "parents per node");
  cmd_dag->add_option("--dist", dist_text, "attachment law");
  cmd_dag->add_option("--seed", seed, "seed");
  cmd_dag->add_flag("--store-parents", store_parents, "keep the parent table");
  cmd_dag->add_option("--dump", dump_path, "write the binary depth dump here");
  cmd_dag->add_option("--format", format, "json | csv");

  int m = 0;
  bool witness = false;
  auto* cmd_brw = app.add_subcommand("simulate-brw", "Branching walk minima");
  cmd_brw->add_option("--m", m, "generations")->required();
  cmd_brw->add_option("--k", k, "branching factor");
  cmd_brw->add_option("--dist", dist_text, "step law");
  cmd_brw->add_option("--seed", seed, "seed");
  cmd_brw->add_option("--reps", reps, "replications");
  cmd_brw->add_option("--workers", workers, "worker count (0 = auto)");
  cmd_brw->add_flag("--witness", witness, "report an argmin path (single rep)");
  cmd_brw->add_option("--format", format, "json | csv");

  std::string side;
  double eps = 0.0;
  std::string m_grid_text;
  auto* cmd_tails = app.add_subcommand("tails", "Tail decay rates of the walk minimum");
  cmd_tails->add_option("--side", side, "right | left")->required();
  cmd_tails->add_option("--eps", eps, "deviation from gamma")->required();
  cmd_tails->add_option("--m", m_grid_text, "m grid: a,b,c or a:b:xSTEP")->required();
  cmd_tails->add_option("--k", k, "branching factor");
  cmd_tails->add_option("--dist", dist_text, "step law");
  cmd_tails->add_option("--seed", seed, "master seed");
  cmd_tails->add_option("--reps", reps, "replications per grid point");
  cmd_tails->add_option("--workers", workers, "worker count (0 = auto)");
  cmd_tails->add_option("--output", output_path, "append CSV rows to this file");
  cmd_tails->add_option("--format", format, "json | csv");

  std::uint64_t budget = 100'000'000;
  auto* cmd_oracle = app.add_subcommand("oracle", "Exact small-instance depth law");
  cmd_oracle->add_option("--n", n, "number of non-root nodes")->required();
  cmd_oracle->add_option("--k", k, "parents per node");
  cmd_oracle->add_option("--budget", budget, "configuration budget");
  cmd_oracle->add_option("--workers", workers, "worker count (0 = auto)");
  cmd_oracle->add_option("--format", format, "json | csv");

  std::string n_grid_text;
  auto* cmd_conv = app.add_subcommand("convergence", "Depth LLN sweep over n");
  cmd_conv->add_option("--n", n_grid_text, "n grid: a,b,c or a:b:xSTEP")->required();
  cmd_conv->add_option("--k", k, "parents per node");
  cmd_conv->add_option("--dist", dist_text, "attachment law");
  cmd_conv->add_option("--seed", seed, "master seed");
  cmd_conv->add_option("--reps", reps, "replications per grid point");
  cmd_conv->add_option("--workers", workers, "worker count (0 = auto)");
  cmd_conv->add_option("--output", output_path, "stream CSV rows to this file");
  cmd_conv->add_option("--format", format, "json | csv");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("dagdepth");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (format != "json" && format != "csv") {
      throw DomainError("--format must be json or csv");
    }
    workers = effective_workers(workers);
    const DistChoice dist = parse_dist(dist_text);

    if (cmd_constants->parsed()) {
      const LimitConstants c = compute_limit_constants(dist.to_step(), k, dist.alpha(), tol);
      print_json(out, to_json(c));
      return 0;
    }

    if (cmd_dag->parsed()) {
      const AttachmentSpec att = dist.require_attachment("simulate-dag");
      const DepthProfile profile = generate_depths(n, k, att, seed, store_parents);
      const DepthStats stats = depth_stats(profile);
      if (!dump_path.empty()) write_depths(profile, dump_path);
      if (format == "csv") {
        std::vector<CsvRow> rows{
            value_row("simulate_dag", n, k, att.label(), "d_n", stats.d_n),
            value_row("simulate_dag", n, k, att.label(), "min_half", stats.min_half),
            value_row("simulate_dag", n, k, att.label(), "max_all", stats.max_all)};
        out << csv_document(rows);
      } else {
        nlohmann::json j{{"n", n},
                         {"k", k},
                         {"seed", seed},
                         {"spec", to_json(att)},
                         {"d_n", stats.d_n},
                         {"min_half", stats.min_half},
                         {"max_all", stats.max_all}};
        if (!dump_path.empty()) j["dump"] = dump_path;
        print_json(out, j);
      }
      return 0;
    }

    if (cmd_brw->parsed()) {
      const StepSpec step = dist.to_step();
      if (reps < 1) throw DomainError("--reps must be >= 1");
      if (reps == 1) {
        const BrwMinResult r = simulate_min(step, k, m, seed, witness);
        if (format == "csv") {
          out << csv_document(
              {value_row("simulate_brw", m, k, step.label(), "min_value", r.min_value)});
        } else {
          nlohmann::json j{{"m", m},
                           {"k", k},
                           {"seed", seed},
                           {"spec", to_json(step)},
                           {"min_value", r.min_value},
                           {"nodes_visited", r.nodes_visited}};
          if (witness) j["witness"] = r.witness;
          print_json(out, j);
        }
        return 0;
      }
      const auto count = static_cast<std::uint64_t>(reps);
      std::vector<double> values(count);
      par::for_each_index(count, workers, [&](std::uint64_t r) {
        values[r] = simulate_min(step, k, m, derive_seed(seed, r)).min_value;
      });
      StatSummary summary;
      for (const double v : values) summary.add(v);
      if (format == "csv") {
        CsvRow row;
        row.experiment = "simulate_brw";
        row.n_or_m = m;
        row.k = k;
        row.spec = step.label();
        row.stat = "min_value";
        row.count = summary.count();
        row.mean = summary.mean();
        row.variance = summary.variance();
        row.q = summary.quantiles();
        row.has_quantiles = true;
        out << csv_document({row});
      } else {
        print_json(out, nlohmann::json{{"m", m},
                                       {"k", k},
                                       {"seed", seed},
                                       {"spec", to_json(step)},
                                       {"reps", reps},
                                       {"summary", to_json(summary)}});
      }
      return 0;
    }

    if (cmd_tails->parsed()) {
      ExperimentConfig config;
      config.experiment = "brw_tails";
      if (dist.attachment) {
        config.attachment = dist.attachment;
      } else {
        config.step = dist.step;
      }
      config.k = k;
      config.m_grid = parse_m_grid(m_grid_text);
      config.replications = reps;
      config.master_seed = seed;
      config.output_path = output_path;
      config.worker_count = workers;
      config.side = side;
      config.eps = eps;

      std::ofstream file;
      if (!output_path.empty()) {
        file.open(output_path, std::ios::trunc);
        if (!file) throw DomainError("cannot open output file: " + output_path);
      }
      const BrwTailsResult result = run_brw_tails(config, file.is_open() ? &file : nullptr);
      if (format == "csv") {
        out << csv_document(result.rows);
      } else {
        print_json(out, nlohmann::json{{"config", to_json(config)},
                                       {"constants", to_json(result.constants)},
                                       {"estimate", to_json(result.estimate)}});
      }
      return 0;
    }

    if (cmd_oracle->parsed()) {
      const ExactDepthResult exact = exact_depths(n, k, budget, workers);
      if (format == "csv") {
        std::vector<CsvRow> rows;
        for (const auto& [stat, value] :
             {std::pair<std::string, double>{"mean_dn", exact.mean_dn.to_double()},
              {"mean_min_half", exact.mean_min_half.to_double()},
              {"mean_max_all", exact.mean_max_all.to_double()}}) {
          CsvRow row = value_row("oracle", n, k, "uniform", stat, value);
          row.count = exact.configs;
          rows.push_back(row);
        }
        out << csv_document(rows);
      } else {
        print_json(out, to_json(exact));
      }
      return 0;
    }

    if (cmd_conv->parsed()) {
      ExperimentConfig config;
      config.experiment = "convergence";
      config.attachment = dist.require_attachment("convergence");
      config.k = k;
      config.n_grid = parse_grid(n_grid_text);
      config.replications = reps;
      config.master_seed = seed;
      config.output_path = output_path;
      config.worker_count = workers;

      std::ofstream file;
      if (!output_path.empty()) {
        file.open(output_path, std::ios::trunc);
        if (!file) throw DomainError("cannot open output file: " + output_path);
      }
      const ConvergenceResult result =
          run_convergence(config, file.is_open() ? &file : nullptr);
      if (format == "csv") {
        out << csv_document(result.rows);
      } else {
        nlohmann::json rows = nlohmann::json::array();
        for (const CsvRow& row : result.rows) rows.push_back(to_json(row));
        print_json(out, nlohmann::json{{"config", to_json(config)},
                                       {"constants", to_json(result.constants)},
                                       {"rows", rows}});
      }
      return 0;
    }

    err << "error: no subcommand\n";
    return 1;
  } catch (const UnderpoweredError& e) {
    if (!e.payload_json().empty()) out << e.payload_json() << '\n';
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dagdepth
