// Compares the serial reference loop against the OpenMP kernels on the three
// replication workloads. Usage: dagdepth_bench [workers]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "dagdepth/brw.hpp"
#include "dagdepth/distributions.hpp"
#include "dagdepth/oracle.hpp"
#include "dagdepth/parallel.hpp"
#include "dagdepth/rng.hpp"
#include "dagdepth/sarrd.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double run_ms(const std::function<void()>& fn) {
  const auto start = Clock::now();
  fn();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const char* name, double serial_ms, double parallel_ms, double checksum) {
  std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   (checksum %.6g)\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms, checksum);
}

}  // namespace

int main(int argc, char** argv) {
  const int workers = argc > 1 ? std::atoi(argv[1]) : 0;
  std::printf("workers: %d (0 = auto)\n", workers);

  {
    const auto att = dagdepth::AttachmentSpec::uniform();
    const std::uint64_t reps = 48;
    const std::int64_t n = 200'000;
    std::vector<double> out(reps);
    const auto body = [&](std::uint64_t r) {
      const auto profile =
          dagdepth::generate_depths(n, 2, att, dagdepth::derive_seed(7, r));
      out[r] = dagdepth::depth_stats(profile).d_n;
    };
    const double serial =
        run_ms([&] { dagdepth::par::for_each_index_serial(reps, body); });
    double check = 0;
    for (const double v : out) check += v;
    const double parallel =
        run_ms([&] { dagdepth::par::for_each_index(reps, workers, body); });
    report("dag depths n=2e5 x48", serial, parallel, check);
  }

  {
    const auto step = dagdepth::StepSpec::exponential(1.0);
    const std::uint64_t reps = 20'000;
    std::vector<double> out(reps);
    const auto body = [&](std::uint64_t r) {
      out[r] = dagdepth::simulate_min(step, 2, 18, dagdepth::derive_seed(11, r)).min_value;
    };
    const double serial =
        run_ms([&] { dagdepth::par::for_each_index_serial(reps, body); });
    double check = 0;
    for (const double v : out) check += v;
    const double parallel =
        run_ms([&] { dagdepth::par::for_each_index(reps, workers, body); });
    report("brw minima m=18 x2e4", serial, parallel, check);
  }

  {
    const double serial = run_ms([&] { dagdepth::exact_depths(6, 2, 100'000'000, 1); });
    double check = 0;
    const double parallel = run_ms([&] {
      check = dagdepth::exact_depths(6, 2, 100'000'000, workers).mean_dn.to_double();
    });
    report("oracle n=6 k=2", serial, parallel, check);
  }

  return 0;
}
