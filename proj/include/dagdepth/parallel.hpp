#pragma once

#include <cstdint>
#include <functional>

namespace dagdepth::par {

// Resolves a requested worker count: values <= 0 mean "auto" (OpenMP default).
int resolve_workers(int requested);

// Runs fn(0), ..., fn(count-1) with the given worker count. Iterations must be
// independent and write only to disjoint slots; under that contract the result
// is identical for every worker count. Exceptions thrown by fn are rethrown
// after the loop drains (first one wins).
void for_each_index(std::uint64_t count, int workers,
                    const std::function<void(std::uint64_t)>& fn);

// Serial reference with the same contract; tests compare the two.
void for_each_index_serial(std::uint64_t count,
                           const std::function<void(std::uint64_t)>& fn);

}  // namespace dagdepth::par
