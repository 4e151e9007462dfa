#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "dagdepth/distributions.hpp"

namespace dagdepth {

// Depth array of one realized recursive DAG. depths[x] is the longest directed
// path from node x back to the root 0; parents are stored flat (k per node,
// row 0 filled with -1) only when requested.
struct DepthProfile {
  std::int64_t n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::int32_t> depths;
  std::vector<std::int32_t> parents;

  bool has_parents() const { return !parents.empty(); }
};

struct DepthStats {
  std::int32_t d_n = 0;      // depth of the last node
  std::int32_t min_half = 0; // min over x in [ceil(n/2), n]
  std::int32_t max_all = 0;  // max over all nodes
};

// Single pass over x = 1..n; node x draws k variates and attaches to
// floor(x * X) (clamped to x-1 against the closed-endpoint rounding case).
// Rejects attachment laws with unbounded density (SpecError) and allocations
// beyond max_elements ints (CapacityError).
DepthProfile generate_depths(std::int64_t n, int k, const AttachmentSpec& spec,
                             std::uint64_t seed, bool store_parents = false,
                             std::int64_t max_elements = (std::int64_t{1} << 31) - 1);

DepthStats depth_stats(const DepthProfile& profile);

// Ancestor reached from x by following parent slots along word (letters in
// 1..k). Empty word returns x; walking past the root throws RootError.
std::int64_t ancestor_label(const DepthProfile& profile, std::int64_t x,
                            std::span<const int> word);

struct IdealTreeResult {
  std::vector<std::int64_t> labels;  // V_0..V_q, truncated after the first zero
  std::optional<int> reached_zero_at;
};

// Block-greedy descent through the ideal tree: each step expands a fresh
// depth-block_len k-ary tree of nested floor labels below the current label
// and keeps the largest leaf (ties resolved to the lexicographically smallest
// word by the scan order). BudgetError when k^block_len > 2^24.
IdealTreeResult ideal_tree_block_greedy(std::int64_t n, int k, const AttachmentSpec& spec,
                                        int block_len, int steps, std::uint64_t seed);

// Binary depth dump: header (n: u64, k: u32, seed: u64) followed by n+1
// little-endian int32 depths. Parents are not persisted.
void write_depths(const DepthProfile& profile, const std::filesystem::path& path);
DepthProfile read_depths(const std::filesystem::path& path);

}  // namespace dagdepth
