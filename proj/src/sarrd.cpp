#include "dagdepth/sarrd.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "dagdepth/errors.hpp"

namespace dagdepth {

namespace {

constexpr std::int64_t kMaxNodes = (std::int64_t{1} << 31) - 1;

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_uint(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

DepthProfile generate_depths(std::int64_t n, int k, const AttachmentSpec& spec,
                             std::uint64_t seed, bool store_parents,
                             std::int64_t max_elements) {
  if (n < 1 || n > kMaxNodes) throw DomainError("generate_depths: n must lie in [1, 2^31-1]");
  if (k < 1) throw DomainError("generate_depths: k must be >= 1");
  if (!spec.bounded_density()) {
    throw SpecError("generate_depths: attachment density unbounded (alpha < 1); "
                    "the scaled-attachment model requires a bounded density");
  }
  const std::int64_t elements =
      (n + 1) + (store_parents ? static_cast<std::int64_t>(k) * (n + 1) : 0);
  if (elements > max_elements) {
    throw CapacityError("generate_depths: allocation exceeds the memory budget");
  }

  DepthProfile profile;
  profile.n = n;
  profile.k = k;
  profile.seed = seed;
  profile.depths.assign(static_cast<std::size_t>(n) + 1, 0);
  if (store_parents) {
    profile.parents.assign(static_cast<std::size_t>(k) * (n + 1), -1);
  }

  SplitMix64 rng(seed);
  const bool is_uniform = spec.kind == AttachmentKind::kUniform || spec.alpha == 1.0;
  const double inv_alpha = 1.0 / spec.alpha;
  for (std::int64_t x = 1; x <= n; ++x) {
    std::int32_t best = -1;
    for (int p = 0; p < k; ++p) {
      double u = rng.next_double();
      if (!is_uniform) u = std::pow(u, inv_alpha);
      std::int64_t parent = static_cast<std::int64_t>(static_cast<double>(x) * u);
      if (parent > x - 1) parent = x - 1;  // closed-endpoint rounding guard
      best = std::max(best, profile.depths[static_cast<std::size_t>(parent)]);
      if (store_parents) {
        profile.parents[static_cast<std::size_t>(x) * k + p] =
            static_cast<std::int32_t>(parent);
      }
    }
    profile.depths[static_cast<std::size_t>(x)] = best + 1;
  }
  return profile;
}

DepthStats depth_stats(const DepthProfile& profile) {
  if (profile.n < 1) throw EmptyError("depth_stats: empty profile");
  const auto& d = profile.depths;
  DepthStats s;
  s.d_n = d[static_cast<std::size_t>(profile.n)];
  const std::int64_t half = (profile.n + 1) / 2;  // ceil(n/2)
  s.min_half = d[static_cast<std::size_t>(half)];
  for (std::int64_t x = half + 1; x <= profile.n; ++x) {
    s.min_half = std::min(s.min_half, d[static_cast<std::size_t>(x)]);
  }
  s.max_all = *std::max_element(d.begin(), d.end());
  return s;
}

std::int64_t ancestor_label(const DepthProfile& profile, std::int64_t x,
                            std::span<const int> word) {
  if (!profile.has_parents()) {
    throw DomainError("ancestor_label: profile was generated without parents");
  }
  if (x < 0 || x > profile.n) throw DomainError("ancestor_label: node out of range");
  std::int64_t cur = x;
  for (const int letter : word) {
    if (letter < 1 || letter > profile.k) {
      throw DomainError("ancestor_label: word letters must lie in 1..k");
    }
    if (cur == 0) throw RootError("ancestor_label: walk passed the root");
    cur = profile.parents[static_cast<std::size_t>(cur) * profile.k + (letter - 1)];
  }
  return cur;
}

IdealTreeResult ideal_tree_block_greedy(std::int64_t n, int k, const AttachmentSpec& spec,
                                        int block_len, int steps, std::uint64_t seed) {
  if (n < 0) throw DomainError("ideal_tree_block_greedy: n must be >= 0");
  if (k < 1 || block_len < 1 || steps < 0) {
    throw DomainError("ideal_tree_block_greedy: need k >= 1, block_len >= 1, steps >= 0");
  }
  std::uint64_t leaves = 1;
  for (int i = 0; i < block_len; ++i) {
    leaves *= static_cast<std::uint64_t>(k);
    if (leaves > (std::uint64_t{1} << 24)) {
      throw BudgetError("ideal_tree_block_greedy: k^block_len exceeds 2^24");
    }
  }

  IdealTreeResult result;
  result.labels.push_back(n);

  SplitMix64 rng(seed);
  const bool is_uniform = spec.kind == AttachmentKind::kUniform || spec.alpha == 1.0;
  const double inv_alpha = 1.0 / spec.alpha;
  std::vector<std::int64_t> label(static_cast<std::size_t>(block_len) + 1);
  std::vector<int> child(static_cast<std::size_t>(block_len) + 1);

  for (int j = 1; j <= steps; ++j) {
    // Lexicographic DFS; strict improvement keeps the first (smallest) word.
    std::int64_t best = -1;
    label[0] = result.labels.back();
    child[0] = 0;
    int d = 0;
    while (d >= 0) {
      if (child[static_cast<std::size_t>(d)] == k) {
        --d;
        continue;
      }
      ++child[static_cast<std::size_t>(d)];
      double u = rng.next_double();
      if (!is_uniform) u = std::pow(u, inv_alpha);
      const std::int64_t v = label[static_cast<std::size_t>(d)];
      std::int64_t lab = static_cast<std::int64_t>(static_cast<double>(v) * u);
      if (lab > v - 1) lab = v > 0 ? v - 1 : 0;
      if (d + 1 == block_len) {
        best = std::max(best, lab);
      } else {
        ++d;
        label[static_cast<std::size_t>(d)] = lab;
        child[static_cast<std::size_t>(d)] = 0;
      }
    }
    result.labels.push_back(best);
    if (best == 0) {
      result.reached_zero_at = j;
      break;
    }
  }
  return result;
}

void write_depths(const DepthProfile& profile, const std::filesystem::path& path) {
  std::string buf;
  buf.reserve(20 + 4 * profile.depths.size());
  put_u64(buf, static_cast<std::uint64_t>(profile.n));
  put_u32(buf, static_cast<std::uint32_t>(profile.k));
  put_u64(buf, profile.seed);
  for (const std::int32_t d : profile.depths) {
    put_u32(buf, static_cast<std::uint32_t>(d));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DomainError("write_depths: cannot open " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DomainError("write_depths: short write to " + path.string());
}

DepthProfile read_depths(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("read_depths: cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 20) throw DomainError("read_depths: truncated header");
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  DepthProfile profile;
  profile.n = static_cast<std::int64_t>(get_uint(p, 8));
  profile.k = static_cast<int>(get_uint(p + 8, 4));
  profile.seed = get_uint(p + 12, 8);
  if (profile.n < 0 || buf.size() != 20 + 4 * (static_cast<std::size_t>(profile.n) + 1)) {
    throw DomainError("read_depths: payload size mismatch");
  }
  profile.depths.resize(static_cast<std::size_t>(profile.n) + 1);
  for (std::size_t i = 0; i < profile.depths.size(); ++i) {
    profile.depths[i] = static_cast<std::int32_t>(get_uint(p + 20 + 4 * i, 4));
  }
  return profile;
}

}  // namespace dagdepth
