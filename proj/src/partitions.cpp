#include "ncfree/partitions.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace ncfree {

NcPartition NcPartition::from_blocks(int k, std::vector<std::vector<int>> blocks) {
  std::vector<int> seen(static_cast<std::size_t>(k) + 1, 0);
  for (auto& b : blocks) {
    if (b.empty()) throw std::invalid_argument("empty block");
    std::sort(b.begin(), b.end());
    for (int x : b) {
      if (x < 1 || x > k || seen[static_cast<std::size_t>(x)]++) throw std::invalid_argument("blocks do not partition 1..k");
    }
  }
  for (int x = 1; x <= k; ++x)
    if (!seen[static_cast<std::size_t>(x)]) throw std::invalid_argument("blocks do not cover 1..k");
  std::sort(blocks.begin(), blocks.end());
  return {k, std::move(blocks)};
}

bool is_noncrossing(const NcPartition& p) {
  std::vector<int> owner(static_cast<std::size_t>(p.k) + 1, -1);
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    for (int x : p.blocks[b]) owner[static_cast<std::size_t>(x)] = static_cast<int>(b);
  for (int a = 1; a <= p.k; ++a)
    for (int b = a + 1; b <= p.k; ++b)
      for (int c = b + 1; c <= p.k; ++c)
        for (int d = c + 1; d <= p.k; ++d) {
          const auto oa = owner[static_cast<std::size_t>(a)], ob = owner[static_cast<std::size_t>(b)];
          if (oa == owner[static_cast<std::size_t>(c)] && ob == owner[static_cast<std::size_t>(d)] && oa != ob) return false;
        }
  return true;
}

std::vector<NcPartition> nc_pair_partitions(int k, const std::vector<int>& colors) {
  if (static_cast<int>(colors.size()) != k) throw std::invalid_argument("colors must have length k");
  std::vector<NcPartition> out;
  if (k % 2) return out;
  std::vector<std::pair<int, int>> pairs;
  // Matches the interval [lo, hi] (1-based, inclusive), pushing each pairing to out via cont.
  std::function<void(int, int, const std::function<void()>&)> rec = [&](int lo, int hi, const std::function<void()>& cont) {
    if (lo > hi) {
      cont();
      return;
    }
    for (int j = lo + 1; j <= hi; j += 2) {
      if (colors[static_cast<std::size_t>(lo - 1)] != colors[static_cast<std::size_t>(j - 1)]) continue;
      pairs.emplace_back(lo, j);
      rec(lo + 1, j - 1, [&, j, hi] { rec(j + 1, hi, cont); });
      pairs.pop_back();
    }
  };
  rec(1, k, [&] {
    std::vector<std::vector<int>> blocks;
    for (auto [a, b] : pairs) blocks.push_back({a, b});
    out.push_back(NcPartition::from_blocks(k, std::move(blocks)));
  });
  return out;
}

std::vector<NcPartition> all_partitions(int k) {
  if (k < 0 || k > 10) throw std::invalid_argument("all_partitions supports 0 <= k <= 10");
  std::vector<NcPartition> out;
  std::vector<int> rgs(static_cast<std::size_t>(k), 0);
  std::function<void(int, int)> rec = [&](int pos, int maxb) {
    if (pos == k) {
      std::vector<std::vector<int>> blocks(static_cast<std::size_t>(maxb));
      for (int x = 0; x < k; ++x) blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(x)])].push_back(x + 1);
      out.push_back(NcPartition::from_blocks(k, std::move(blocks)));
      return;
    }
    for (int b = 0; b <= maxb; ++b) {
      rgs[static_cast<std::size_t>(pos)] = b;
      rec(pos + 1, std::max(maxb, b + 1));
    }
  };
  rec(0, 0);
  return out;
}

std::vector<NcPartition> all_nc_partitions(int k) {
  auto all = all_partitions(k);
  std::erase_if(all, [](const NcPartition& p) { return !is_noncrossing(p); });
  return all;
}

NcPartition kreweras(const NcPartition& pi) {
  if (!is_noncrossing(pi)) throw std::invalid_argument("kreweras complement requires a non-crossing partition");
  const int k = pi.k;
  std::vector<int> inv(static_cast<std::size_t>(k) + 1, 0);
  for (const auto& b : pi.blocks)
    for (std::size_t t = 0; t < b.size(); ++t) inv[static_cast<std::size_t>(b[(t + 1) % b.size()])] = b[t];
  std::vector<int> next(static_cast<std::size_t>(k) + 1, 0);
  for (int j = 1; j <= k; ++j) next[static_cast<std::size_t>(j)] = inv[static_cast<std::size_t>(j % k + 1)];
  std::vector<char> done(static_cast<std::size_t>(k) + 1, 0);
  std::vector<std::vector<int>> blocks;
  for (int j = 1; j <= k; ++j) {
    if (done[static_cast<std::size_t>(j)]) continue;
    std::vector<int> cyc;
    for (int x = j; !done[static_cast<std::size_t>(x)]; x = next[static_cast<std::size_t>(x)]) {
      done[static_cast<std::size_t>(x)] = 1;
      cyc.push_back(x);
    }
    blocks.push_back(std::move(cyc));
  }
  return NcPartition::from_blocks(k, std::move(blocks));
}

NcPartition kreweras_bruteforce(const NcPartition& pi) {
  const int k = pi.k;
  if (k > 8) throw std::invalid_argument("brute-force complement limited to k <= 8");
  const NcPartition* best = nullptr;
  auto candidates = all_partitions(k);
  for (const auto& sigma : candidates) {
    // Interleave: j -> 2j - 1, j' -> 2j.
    std::vector<std::vector<int>> blocks;
    for (const auto& b : pi.blocks) {
      std::vector<int> nb;
      for (int x : b) nb.push_back(2 * x - 1);
      blocks.push_back(std::move(nb));
    }
    for (const auto& b : sigma.blocks) {
      std::vector<int> nb;
      for (int x : b) nb.push_back(2 * x);
      blocks.push_back(std::move(nb));
    }
    if (!is_noncrossing(NcPartition::from_blocks(2 * k, std::move(blocks)))) continue;
    if (best == nullptr || sigma.size() < best->size()) best = &sigma;
  }
  if (best == nullptr) throw std::logic_error("no compatible complement found");
  return *best;
}

std::uint64_t catalan(int n) {
  if (n < 0 || n > 33) throw std::invalid_argument("catalan index out of range");
  std::vector<std::uint64_t> c(static_cast<std::size_t>(n) + 1, 0);
  c[0] = 1;
  for (int m = 1; m <= n; ++m)
    for (int i = 0; i < m; ++i) c[static_cast<std::size_t>(m)] += c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(m - 1 - i)];
  return c[static_cast<std::size_t>(n)];
}

double semicircle_moment(int k) {
  if (k < 0) throw std::invalid_argument("negative moment order");
  if (k % 2) return 0.0;
  return static_cast<double>(catalan(k / 2));
}

}  // namespace ncfree
