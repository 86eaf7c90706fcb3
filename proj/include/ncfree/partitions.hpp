#pragma once

#include <cstdint>
#include <vector>

namespace ncfree {

/// Partition of {1..k}; blocks are sorted and ordered by their smallest element.
struct NcPartition {
  int k = 0;
  std::vector<std::vector<int>> blocks;

  /// Sorts blocks; throws unless they partition {1..k}.
  static NcPartition from_blocks(int k, std::vector<std::vector<int>> blocks);
  std::size_t size() const { return blocks.size(); }
  friend bool operator==(const NcPartition&, const NcPartition&) = default;
};

bool is_noncrossing(const NcPartition& p);

/// Non-crossing perfect matchings of {1..k} pairing equal colors only.
std::vector<NcPartition> nc_pair_partitions(int k, const std::vector<int>& colors);
/// All partitions of {1..k} (Bell number many); k <= 10.
std::vector<NcPartition> all_partitions(int k);
/// All non-crossing partitions of {1..k}; k <= 10.
std::vector<NcPartition> all_nc_partitions(int k);

/// Kreweras complement on the primed points, j' placed between j and j + 1.
/// Computed as the permutation pi^{-1} gamma with gamma the long cycle.
NcPartition kreweras(const NcPartition& pi);
/// Coarsest sigma with pi u sigma non-crossing on 1,1',2,2',...,
/// found by exhaustive search. Reference implementation for small k.
NcPartition kreweras_bruteforce(const NcPartition& pi);

std::uint64_t catalan(int n);
/// Moments of the standard semicircle law.
double semicircle_moment(int k);

}  // namespace ncfree
