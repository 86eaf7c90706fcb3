#pragma once

#include <array>
#include <cstdint>

namespace ncfree {

using Philox4x32Ctr = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al.).
Philox4x32Ctr philox4x32(Philox4x32Ctr ctr, Philox4x32Key key);

/// Stream coordinates. Distinct coordinates index disjoint counter ranges
/// under the same key, so the streams are independent.
struct SeedStream {
  std::uint64_t master = 0;
  std::uint32_t experiment = 0;
  std::uint32_t sample = 0;
  std::uint32_t matrix = 0;

  SeedStream with_experiment(std::uint32_t e) const { return {master, e, sample, matrix}; }
  SeedStream with_sample(std::uint32_t s) const { return {master, experiment, s, matrix}; }
  SeedStream with_matrix(std::uint32_t m) const { return {master, experiment, sample, m}; }
};

/// Sequential draws from one stream. The generator is a local cursor over
/// the counter space; it never shares state with other streams.
class StreamGenerator {
 public:
  explicit StreamGenerator(const SeedStream& s);

  std::uint32_t next_u32();
  /// Uniform on (0, 1), never 0 or 1.
  double uniform();
  double normal();

 private:
  void refill();

  Philox4x32Key key_;
  Philox4x32Ctr base_;
  std::uint32_t block_ = 0;
  Philox4x32Ctr buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ncfree
