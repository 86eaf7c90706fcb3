#include "ncfree/rng.hpp"

#include <cmath>
#include <numbers>

namespace ncfree {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32Ctr philox4x32(Philox4x32Ctr ctr, Philox4x32Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

StreamGenerator::StreamGenerator(const SeedStream& s)
    : key_{static_cast<std::uint32_t>(s.master), static_cast<std::uint32_t>(s.master >> 32)},
      base_{0, s.matrix, s.sample, s.experiment} {}

void StreamGenerator::refill() {
  Philox4x32Ctr ctr = base_;
  ctr[0] = block_++;
  buf_ = philox4x32(ctr, key_);
  used_ = 0;
}

std::uint32_t StreamGenerator::next_u32() {
  if (used_ == 4) refill();
  return buf_[static_cast<std::size_t>(used_++)];
}

double StreamGenerator::uniform() {
  const std::uint64_t hi = next_u32() >> 5;
  const std::uint64_t lo = next_u32() >> 6;
  // 53-bit mantissa, offset by half an ulp to exclude both endpoints.
  return (static_cast<double>((hi << 26) | lo) + 0.5) * 0x1.0p-53;
}

double StreamGenerator::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

}  // namespace ncfree
