#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qlitho {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds.
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Random numbers for one Monte Carlo sample. The stream is a pure function of
/// (seed, stream id, sample index): the seed is the Philox key and the counter
/// holds the sample index, the stream id and a block number that advances as
/// draws are consumed. Any sample can be regenerated in isolation, which is
/// what makes parallel estimates independent of the worker count.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint32_t stream_id, std::uint64_t index);

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal (Box-Muller; both variates of a pair are used).
  double normal();

 private:
  std::uint32_t next_word();

  PhiloxKey key_;
  PhiloxCounter counter_;
  PhiloxCounter block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct RandomPlan {
  std::uint64_t seed = 0;
  std::size_t n_samples = 100000;
  std::uint32_t stream_id = 0;

  void validate() const;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Fills `point` with one draw from the target density.
using DensitySampler = std::function<void(SampleStream&, std::span<double> point)>;
using Observable = std::function<double(std::span<const double> point)>;

/// Samples per work chunk. Chunks are the unit of both parallel scheduling and
/// the fixed-order reduction.
inline constexpr std::size_t kMcChunk = 8192;

/// Sample means and standard errors (sample std / sqrt(n)) of several
/// observables over the same draws. Bit-identical for a fixed plan whatever
/// `workers` is (0 means hardware concurrency).
std::vector<McEstimate> mc_expectations(std::size_t dimension, const DensitySampler& sampler,
                                        std::span<const Observable> observables,
                                        const RandomPlan& plan, std::size_t workers = 0);

McEstimate mc_expectation(std::size_t dimension, const DensitySampler& sampler,
                          const Observable& observable, const RandomPlan& plan,
                          std::size_t workers = 0);

}  // namespace qlitho
