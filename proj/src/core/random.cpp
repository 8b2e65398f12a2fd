#include "qlitho/random.hpp"

#include <cmath>

#include "qlitho/errors.hpp"
#include "qlitho/optical_context.hpp"
#include "qlitho/parallel.hpp"

namespace qlitho {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;

void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    n += 1.0;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }
};

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMulA, ctr[0], lo0, hi0);
    mulhilo(kMulB, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

SampleStream::SampleStream(std::uint64_t seed, std::uint32_t stream_id, std::uint64_t index)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0,
               stream_id} {}

std::uint32_t SampleStream::next_word() {
  if (used_ == 4) {
    block_ = philox4x32(counter_, key_);
    ++counter_[2];
    used_ = 0;
  }
  return block_[used_++];
}

double SampleStream::uniform() {
  const std::uint64_t hi = next_word() >> 5;  // 27 bits
  const std::uint64_t lo = next_word() >> 6;  // 26 bits
  const std::uint64_t bits = (hi << 26) | lo;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double SampleStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double t = 2.0 * kPi * uniform();
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

void RandomPlan::validate() const {
  if (n_samples < 2) throw ArgumentError("Monte Carlo needs at least two samples");
}

std::vector<McEstimate> mc_expectations(std::size_t dimension, const DensitySampler& sampler,
                                        std::span<const Observable> observables,
                                        const RandomPlan& plan, std::size_t workers) {
  plan.validate();
  if (dimension == 0) throw ArgumentError("sample dimension must be positive");
  const std::size_t n_obs = observables.size();
  const std::size_t chunks = (plan.n_samples + kMcChunk - 1) / kMcChunk;
  std::vector<std::vector<Moments>> partial(chunks, std::vector<Moments>(n_obs));

  parallel_for(chunks, workers, [&](std::size_t c) {
    std::vector<double> point(dimension);
    const std::size_t begin = c * kMcChunk;
    const std::size_t end = std::min(plan.n_samples, begin + kMcChunk);
    for (std::size_t i = begin; i < end; ++i) {
      SampleStream rng(plan.seed, plan.stream_id, i);
      sampler(rng, point);
      for (std::size_t k = 0; k < n_obs; ++k) partial[c][k].add(observables[k](point));
    }
  });

  std::vector<McEstimate> out(n_obs);
  for (std::size_t k = 0; k < n_obs; ++k) {
    Moments total;
    for (std::size_t c = 0; c < chunks; ++c) total.merge(partial[c][k]);
    const double variance = total.m2 / (total.n - 1.0);
    out[k] = {total.mean, std::sqrt(variance / total.n)};
  }
  return out;
}

McEstimate mc_expectation(std::size_t dimension, const DensitySampler& sampler,
                          const Observable& observable, const RandomPlan& plan,
                          std::size_t workers) {
  return mc_expectations(dimension, sampler, std::span<const Observable>(&observable, 1), plan,
                         workers)[0];
}

}  // namespace qlitho
