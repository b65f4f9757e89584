#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace mwstats {

/// Engine used for every Monte Carlo stream in the library.
using Engine = std::mt19937_64;

/// Seed for sub-stream `stream` of a run seeded with `seed` (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Engine for sub-stream `stream`; identical for a given (seed, stream) pair.
Engine make_engine(std::uint64_t seed, std::uint64_t stream);

/// Caps the worker threads used by block-parallel loops. 0 selects the hardware concurrency.
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Runs body(block) for block in [0, blocks). Blocks are independent, so any
/// schedule produces identical results as long as body only writes block-local state.
void parallel_for_blocks(std::size_t blocks, const std::function<void(std::size_t)>& body);

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (abs_(sum_) >= abs_(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void merge(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  static double abs_(double x) { return x < 0 ? -x : x; }
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace mwstats
