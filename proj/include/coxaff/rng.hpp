#pragma once

#include <cstdint>
#include <random>

namespace coxaff {

// A reproducible random stream identified by (seed, stream_id). Distinct ids
// give independent sequences; split(k) derives child streams, so work keyed
// by an index draws the same numbers whatever thread runs it.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  RngStream split(std::uint64_t k) const;

  std::mt19937_64& engine() { return eng_; }

  double uniform();  // (0, 1)
  double normal();
  double exponential();
  std::uint64_t poisson(double mean);
  double gamma(double shape, double scale = 1.0);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 eng_;
};

}  // namespace coxaff
