#include "coxaff/rng.hpp"

#include <cmath>

namespace coxaff {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One hashed 64-bit word: seeding through std::seed_seq costs ~20us per
// stream, too slow for one stream per path.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t id) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(id + 0x632be59bd9b4e019ULL)));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), eng_(make_engine(seed, stream_id)) {}

RngStream RngStream::split(std::uint64_t k) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(stream_id_)), k);
}

double RngStream::uniform() {
  double u;
  do {
    u = std::generate_canonical<double, 53>(eng_);
  } while (u <= 0.0 || u >= 1.0);
  return u;
}

double RngStream::normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

double RngStream::exponential() { return -std::log(uniform()); }

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(eng_);
}

double RngStream::gamma(double shape, double scale) {
  return std::gamma_distribution<double>(shape, scale)(eng_);
}

}  // namespace coxaff
