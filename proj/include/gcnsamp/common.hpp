#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gcnsamp {

using Index = std::int64_t;
using NodeId = std::int32_t;

// Row-major so that a node's embedding is contiguous; sparse kernels walk rows.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid inputs, malformed files, inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite or diverging objective during training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix_seed(mix_seed(base) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

inline Rng make_rng(std::uint64_t base, std::uint64_t stream = 0) {
  return Rng(derive_seed(base, stream));
}

}  // namespace gcnsamp
