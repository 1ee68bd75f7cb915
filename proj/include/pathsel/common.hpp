#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathsel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Single RNG engine used everywhere so that a run is reproducible from one
// 64-bit seed.  Distinct logical streams (chains, CFTP sweeps, ...) are
// derived with make_rng(seed, stream).
using Rng = std::mt19937_64;

// 0/1 indicator vector (theta over pathways, gamma over genes).
using BinaryVector = std::vector<std::uint8_t>;

// Raised for malformed or inconsistent input files.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when perfect simulation exceeds its doubling cap.
struct CftpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for filesystem-level failures (cannot open/create/write), as opposed
// to DataError which means a file was readable but malformed.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

int popcount(const BinaryVector& bits);

// Hex serialization of an indicator vector.  Bit j of the vector is bit j of
// the binary number encoded by the string, i.e. the last hex digit holds bits
// 0..3, the one before it bits 4..7, and so on.  The string always has
// ceil(n/4) digits.
std::string to_hex(const BinaryVector& bits);
BinaryVector from_hex(const std::string& hex, int n_bits);

// Numerically stable 1 / (1 + exp(-x)).
double logistic(double x);

// log(Gamma(x)) wrapper, kept in one place so the whole code base agrees on
// the implementation used inside density evaluations.
inline double log_gamma(double x) { return std::lgamma(x); }

}  // namespace pathsel
