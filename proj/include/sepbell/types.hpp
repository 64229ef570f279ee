#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace sepbell {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = std::uint64_t;

inline constexpr cplx kI{0.0, 1.0};

// Hilbert-space size caps. Defaults keep exact runs at desk scale.
struct Limits {
    Index max_operator_dim = 65536;  // sparse operators and pure state vectors
    Index max_dense_dim = 4096;      // dense matrices: density matrices, dense eigensolves
    Index max_scan_combinations = 1'000'000;
};

// D^N, or 0 on overflow of 64 bits.
Index hilbert_dim(int num_sites, int dim) noexcept;

// Throws SizeLimit if D^N exceeds cap.
Index checked_hilbert_dim(int num_sites, int dim, Index cap, const char* what);

}  // namespace sepbell
