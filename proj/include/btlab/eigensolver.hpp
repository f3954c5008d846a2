#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "btlab/banded.hpp"

namespace btlab {

struct RitzPair {
  std::complex<double> value;
  double residual = 0.0;  // ||A v - value v|| with ||v|| = 1, measured against A itself
  bool converged = false;
  std::vector<std::complex<double>> vector;
};

struct SpectrumResult {
  std::vector<RitzPair> ritz;  // sorted by |value - shift|, nearest first
  std::complex<double> shift;
  int krylov_dim = 0;
  int cycles = 0;
  bool all_converged = false;
};

/// Eigenvalues of A nearest `target` by shift-invert Arnoldi over the banded LU.
/// Deterministic: all-ones start vector, full reorthogonalization, at most
/// `max_restarts` restart cycles with converged pairs locked and deflated.
/// Pairs that fail the explicit residual test after the last cycle are still
/// reported, flagged converged = false.
/// krylov_dim = 0 picks max(4 count + 8, 32), clamped to dim.
SpectrumResult eigs_near(const BandedComplexMatrix& A, std::complex<double> target, int count,
                         double tol = 1e-8, int krylov_dim = 0, int max_restarts = 5);

/// Full spectrum through a dense QR solver; oracle for small instances.
std::vector<std::complex<double>> dense_eigenvalues(const BandedComplexMatrix& A);

struct RieszRankReport {
  std::complex<double> center;
  double radius = 0.0;
  int n_quadrature = 0;
  int n_probes = 0;
  std::vector<double> singular_values;  // of the projected probe block, 2K rule
  int rank = 0;
  bool doubling_stable = false;  // rank unchanged when K doubles (K vs 2K nodes)
  double min_ritz_gap = 0.0;     // min | |lambda - center| - radius | seen in the guard
};

/// Rank of the spectral projector for the disk D(center, radius), estimated by
/// trapezoidal contour quadrature of the resolvent applied to a seeded complex
/// Gaussian probe block, then an SVD rank cut at 1e-6 of the top singular value.
/// Guards that no (approximate) eigenvalue lies within 0.05 radius of the
/// circle; pass ritz_hint to reuse already computed values, otherwise a probe
/// eigensolve supplies them. Throws std::runtime_error naming the offending
/// value when the guard fails.
RieszRankReport riesz_rank(const BandedComplexMatrix& A, std::complex<double> center,
                           double radius, int n_quadrature = 32, int n_probes = 4,
                           std::uint64_t seed = 42,
                           const std::vector<std::complex<double>>* ritz_hint = nullptr);

}  // namespace btlab
