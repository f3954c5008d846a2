#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace btlab {

/// Sparse banded complex matrix. Rows hold (column, value) pairs sorted by
/// column; the bandwidths track the extreme stored offsets, and everything
/// outside the stored entries is identically zero. The assemblies produce at
/// most a 5-point stencil per row, so row storage stays tiny even when the
/// bandwidth (which drives the LU cost) is in the hundreds.
class BandedComplexMatrix {
 public:
  BandedComplexMatrix() = default;
  explicit BandedComplexMatrix(int dim) : n_(dim), rows_(dim) {}

  int dim() const { return n_; }
  int lower_bw() const { return kl_; }
  int upper_bw() const { return ku_; }

  /// Accumulate v into entry (i, j).
  void add(int i, int j, std::complex<double> v);
  std::complex<double> get(int i, int j) const;

  const std::vector<std::pair<int, std::complex<double>>>& row(int i) const { return rows_[i]; }

  void matvec(const std::complex<double>* x, std::complex<double>* y) const;
  std::vector<std::complex<double>> matvec(const std::vector<std::complex<double>>& x) const;

  /// max row sum of absolute values
  double inf_norm() const;

  /// Row-major dense copy, for small-instance oracles only.
  std::vector<std::complex<double>> dense() const;

 private:
  int n_ = 0;
  int kl_ = 0, ku_ = 0;
  std::vector<std::vector<std::pair<int, std::complex<double>>>> rows_;
};

/// Binary dump: three int64 header fields (dim, lower_bw, upper_bw), then one
/// record per stored entry as little-endian int64 row, int64 col, f64 re,
/// f64 im, rows ascending, columns ascending within a row.
void dump_banded(const BandedComplexMatrix& a, const std::string& path);

/// In-band LU factorization with partial pivoting of (A - shift I), stored in
/// the padded LAPACK band layout (fill confined to lower_bw + upper_bw above
/// the diagonal). Throws band_lu_singular when a pivot falls below
/// 1e-14 * |A|_inf; callers recover by perturbing the shift.
class band_lu_singular : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BandLU {
 public:
  BandLU() = default;
  BandLU(const BandedComplexMatrix& a, std::complex<double> shift);

  int dim() const { return n_; }

  /// Solve (A - shift I) x = b in place.
  void solve_inplace(std::vector<std::complex<double>>& b) const;
  std::vector<std::complex<double>> solve(std::vector<std::complex<double>> b) const {
    solve_inplace(b);
    return b;
  }

 private:
  int n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
  std::vector<std::complex<double>> ab_;
  std::vector<int> piv_;
};

inline BandLU band_lu(const BandedComplexMatrix& a, std::complex<double> shift) {
  return BandLU(a, shift);
}

} // namespace btlab
