#include "btlab/banded.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>

namespace btlab {

namespace {
using cd = std::complex<double>;
}

void BandedComplexMatrix::add(int i, int j, cd v) {
  auto& r = rows_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j,
                             [](const auto& e, int col) { return e.first < col; });
  if (it != r.end() && it->first == j) {
    it->second += v;
  } else {
    r.insert(it, {j, v});
    kl_ = std::max(kl_, i - j);
    ku_ = std::max(ku_, j - i);
  }
}

cd BandedComplexMatrix::get(int i, int j) const {
  const auto& r = rows_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j,
                             [](const auto& e, int col) { return e.first < col; });
  return (it != r.end() && it->first == j) ? it->second : cd{};
}

void BandedComplexMatrix::matvec(const cd* x, cd* y) const {
  for (int i = 0; i < n_; ++i) {
    cd acc{};
    for (const auto& [j, v] : rows_[i]) acc += v * x[j];
    y[i] = acc;
  }
}

std::vector<cd> BandedComplexMatrix::matvec(const std::vector<cd>& x) const {
  std::vector<cd> y(n_);
  matvec(x.data(), y.data());
  return y;
}

double BandedComplexMatrix::inf_norm() const {
  double best = 0.0;
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (const auto& [j, v] : rows_[i]) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

std::vector<cd> BandedComplexMatrix::dense() const {
  std::vector<cd> d(static_cast<size_t>(n_) * n_);
  for (int i = 0; i < n_; ++i) {
    for (const auto& [j, v] : rows_[i]) d[static_cast<size_t>(i) * n_ + j] = v;
  }
  return d;
}

void dump_banded(const BandedComplexMatrix& a, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("dump_banded: cannot open " + path);
  auto put64 = [&](std::int64_t v) { std::fwrite(&v, sizeof v, 1, f); };
  auto putf = [&](double v) { std::fwrite(&v, sizeof v, 1, f); };
  put64(a.dim());
  put64(a.lower_bw());
  put64(a.upper_bw());
  for (int i = 0; i < a.dim(); ++i) {
    for (const auto& [j, v] : a.row(i)) {
      put64(i);
      put64(j);
      putf(v.real());
      putf(v.imag());
    }
  }
  std::fclose(f);
}

BandLU::BandLU(const BandedComplexMatrix& a, cd shift) {
  n_ = a.dim();
  kl_ = std::max(a.lower_bw(), 1);
  ku_ = std::max(a.upper_bw(), 1);
  ldab_ = 2 * kl_ + ku_ + 1;
  ab_.assign(static_cast<size_t>(ldab_) * n_, cd{});
  piv_.resize(n_);

  // Scatter into the padded band layout: entry (i, j) at ab[j*ldab + kl+ku+i-j].
  for (int i = 0; i < n_; ++i) {
    for (const auto& [j, v] : a.row(i)) {
      ab_[static_cast<size_t>(j) * ldab_ + kl_ + ku_ + i - j] = v;
    }
    ab_[static_cast<size_t>(i) * ldab_ + kl_ + ku_] -= shift;
  }

  const double floor = 1e-14 * std::max(a.inf_norm(), 1e-300);

  // Right-looking banded LU with partial pivoting; the pivot search and the
  // rank-1 update both stay inside the kl+1 rows below the diagonal.
  for (int j = 0; j < n_; ++j) {
    const int km = std::min(kl_, n_ - 1 - j);
    cd* colj = &ab_[static_cast<size_t>(j) * ldab_ + kl_ + ku_];
    int p = 0;
    double mx = std::norm(colj[0]);
    for (int i = 1; i <= km; ++i) {
      const double v = std::norm(colj[i]);
      if (v > mx) {
        mx = v;
        p = i;
      }
    }
    piv_[j] = j + p;
    if (std::sqrt(mx) < floor) {
      throw band_lu_singular("band_lu: pivot below 1e-14 * |A| at column " + std::to_string(j));
    }
    const int jend = std::min(n_ - 1, j + kl_ + ku_);
    if (p != 0) {
      for (int c = j; c <= jend; ++c) {
        cd* col = &ab_[static_cast<size_t>(c) * ldab_ + kl_ + ku_ + j - c];
        std::swap(col[0], col[p]);
      }
    }
    const cd inv = 1.0 / colj[0];
    for (int i = 1; i <= km; ++i) colj[i] *= inv;
    for (int c = j + 1; c <= jend; ++c) {
      cd* col = &ab_[static_cast<size_t>(c) * ldab_ + kl_ + ku_ + j - c];
      const cd mult = col[0];
      if (mult != cd{}) {
        for (int i = 1; i <= km; ++i) col[i] -= mult * colj[i];
      }
    }
  }
}

void BandLU::solve_inplace(std::vector<cd>& b) const {
  if (static_cast<int>(b.size()) != n_) {
    throw std::invalid_argument("BandLU::solve: dimension mismatch");
  }
  // forward: apply the interchanges and the stored multipliers
  for (int j = 0; j < n_; ++j) {
    if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
    const int km = std::min(kl_, n_ - 1 - j);
    const cd* colj = &ab_[static_cast<size_t>(j) * ldab_ + kl_ + ku_];
    const cd bj = b[j];
    if (bj != cd{}) {
      for (int i = 1; i <= km; ++i) b[j + i] -= colj[i] * bj;
    }
  }
  // back substitution on the banded U, column oriented
  for (int j = n_ - 1; j >= 0; --j) {
    const cd* colj = &ab_[static_cast<size_t>(j) * ldab_ + kl_ + ku_];
    b[j] /= colj[0];
    const cd bj = b[j];
    if (bj != cd{}) {
      const int itop = std::max(0, j - kl_ - ku_);
      for (int i = j - 1; i >= itop; --i) b[i] -= colj[i - j] * bj;
    }
  }
}

} // namespace btlab
