#include "slicelab/subspace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace slicelab {

SubspaceBasis::SubspaceBasis(int d, int n, std::vector<double> rows) : d_(d), n_(n), rows_(std::move(rows)) {
  if (d < 1 || n < d) throw std::invalid_argument("SubspaceBasis: need 1 <= d <= n");
  if (rows_.size() != static_cast<std::size_t>(d) * n) throw std::invalid_argument("SubspaceBasis: wrong entry count");
}

SubspaceBasis SubspaceBasis::from_rows(int d, int n, std::vector<double> rows, double pivot_tol) {
  if (d < 1 || n < d || rows.size() != static_cast<std::size_t>(d) * n) {
    throw std::invalid_argument("SubspaceBasis::from_rows: bad shape");
  }
  const auto pivots = modified_gram_schmidt(d, n, rows);
  for (int l = 0; l < d; ++l) {
    if (!(pivots[l] > pivot_tol)) {
      throw std::domain_error("SubspaceBasis::from_rows: rank deficient at row " + std::to_string(l));
    }
  }
  return SubspaceBasis(d, n, std::move(rows));
}

double SubspaceBasis::orthonormality_defect() const {
  double worst = 0.0;
  for (int i = 0; i < d_; ++i) {
    for (int k = i; k < d_; ++k) {
      double dot = 0.0;
      for (int j = 0; j < n_; ++j) dot += at(i, j) * at(k, j);
      worst = std::max(worst, std::abs(dot - (i == k ? 1.0 : 0.0)));
    }
  }
  return worst;
}

std::vector<double> modified_gram_schmidt(int d, int n, std::span<double> rows) {
  std::vector<double> pivots(d, 0.0);
  for (int l = 0; l < d; ++l) {
    double* ul = rows.data() + static_cast<std::size_t>(l) * n;
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) norm2 += ul[j] * ul[j];
    const double norm = std::sqrt(norm2);
    pivots[l] = norm;
    if (norm == 0.0) continue;
    for (int j = 0; j < n; ++j) ul[j] /= norm;
    // remove the new direction from the remaining rows
    for (int k = l + 1; k < d; ++k) {
      double* uk = rows.data() + static_cast<std::size_t>(k) * n;
      double dot = 0.0;
      for (int j = 0; j < n; ++j) dot += ul[j] * uk[j];
      for (int j = 0; j < n; ++j) uk[j] -= dot * ul[j];
    }
  }
  return pivots;
}

}  // namespace slicelab
