#include "sdarcy/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace sdarcy
{

SparseMatrix Submatrix(const SparseMatrix &a, const std::vector<int> &rows,
                       const std::vector<int> &cols)
{
  std::vector<int> row_map(a.rows(), -1), col_map(a.cols(), -1);
  for (std::size_t i = 0; i < rows.size(); i++)
  {
    row_map[rows[i]] = static_cast<int>(i);
  }
  for (std::size_t j = 0; j < cols.size(); j++)
  {
    col_map[cols[j]] = static_cast<int>(j);
  }
  std::vector<Triplet> trips;
  trips.reserve(a.nonZeros());
  for (int k = 0; k < a.outerSize(); k++)
  {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
    {
      const int i = row_map[it.row()], j = col_map[it.col()];
      if (i >= 0 && j >= 0)
      {
        trips.emplace_back(i, j, it.value());
      }
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Vector Gather(const Vector &x, const std::vector<int> &idx)
{
  Vector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); i++)
  {
    out[i] = x[idx[i]];
  }
  return out;
}

void ScatterAdd(const Vector &x, const std::vector<int> &idx, Vector &y)
{
  for (std::size_t i = 0; i < idx.size(); i++)
  {
    y[idx[i]] += x[i];
  }
}

double MaxAsymmetry(const SparseMatrix &a)
{
  const SparseMatrix d = a - SparseMatrix(a.transpose());
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); k++)
  {
    for (SparseMatrix::InnerIterator it(d, k); it; ++it)
    {
      m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

}  // namespace sdarcy
