#ifndef SDARCY_LINALG_HPP
#define SDARCY_LINALG_HPP

#include <vector>
#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sdarcy
{

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Rows/columns of `a` listed in `rows`/`cols` (index lists into a).
SparseMatrix Submatrix(const SparseMatrix &a, const std::vector<int> &rows,
                       const std::vector<int> &cols);

// Gather/scatter between a full vector and an index subset.
Vector Gather(const Vector &x, const std::vector<int> &idx);
void ScatterAdd(const Vector &x, const std::vector<int> &idx, Vector &y);

double MaxAsymmetry(const SparseMatrix &a);

}  // namespace sdarcy

#endif  // SDARCY_LINALG_HPP
