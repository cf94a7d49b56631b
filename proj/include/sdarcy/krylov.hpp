#ifndef SDARCY_KRYLOV_HPP
#define SDARCY_KRYLOV_HPP

#include <functional>
#include <vector>
#include "sdarcy/linalg.hpp"

namespace sdarcy
{

// Square linear map given by its action; y is resized by the callee if needed.
class LinearOperator
{
public:
  using Apply = std::function<void(const Vector &, Vector &)>;

  LinearOperator() = default;
  LinearOperator(int size, Apply apply) : size_(size), apply_(std::move(apply)) {}

  // Wraps a sparse matrix (the matrix is captured by value).
  static LinearOperator FromMatrix(SparseMatrix a);
  static LinearOperator Identity(int size);

  int Size() const { return size_; }
  bool Valid() const { return static_cast<bool>(apply_); }
  void operator()(const Vector &x, Vector &y) const { apply_(x, y); }
  Vector operator*(const Vector &x) const
  {
    Vector y(size_);
    apply_(x, y);
    return y;
  }

private:
  int size_ = 0;
  Apply apply_;
};

// max |<Ax, y> - <x, Ay>| / (|Ax||y|) over random probes.
double SymmetryDefect(const LinearOperator &a, int probes, unsigned seed);

enum class ResidualNorm
{
  Preconditioned,  // sqrt(r' P^{-1} r), tracked by the recurrence
  Euclidean        // |r|_2, tracked by an extra vector recurrence
};

enum class ResidualReference
{
  InitialResidual,  // stop when |r_k| <= rtol |r_0|
  RightHandSide     // stop when |r_k| <= rtol |b| (same norm)
};

struct MinresOptions
{
  double rtol = 1e-6;
  int maxit = 1000;
  ResidualNorm norm = ResidualNorm::Preconditioned;
  ResidualReference reference = ResidualReference::InitialResidual;
};

struct SolveStats
{
  int iterations = 0;
  bool converged = false;
  // Relative residuals (in the stopping norm) after each iteration, starting with iteration 0.
  std::vector<double> history;
  double seconds = 0.0;
};

//
// Preconditioned MINRES for symmetric A and symmetric positive definite P^{-1}. x holds the
// initial guess on entry. Throws SolverFailure if the preconditioner is found indefinite; on
// reaching maxit the stats are returned with converged = false.
//
SolveStats Minres(const LinearOperator &a, const LinearOperator &pinv, const Vector &b, Vector &x,
                  const MinresOptions &opts);

//
// Lanczos with full reorthogonalization for an operator `op` that is self-adjoint in the inner
// product <x, y>_G = x' G y. Returns the Ritz values (ascending) after at most `steps` steps.
//
Vector LanczosRitzValues(const LinearOperator &op, const LinearOperator &g, int steps,
                         unsigned seed);

}  // namespace sdarcy

#endif  // SDARCY_KRYLOV_HPP
