#ifndef SDARCY_FTP_HPP
#define SDARCY_FTP_HPP

#include <memory>
#include <vector>
#include <Eigen/SparseLU>
#include "sdarcy/assembly.hpp"
#include "sdarcy/krylov.hpp"
#include "sdarcy/precond.hpp"

namespace sdarcy
{

enum class DarcySolveMode
{
  Iterative,  // preconditioned MINRES
  Exact       // sparse LU of the saddle point matrix
};

struct DarcySolverOptions
{
  DarcySolveMode mode = DarcySolveMode::Iterative;
  InnerBlock block = InnerBlock::Direct;
  MassMode mass = MassMode::Auto;
  double rtol = 1e-2;
  int maxit = 2000;
  ResidualNorm norm = ResidualNorm::Preconditioned;
};

// Full flux coefficients (interface dofs included) and a zero-mean pressure.
struct DarcyFields
{
  Vector flux;
  Vector pressure;
};

//
// Solver for the constrained Darcy saddle point problem on H^h_0 x L^h_0 with a prescribed
// interface normal trace phi (in the coefficients of Phi^h_D, which coincide with the
// interface flux dofs) and an optional source:
//   A00 u0 - B0' p = -A0S phi,   -B0 u0 = B_S phi - f   tested on L^h_0.
// L^h_0 is realized by the M-orthogonal projection p = Q pt, Q = I - e w'/(w'e), w = M e, so
// the iterative system is singular but consistent; the exact mode uses an explicit basis.
//
class DarcySubsolver
{
public:
  DarcySubsolver(const CoupledSpaces &spaces, const DarcyForms &forms,
                 const DarcySolverOptions &opts, double tau);

  const DarcySolverOptions &Options() const { return opts_; }
  int NumPhi() const { return static_cast<int>(sigma_.size()); }
  int NumFlux() const { return nflux_; }

  // `source` is the load (f_D, q_i) over the full pressure space, or empty for zero. A positive
  // `rtol` overrides the configured tolerance for this call.
  DarcyFields Solve(const Vector &phi, const Vector &source = Vector(), double rtol = 0.0);

  // a_D(u, v) - b_D(v, p) for the interface basis functions v.
  Vector InterfaceResidual(const DarcyFields &f) const;

  // Residual of the constrained equations (both rows, Euclidean), for verification.
  double EquationResidual(const DarcyFields &f, const Vector &phi, const Vector &source) const;

  long Solves() const { return solves_; }
  long TotalIterations() const { return iterations_; }
  double MeanIterations() const { return solves_ ? double(iterations_) / solves_ : 0.0; }
  void ResetCounters() { solves_ = iterations_ = 0; }
  std::shared_ptr<HxCounters> Hx() const { return hx_counters_; }

private:
  DarcySolverOptions opts_;
  int nflux_ = 0, np_ = 0;
  std::vector<int> interior_, sigma_;
  SparseMatrix a00_, a0s_, ass_, b0_, bs_, m_;
  Vector w_;  // M e
  double we_ = 0.0;
  // Iterative mode.
  LinearOperator op_, pinv_;
  std::shared_ptr<HxCounters> hx_counters_;
  // Exact mode.
  SparseMatrix z_;  // pressure basis of L^h_0
  std::shared_ptr<Eigen::SparseLU<SparseMatrix>> lu_;
  long solves_ = 0, iterations_ = 0;
};

struct FtpResult
{
  Vector functional;  // FtP_h(phi) in the dual basis of Phi^h_D
  DarcyFields fields;
};

FtpResult ApplyFtp(DarcySubsolver &solver, const Vector &phi);

// gamma^f and (u^f, p^f). Throws InvalidCase if int f_D (= sum of the load) exceeds `tol`.
FtpResult SourceResidual(DarcySubsolver &solver, const Vector &source, double tol = 1e-10,
                         double rtol = 0.0);

// C_S u = R' FtP_h(R u), R restricted to the free Stokes velocity dofs.
Vector ApplyCS(DarcySubsolver &solver, const SparseMatrix &r_free, const Vector &u);

}  // namespace sdarcy

#endif  // SDARCY_FTP_HPP
