#ifndef SDARCY_SOLVER_HPP
#define SDARCY_SOLVER_HPP

#include <string>
#include <vector>
#include "sdarcy/assembly.hpp"
#include "sdarcy/ftp.hpp"
#include "sdarcy/krylov.hpp"
#include "sdarcy/precond.hpp"

namespace sdarcy
{

// Assembled operators of one coupled discretization.
struct Discretization
{
  PhysicalParams params;
  CoupledSpaces spaces;
  StokesForms stokes;
  DarcyForms darcy;
  InterfaceForms iface;
  SparseMatrix r_free;  // R restricted to the free Stokes velocity dofs

  int NumFreeVelocity() const { return static_cast<int>(stokes.free.size()); }
  int NumStokesPressure() const { return static_cast<int>(stokes.B.rows()); }
};

Discretization Discretize(ElementPair pair, int n, const PhysicalParams &params = {});

struct SolveConfig
{
  ElementPair pair = ElementPair::MiniBdm1;
  int n = 8;
  double outer_rtol = 1e-6;
  double inner_rtol = 1e-2;
  PrecondCombo combo;
  int outer_maxit = 2000;
  int inner_maxit = 2000;
  ResidualNorm outer_norm = ResidualNorm::Euclidean;
  ResidualReference outer_reference = ResidualReference::InitialResidual;
  ResidualNorm inner_norm = ResidualNorm::Euclidean;
  DarcySolveMode inner_mode = DarcySolveMode::Iterative;
  // Start the outer iteration from the uncoupled Stokes solution (zero otherwise).
  bool initialize = true;
  // Tolerance of the two Darcy solves outside the outer iteration (source and recovery).
  double recovery_rtol = 1e-10;
};

struct SolveReport
{
  bool converged = false;
  std::string failure;  // empty on success
  int outer_iterations = 0;
  int init_iterations = 0;
  double mean_inner = 0.0;  // mean inner iterations per C_S application
  long inner_solves = 0;
  int dofs = 0;
  double h = 0.0;
  Vector velocity;         // full vector Stokes velocity
  Vector stokes_pressure;
  Vector flux;             // full Darcy flux
  Vector darcy_pressure;   // zero mean on the Darcy region
  // Constant c such that shifting both pressures by c gives (p, 1) = 0 over the whole domain.
  double global_shift = 0.0;
  std::vector<double> history;
  double seconds = 0.0;
};

// The nested solve. Solver failures are reported through `converged`/`failure`; an
// incompatible Darcy source throws InvalidCase.
SolveReport SolveCoupled(const Discretization &disc, const ManufacturedCase &mcase,
                         const SolveConfig &config);
SolveReport SolveCoupled(const SolveConfig &config, const ManufacturedCase &mcase);

// Sparse LU of the full coupled system with the interface flux dofs eliminated through R.
SolveReport SolveMonolithic(const Discretization &disc, const ManufacturedCase &mcase);

// Coupled system matrix and load of the monolithic formulation, unknowns
// [free Stokes velocity, Stokes pressure, interior Darcy flux, Darcy pressure in L^h_0 basis].
struct MonolithicSystem
{
  SparseMatrix matrix;
  Vector rhs;
  SparseMatrix z;  // Darcy pressure basis of L^h_0
};
MonolithicSystem AssembleMonolithic(const Discretization &disc, const Loads &loads);

// FtP_h as an explicit matrix (one exact Darcy solve per interface dof).
DenseMatrix ExplicitFtp(const Discretization &disc);

// Outer operator [A0 + C_S, -B0'; -B0, 0] with the exact C_S.
SparseMatrix ExplicitOuterMatrix(const Discretization &disc);

struct ConditionEstimate
{
  double lambda_min = 0.0;  // smallest eigenvalue magnitude
  double lambda_max = 0.0;
  double Kappa() const { return lambda_max / lambda_min; }
};

// Extreme eigenvalues of pinv * a for SPD a by Lanczos in the a inner product.
ConditionEstimate SpdCondition(const SparseMatrix &a, const LinearOperator &pinv, int steps,
                               unsigned seed);

// Condition of P_S^{-1} A_S with direct blocks, P_S = blockdiag(A0, M_S).
ConditionEstimate OuterCondition(const Discretization &disc, int steps, unsigned seed);

// Condition of P^{-1} (A_D + D_D) on H^h_0 for the given inner choice.
ConditionEstimate DarcyFluxCondition(const Discretization &disc, InnerBlock block, int steps,
                                     unsigned seed);

// Smallest nonzero generalized singular value of B relative to the norms x (velocity) and m
// (pressure), from a dense eigenproblem.
double DiscreteInfSup(const SparseMatrix &b, const SparseMatrix &x, const SparseMatrix &m);

// Stokes constant on V^h_0 x L^h_0 with the full H1 norm.
double StokesInfSup(const ScalarSpace &velocity, const ScalarSpace &pressure);

// Darcy constant on H^h_0 x L^h_0 with the H(div) graph norm.
double DarcyInfSup(const FluxSpace &flux, const ScalarSpace &pressure);

struct InfSupPair
{
  double stokes = 0.0;
  double darcy = 0.0;
};
InfSupPair PairInfSup(ElementPair pair, int n);

// Unstable control: continuous P1 velocity and pressure on the Stokes mesh.
double UnstableInfSup(int n);

}  // namespace sdarcy

#endif  // SDARCY_SOLVER_HPP
