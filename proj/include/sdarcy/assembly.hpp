#ifndef SDARCY_ASSEMBLY_HPP
#define SDARCY_ASSEMBLY_HPP

#include <memory>
#include <vector>
#include "sdarcy/fespace.hpp"
#include "sdarcy/linalg.hpp"
#include "sdarcy/manufactured.hpp"
#include "sdarcy/mesh.hpp"

namespace sdarcy
{

//
// Meshes and spaces of one coupled discretization. The level lists run from the coarsest mesh
// of the refinement hierarchy to the mesh carrying the respective space and are linked by
// parent maps (used by the multilevel preconditioners).
//
struct CoupledSpaces
{
  ElementPair pair = ElementPair::MiniBdm1;
  int n = 0;
  std::vector<std::shared_ptr<const SubMesh>> stokes_levels;
  std::vector<std::shared_ptr<const SubMesh>> darcy_levels;
  std::shared_ptr<const ScalarSpace> velocity;         // scalar space of each velocity component
  std::shared_ptr<const ScalarSpace> stokes_pressure;
  std::shared_ptr<const FluxSpace> flux;
  std::shared_ptr<const ScalarSpace> darcy_pressure;

  VectorLayout VelocityLayout() const { return {velocity->NumDofs()}; }
  // Total size of X^h x Q^h before any constraint is applied.
  int TotalDofs() const;
};

CoupledSpaces BuildSpaces(ElementPair pair, int n);

// A Sigma edge of a submesh together with the triangle owning it.
struct EdgeOwner
{
  int edge = -1;
  int triangle = -1;
  int local = -1;  // local edge index within the triangle
};

// Interface edges of a submesh sorted by x.
std::vector<EdgeOwner> SigmaEdgeOwners(const SubMesh &mesh);

//
// Stokes forms over the full vector velocity space (dof (c, i) -> c * n + i):
//   A(v, u) = 2 nu (eps(u), eps(v)) + kappa <pi_t u, pi_t v>_Sigma
//   B(q, u) = (div u, q)
//   M(q, p) = (p, q)
// Reduced blocks drop the no-slip dofs on Gamma_S.
//
struct StokesForms
{
  SparseMatrix A, B, M;
  std::vector<int> free;  // free vector velocity dofs
  SparseMatrix A0, B0;    // A[free, free], B[:, free]
};

StokesForms AssembleStokes(const ScalarSpace &velocity, const ScalarSpace &pressure,
                           const PhysicalParams &params);

//
// Darcy forms over the full flux space:
//   A(v, u) = tau (u, v),  D(v, u) = (div u, div v),  B(q, u) = (div u, q),  M(q, p) = (p, q).
// `interior` lists the flux dofs of H^h_0 (zero normal trace on Gamma_D and Sigma) and `sigma`
// the interface dofs in the order of FluxSpace::SigmaDofs.
//
struct DarcyForms
{
  SparseMatrix A, D, B, M;
  std::vector<int> interior, sigma;
};

DarcyForms AssembleDarcy(const FluxSpace &flux, const ScalarSpace &pressure,
                         const PhysicalParams &params);

//
// Interface coupling. Phi^h_D has two functions per Darcy Sigma edge,
//   psi_0 = 1/|e|,  psi_1 = 3 (2s - 1)/|e|,
// which are the normal traces of the two interface flux basis functions. Q is their mass
// matrix, T(k, j) = <phi_j . n, psi_k>_Sigma for the Stokes velocity basis and N selects the
// interface flux dofs. R = Q^{-1} T maps velocity coefficients to the coefficients of
// R^h_D(u . n); in the flux basis these coincide with the interface flux dofs.
//
struct InterfaceForms
{
  SparseMatrix Q, T, N, R;
};

InterfaceForms AssembleInterface(const ScalarSpace &velocity, const FluxSpace &flux);

// Right-hand sides of the coupled problem for a manufactured case.
struct Loads
{
  Vector stokes;       // (f_S, v) + <g_Sigma, v>_Sigma over the full vector velocity space
  Vector stokes_body;  // (f_S, v) alone
  Vector darcy;   // (f_D, q) over the full Darcy pressure space
  double source_integral = 0.0;     // int_{Omega_D} f_D
  double interface_residual = 0.0;  // ||g_Sigma||_{L2(Sigma)}
};

// Throws InvalidCase if |int f_D| exceeds `compat_tol`.
Loads AssembleLoads(const CoupledSpaces &spaces, const ManufacturedCase &mcase,
                    double compat_tol = 1e-10);

// int_{Omega_D} f_D by a mesh-independent tensor Gauss rule.
double DarcySourceIntegral(const ManufacturedCase &mcase);

// Full H1 inner product (grad u, grad v) + (u, v) on the vector space built on `space`.
SparseMatrix VectorH1Matrix(const ScalarSpace &space);

// Coordinate text dump "i j value" of a sparse matrix.
void WriteMatrix(std::ostream &os, const SparseMatrix &a);

}  // namespace sdarcy

#endif  // SDARCY_ASSEMBLY_HPP
