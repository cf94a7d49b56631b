#ifndef SDARCY_PRECOND_HPP
#define SDARCY_PRECOND_HPP

#include <memory>
#include <string>
#include <vector>
#include "sdarcy/fespace.hpp"
#include "sdarcy/krylov.hpp"
#include "sdarcy/linalg.hpp"

namespace sdarcy
{

// Inverse of an SPD matrix through a cached sparse Cholesky factorization. Throws
// InvalidArgument if the factorization breaks down.
LinearOperator DirectInverse(const SparseMatrix &spd);

// Inverse of the diagonal.
LinearOperator JacobiInverse(const SparseMatrix &a);

// One symmetric Gauss-Seidel sweep from a zero initial guess: (D + U)^{-1} D (D + L)^{-1}.
LinearOperator SymmetricGaussSeidel(const SparseMatrix &a);

bool IsDiagonal(const SparseMatrix &a);

enum class MassMode
{
  Auto,   // exact inverse for diagonal matrices, one symmetric Gauss-Seidel sweep otherwise
  Exact,  // always exact (Cholesky unless diagonal)
  GaussSeidel
};

LinearOperator MassInverse(const SparseMatrix &m, MassMode mode);

// blockdiag(first, second) acting on [x_first; x_second].
LinearOperator BlockDiagonal(const LinearOperator &first, const LinearOperator &second);

//
// Additive multilevel (BPX) preconditioner over a nested hierarchy
//   B = sum_l T_{J,l} D_l^{-1} T_{J,l}' (levels l >= 1) + T_{J,0} A_0^{-1} T_{J,0}'
// with Galerkin level matrices A_{l-1} = T_l' A_l T_l and D_l the diagonal of A_l. Level
// matrices that become empty (no free dofs) are skipped.
//
// `prolongations[l]` maps level l to level l + 1; the last one ends in the fine space.
LinearOperator BpxInverse(const SparseMatrix &fine,
                          const std::vector<SparseMatrix> &prolongations);

// Continuous P1 interpolation from `coarse` onto its refinement `fine` (full vertex sets).
SparseMatrix P1Prolongation(const SubMesh &fine, const SubMesh &coarse);

// Embedding of continuous P1 on the mesh of `target` into `target` (P1c, P2c or P1+bubble).
SparseMatrix P1Embedding(const ScalarSpace &target);

// kron(I_components, t).
SparseMatrix Replicate(const SparseMatrix &t, int components);

//
// Prolongations of the nodal hierarchy ending in `fine_space`: continuous P1 on every level
// mesh, followed by the embedding into the fine space when it is not P1 itself. Each level
// keeps the dofs selected by `keep` (applied to the P1 dof classes, resp. the fine classes),
// replicated over `components` vector components.
//
std::vector<SparseMatrix> NodalProlongations(
  const std::vector<std::shared_ptr<const SubMesh>> &levels, const ScalarSpace &fine_space,
  bool (*keep)(DofClass), int components);

bool KeepNotGammaS(DofClass c);
bool KeepInterior(DofClass c);

//
// Transfer matrices of the two-dimensional nodal auxiliary space preconditioner for
// tau (u, v) + (div u, div v) on H^h_0. The nodal space V is continuous P_k (k = 1 for BDM1,
// k = 2 for RT1) vanishing on the whole Darcy boundary. Rows index the interior flux dofs.
//
struct HxTransfer
{
  std::shared_ptr<const ScalarSpace> nodal;
  std::vector<int> nodal_free;  // free scalar nodal dofs
  SparseMatrix C;               // flux x scalar: curl v = sum C(:, l) phi
  SparseMatrix Idiv;            // flux x (2 * scalar): canonical interpolation of nodal vectors
  Vector Sdiv;                  // diagonal of A_D + D_D
  SparseMatrix L;               // vector nodal stiffness + tau mass (block diagonal)
  SparseMatrix Laplace;         // scalar nodal stiffness
  double tau = 1.0;
  // Largest pointwise residual of the curl expansion found while building C.
  double curl_residual = 0.0;
};

HxTransfer BuildHxTransfer(const FluxSpace &flux, const std::vector<int> &interior,
                           const SparseMatrix &adplusd, double tau);

enum class LaplaceSolver
{
  Direct,
  Bpx
};

// Counts second-order solves performed by HX applications.
struct HxCounters
{
  long applications = 0;
  long laplace_solves = 0;
};

//
// (S_div)^{-1} + I_div L^{-1} I_div' + tau^{-1} C (-Delta)^{-1} C'. `darcy_levels` is needed
// only for the BPX mode.
//
LinearOperator HxInverse(const HxTransfer &t, LaplaceSolver mode,
                         const std::vector<std::shared_ptr<const SubMesh>> &darcy_levels,
                         std::shared_ptr<HxCounters> counters = nullptr);

// Outer velocity block choice.
enum class OuterBlock
{
  Direct,
  Bpx
};

// Inner flux block choice: P_D^0 (direct A+D), HX with direct Laplace solves, HX with BPX.
enum class InnerBlock
{
  Direct,
  HxDirect,
  HxBpx
};

struct PrecondCombo
{
  OuterBlock outer = OuterBlock::Direct;
  InnerBlock inner = InnerBlock::Direct;
  MassMode mass = MassMode::Auto;
};

std::string to_string(const PrecondCombo &c);
// "direct:direct", "bpx:hx-bpx", ...; also accepts the short names used in the tables.
PrecondCombo ParseCombo(const std::string &text);

}  // namespace sdarcy

#endif  // SDARCY_PRECOND_HPP
