#include <cmath>
#include <random>
#include <gtest/gtest.h>
#include "sdarcy/errors.hpp"
#include "sdarcy/ftp.hpp"
#include "sdarcy/solver.hpp"

using namespace sdarcy;

namespace
{

Vector Random(int n, unsigned seed)
{
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  Vector v(n);
  for (int i = 0; i < n; i++)
  {
    v[i] = dist(gen);
  }
  return v;
}

DarcySubsolver MakeSolver(const Discretization &d, DarcySolveMode mode, double rtol = 1e-2,
                          InnerBlock block = InnerBlock::Direct,
                          ResidualNorm norm = ResidualNorm::Preconditioned)
{
  DarcySolverOptions o;
  o.norm = norm;
  o.mode = mode;
  o.rtol = rtol;
  o.block = block;
  return DarcySubsolver(d.spaces, d.darcy, o, d.params.tau);
}

class FtpPairs : public ::testing::TestWithParam<ElementPair>
{
};

}  // namespace

TEST_P(FtpPairs, ZeroDatum)
{
  const Discretization d = Discretize(GetParam(), 8);
  for (DarcySolveMode mode : {DarcySolveMode::Exact, DarcySolveMode::Iterative})
  {
    DarcySubsolver s = MakeSolver(d, mode);
    const FtpResult r = ApplyFtp(s, Vector::Zero(s.NumPhi()));
    EXPECT_EQ(r.functional.norm(), 0.0);
    EXPECT_EQ(r.fields.flux.norm(), 0.0);
    EXPECT_EQ(r.fields.pressure.norm(), 0.0);
  }
}

TEST_P(FtpPairs, SymmetricAndPositiveSemidefinite)
{
  const Discretization d = Discretize(GetParam(), 8);
  DarcySubsolver s = MakeSolver(d, DarcySolveMode::Exact);
  for (unsigned k = 0; k < 10; k++)
  {
    const Vector phi = Random(s.NumPhi(), 2 * k);
    const Vector psi = Random(s.NumPhi(), 2 * k + 1);
    const FtpResult fp = ApplyFtp(s, phi);
    const FtpResult fq = ApplyFtp(s, psi);
    const double scale = fp.functional.norm() * psi.norm() + fq.functional.norm() * phi.norm();
    EXPECT_LE(std::abs(fp.functional.dot(psi) - fq.functional.dot(phi)), 1e-10 * scale);
    // <FtP(phi), phi> = a_D(u, u).
    const double energy = fp.fields.flux.dot(d.darcy.A * fp.fields.flux);
    EXPECT_GE(fp.functional.dot(phi), -1e-12);
    EXPECT_NEAR(fp.functional.dot(phi), energy, 1e-10 * energy);
  }
}

TEST_P(FtpPairs, LiftingCarriesTheDatum)
{
  const Discretization d = Discretize(GetParam(), 8);
  DarcySubsolver s = MakeSolver(d, DarcySolveMode::Iterative);
  const Vector phi = Random(s.NumPhi(), 3);
  const FtpResult r = ApplyFtp(s, phi);
  EXPECT_EQ((Gather(r.fields.flux, d.darcy.sigma) - phi).norm(), 0.0);
  // Zero normal trace on the outer boundary.
  for (int i = 0; i < s.NumFlux(); i++)
  {
    if (d.spaces.flux->Classes()[i] == DofClass::GammaD)
    {
      EXPECT_EQ(r.fields.flux[i], 0.0);
    }
  }
  // Zero-mean pressure.
  EXPECT_NEAR(r.fields.pressure.dot(d.darcy.M * Vector::Ones(d.darcy.M.rows())), 0.0, 1e-12);
}

TEST_P(FtpPairs, Linearity)
{
  const Discretization d = Discretize(GetParam(), 8);
  DarcySubsolver s = MakeSolver(d, DarcySolveMode::Iterative, 1e-12);
  const Vector phi = Random(s.NumPhi(), 4), psi = Random(s.NumPhi(), 5);
  const double a = 0.7, b = -2.5;
  const Vector lhs = ApplyFtp(s, a * phi + b * psi).functional;
  const Vector rhs = a * ApplyFtp(s, phi).functional + b * ApplyFtp(s, psi).functional;
  EXPECT_LE((lhs - rhs).norm(), 1e-8 * rhs.norm());
}

TEST_P(FtpPairs, IterativeAgreesWithExact)
{
  const Discretization d = Discretize(GetParam(), 8);
  DarcySubsolver it = MakeSolver(d, DarcySolveMode::Iterative, 1e-12);
  DarcySubsolver ex = MakeSolver(d, DarcySolveMode::Exact);
  const Vector phi = Random(it.NumPhi(), 6);
  const FtpResult a = ApplyFtp(it, phi), b = ApplyFtp(ex, phi);
  EXPECT_LE((a.functional - b.functional).norm(), 1e-8 * b.functional.norm());
  EXPECT_LE((a.fields.pressure - b.fields.pressure).norm(), 1e-8 * b.fields.pressure.norm());
}

TEST_P(FtpPairs, HxInnerSolvesAgree)
{
  const Discretization d = Discretize(GetParam(), 8);
  DarcySubsolver ex = MakeSolver(d, DarcySolveMode::Exact);
  const Vector phi = Random(ex.NumPhi(), 7);
  const Vector ref = ApplyFtp(ex, phi).functional;
  for (InnerBlock block : {InnerBlock::HxDirect, InnerBlock::HxBpx})
  {
    DarcySubsolver s = MakeSolver(d, DarcySolveMode::Iterative, 1e-12, block);
    EXPECT_LE((ApplyFtp(s, phi).functional - ref).norm(), 1e-8 * ref.norm());
  }
}

TEST_P(FtpPairs, SourceResidualSolvesDarcyEquations)
{
  const Discretization d = Discretize(GetParam(), 8);
  const Loads loads = AssembleLoads(d.spaces, TrigonometricCase());
  // Euclidean stopping at 1e-2 bounds the equation residual by 1e-2 |f| (zero initial guess).
  DarcySubsolver s =
    MakeSolver(d, DarcySolveMode::Iterative, 1e-2, InnerBlock::Direct, ResidualNorm::Euclidean);
  const FtpResult r = SourceResidual(s, loads.darcy, 1e-10, 1e-2);
  const double ref = loads.darcy.norm();
  EXPECT_LE(s.EquationResidual(r.fields, Vector::Zero(s.NumPhi()), loads.darcy), 1e-2 * ref);
  // Tight solve: the discrete equations hold to round-off.
  DarcySubsolver ex = MakeSolver(d, DarcySolveMode::Exact);
  const FtpResult e = SourceResidual(ex, loads.darcy);
  EXPECT_LE(ex.EquationResidual(e.fields, Vector::Zero(ex.NumPhi()), loads.darcy), 1e-10 * ref);
  EXPECT_EQ(Gather(e.fields.flux, d.darcy.sigma).norm(), 0.0);
}

TEST_P(FtpPairs, ZeroSourceGivesZeroResidual)
{
  const Discretization d = Discretize(GetParam(), 8);
  DarcySubsolver s = MakeSolver(d, DarcySolveMode::Exact);
  const FtpResult r = SourceResidual(s, Vector::Zero(d.darcy.M.rows()));
  EXPECT_EQ(r.functional.norm(), 0.0);
}

TEST_P(FtpPairs, IncompatibleSourceIsRejected)
{
  const Discretization d = Discretize(GetParam(), 8);
  DarcySubsolver s = MakeSolver(d, DarcySolveMode::Exact);
  // Load of f_D = 1: (1, q_i) for every pressure basis function, summing to |Omega_D| = 1/2.
  const Vector load = d.darcy.M * Vector::Ones(d.darcy.M.rows());
  EXPECT_NEAR(load.sum(), 0.5, 1e-12);
  EXPECT_THROW(SourceResidual(s, load), InvalidCase);
}

TEST_P(FtpPairs, CouplingOperatorProperties)
{
  const Discretization d = Discretize(GetParam(), 8);
  DarcySubsolver s = MakeSolver(d, DarcySolveMode::Iterative, 1e-10);
  const int nu = d.NumFreeVelocity();
  for (unsigned k = 0; k < 10; k++)
  {
    const Vector u = Random(nu, 100 + 2 * k), v = Random(nu, 101 + 2 * k);
    const Vector cu = ApplyCS(s, d.r_free, u), cv = ApplyCS(s, d.r_free, v);
    const double scale = cu.norm() * v.norm() + cv.norm() * u.norm();
    EXPECT_LE(std::abs(cu.dot(v) - cv.dot(u)), 1e-8 * scale);
    EXPECT_GE(cu.dot(u), -1e-12);
  }
}

TEST_P(FtpPairs, TangentialVelocityDoesNotCouple)
{
  const Discretization d = Discretize(GetParam(), 8);
  DarcySubsolver s = MakeSolver(d, DarcySolveMode::Iterative);
  // Only the first velocity component: zero normal trace on the interface.
  const int nd = d.spaces.velocity->NumDofs();
  Vector full = Vector::Zero(2 * nd);
  full.head(nd) = Random(nd, 9);
  const Vector u = Gather(full, d.stokes.free);
  EXPECT_EQ(ApplyCS(s, d.r_free, u).norm(), 0.0);
}

TEST_P(FtpPairs, OneInnerSolvePerApplication)
{
  const Discretization d = Discretize(GetParam(), 8);
  DarcySubsolver s = MakeSolver(d, DarcySolveMode::Iterative);
  s.ResetCounters();
  for (int k = 0; k < 4; k++)
  {
    ApplyCS(s, d.r_free, Random(d.NumFreeVelocity(), 200 + k));
  }
  EXPECT_EQ(s.Solves(), 4);
  EXPECT_GT(s.TotalIterations(), 0);
}

TEST_P(FtpPairs, InnerNonConvergenceIsReported)
{
  const Discretization d = Discretize(GetParam(), 8);
  DarcySolverOptions o;
  o.rtol = 1e-14;
  o.maxit = 1;
  DarcySubsolver s(d.spaces, d.darcy, o, d.params.tau);
  EXPECT_THROW(ApplyFtp(s, Random(s.NumPhi(), 10)), SolverFailure);
  EXPECT_THROW(ApplyFtp(s, Vector::Zero(s.NumPhi() + 1)), InvalidArgument);
}

INSTANTIATE_TEST_SUITE_P(Pairs, FtpPairs,
                         ::testing::Values(ElementPair::MiniBdm1, ElementPair::P2isoP1Bdm1,
                                           ElementPair::TaylorHoodRt1),
                         [](const auto &info)
                         {
                           switch (info.param)
                           {
                             case ElementPair::MiniBdm1:
                               return "Mini";
                             case ElementPair::P2isoP1Bdm1:
                               return "P2isoP1";
                             default:
                               return "TaylorHood";
                           }
                         });
