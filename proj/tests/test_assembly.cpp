#include <cmath>
#include <memory>
#include <sstream>
#include <gtest/gtest.h>
#include <Eigen/Eigenvalues>
#include "sdarcy/assembly.hpp"
#include "sdarcy/errors.hpp"

using namespace sdarcy;

namespace
{

double MaxAbs(const SparseMatrix &a)
{
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); k++)
  {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
    {
      m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

Vector VectorInterpolate(const ScalarSpace &s, const std::function<Point(Point)> &f)
{
  const Vector x = s.Interpolate([&](Point p) { return f(p).x; });
  const Vector y = s.Interpolate([&](Point p) { return f(p).y; });
  Vector out(2 * s.NumDofs());
  out << x, y;
  return out;
}

}  // namespace

TEST(Assembly, StokesFormsAreSymmetric)
{
  for (ElementPair pair :
       {ElementPair::MiniBdm1, ElementPair::P2isoP1Bdm1, ElementPair::TaylorHoodRt1})
  {
    const CoupledSpaces s = BuildSpaces(pair, 8);
    const StokesForms f = AssembleStokes(*s.velocity, *s.stokes_pressure, {});
    EXPECT_LE(MaxAsymmetry(f.A), 1e-13) << to_string(pair);
    EXPECT_LE(MaxAsymmetry(f.M), 1e-13) << to_string(pair);
    EXPECT_EQ(f.A0.rows(), static_cast<int>(f.free.size()));
    EXPECT_EQ(f.B0.cols(), static_cast<int>(f.free.size()));
  }
}

TEST(Assembly, ConstrainedStokesMatrixIsPositiveDefinite)
{
  const CoupledSpaces s = BuildSpaces(ElementPair::MiniBdm1, 4);
  const StokesForms f = AssembleStokes(*s.velocity, *s.stokes_pressure, {});
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> eig{DenseMatrix(f.A0)};
  EXPECT_GT(eig.eigenvalues().minCoeff(), 1e-6);
}

TEST(Assembly, ShearFieldEnergy)
{
  // u = (y - 1/2, 0): eps:eps = 1/2 and the slip term vanishes on y = 1/2.
  for (double nu : {1.0, 2.5})
  {
    const CoupledSpaces s = BuildSpaces(ElementPair::MiniBdm1, 8);
    const StokesForms f = AssembleStokes(*s.velocity, *s.stokes_pressure, {nu, 1.0, 1.0});
    const Vector u = VectorInterpolate(*s.velocity, [](Point x) { return Point{x.y - 0.5, 0.0}; });
    EXPECT_NEAR(u.dot(f.A * u), nu / 2, 1e-12);
  }
}

TEST(Assembly, SlipTermWeightsTangentialTrace)
{
  // u = (1, 0) on the Stokes region has no strain: only kappa |Sigma| remains.
  const CoupledSpaces s = BuildSpaces(ElementPair::TaylorHoodRt1, 4);
  const StokesForms f = AssembleStokes(*s.velocity, *s.stokes_pressure, {1.0, 3.0, 1.0});
  const Vector u = VectorInterpolate(*s.velocity, [](Point) { return Point{1.0, 0.0}; });
  EXPECT_NEAR(u.dot(f.A * u), 3.0, 1e-12);
  const Vector v = VectorInterpolate(*s.velocity, [](Point) { return Point{0.0, 1.0}; });
  EXPECT_NEAR(v.dot(f.A * v), 0.0, 1e-12);
}

TEST(Assembly, DarcyFormsProperties)
{
  for (ElementPair pair : {ElementPair::MiniBdm1, ElementPair::TaylorHoodRt1})
  {
    const CoupledSpaces s = BuildSpaces(pair, 8);
    const double tau = 2.0;
    const DarcyForms f = AssembleDarcy(*s.flux, *s.darcy_pressure, {1.0, 1.0, tau});
    EXPECT_LE(MaxAsymmetry(f.A), 1e-13);
    EXPECT_LE(MaxAsymmetry(f.D), 1e-13 * MaxAbs(f.D));
    EXPECT_LE(MaxAsymmetry(f.M), 1e-13);

    // Constant field (0, 1): tau |Omega_D|.
    const Vector c = s.flux->Interpolate([](Point) { return Point{0.0, 1.0}; });
    EXPECT_NEAR(c.dot(f.A * c), tau * 0.5, 1e-12);

    // Divergence-free field curl(x^2 + x y) = (x, -2x - y).
    const Vector w = s.flux->Interpolate([](Point x) { return Point{x.x, -2.0 * x.x - x.y}; });
    EXPECT_LE((f.D * w).norm(), 1e-12);

    // b_D(u, 1) vanishes on the constrained space.
    const Vector ones = Vector::Ones(f.B.rows());
    const Vector flux_of_one = f.B.transpose() * ones;
    for (int i : f.interior)
    {
      EXPECT_NEAR(flux_of_one[i], 0.0, 1e-13);
    }
  }
}

TEST(Assembly, DivergenceLiesInPressureSpace)
{
  // D = B' M^{-1} B holds exactly iff div of every flux basis function is in the pressure space.
  for (ElementPair pair : {ElementPair::MiniBdm1, ElementPair::TaylorHoodRt1})
  {
    const CoupledSpaces s = BuildSpaces(pair, 8);
    const DarcyForms f = AssembleDarcy(*s.flux, *s.darcy_pressure, {});
    const DenseMatrix b(f.B);
    const DenseMatrix proj = b.transpose() * DenseMatrix(f.M).ldlt().solve(b);
    EXPECT_LE((proj - DenseMatrix(f.D)).cwiseAbs().maxCoeff(), 1e-12 * MaxAbs(f.D));
  }
}

TEST(Assembly, AssemblyIsDeterministic)
{
  const CoupledSpaces s = BuildSpaces(ElementPair::TaylorHoodRt1, 8);
  const StokesForms a = AssembleStokes(*s.velocity, *s.stokes_pressure, {});
  const StokesForms b = AssembleStokes(*s.velocity, *s.stokes_pressure, {});
  EXPECT_EQ(MaxAbs(a.A - b.A), 0.0);
  EXPECT_EQ(MaxAbs(a.B - b.B), 0.0);
}

TEST(Assembly, InterfaceProjectionReproducesP1Traces)
{
  const CoupledSpaces s = BuildSpaces(ElementPair::MiniBdm1, 8);
  const InterfaceForms f = AssembleInterface(*s.velocity, *s.flux);
  // Normal trace -(1 + x) is piecewise linear; the flux interpolant carries the same moments.
  auto field = [](Point x) { return Point{x.x, 1.0 + x.x}; };
  const Vector u = VectorInterpolate(*s.velocity, field);
  const Vector c = s.flux->Interpolate(field);
  const Vector expect = f.N * c;
  EXPECT_LE((f.R * u - expect).lpNorm<Eigen::Infinity>(), 1e-13);
  EXPECT_LE(MaxAbs(f.Q * f.R - f.T), 1e-14);
}

TEST(Assembly, InterfaceProjectionOfConstantTrace)
{
  const CoupledSpaces s = BuildSpaces(ElementPair::P2isoP1Bdm1, 8);
  const InterfaceForms f = AssembleInterface(*s.velocity, *s.flux);
  const Vector u = VectorInterpolate(*s.velocity, [](Point) { return Point{0.0, -1.0}; });
  const Vector r = f.R * u;
  for (int k = 0; k < r.size(); k += 2)
  {
    EXPECT_NEAR(r[k], 1.0 / 8, 1e-14);  // 1 = psi_0 |e|
    EXPECT_NEAR(r[k + 1], 0.0, 1e-14);
  }
}

TEST(Assembly, InterfaceProjectionOfQuadraticTraceMatchesLeastSquares)
{
  const CoupledSpaces s = BuildSpaces(ElementPair::TaylorHoodRt1, 4);
  const InterfaceForms f = AssembleInterface(*s.velocity, *s.flux);
  auto trace = [](double x) { return x * (1.0 - x); };
  const Vector u = VectorInterpolate(*s.velocity, [&](Point x) { return Point{0.0, -trace(x.x)}; });
  const Vector r = f.R * u;
  // Weighted least squares with a 3-point Gauss rule is the exact L2 projection for this degree.
  const double g = std::sqrt(15.0) / 10, pts[3] = {0.5 - g, 0.5, 0.5 + g};
  const double wts[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
  const double len = 0.25;
  for (int k = 0; k < 4; k++)
  {
    DenseMatrix a(3, 2);
    Vector b(3);
    for (int q = 0; q < 3; q++)
    {
      const double sw = std::sqrt(wts[q]);
      a(q, 0) = sw;
      a(q, 1) = sw * (2.0 * pts[q] - 1.0);
      b[q] = sw * trace(len * (k + pts[q]));
    }
    const Vector ab = a.colPivHouseholderQr().solve(b);
    // a0 + a1 (2s - 1) = c0 psi_0 + c1 psi_1 with psi_0 = 1/|e|, psi_1 = 3 (2s - 1)/|e|.
    EXPECT_NEAR(r[2 * k], ab[0] * len, 1e-14);
    EXPECT_NEAR(r[2 * k + 1], ab[1] * len / 3.0, 1e-14);
  }
}

TEST(Assembly, ZeroCaseHasZeroLoads)
{
  const CoupledSpaces s = BuildSpaces(ElementPair::MiniBdm1, 8);
  const Loads l = AssembleLoads(s, ZeroCase());
  EXPECT_EQ(l.stokes.norm(), 0.0);
  EXPECT_EQ(l.darcy.norm(), 0.0);
  EXPECT_EQ(l.interface_residual, 0.0);
}

TEST(Assembly, BenchmarkSourceIsCompatible)
{
  const TrigonometricCase c;
  EXPECT_LE(std::abs(DarcySourceIntegral(c)), 1e-10);
  const CoupledSpaces s = BuildSpaces(ElementPair::TaylorHoodRt1, 8);
  const Loads l = AssembleLoads(s, c);
  EXPECT_LE(std::abs(l.darcy.sum()), 1e-10);
}

TEST(Assembly, IncompatibleSourceIsRejected)
{
  const CoupledSpaces s = BuildSpaces(ElementPair::MiniBdm1, 4);
  EXPECT_THROW(AssembleLoads(s, IncompatibleCase()), InvalidCase);
  EXPECT_NEAR(DarcySourceIntegral(IncompatibleCase()), 0.5, 1e-12);
}

TEST(Assembly, NormalVelocitiesMatchOnInterface)
{
  const TrigonometricCase c;
  for (int i = 0; i < 20; i++)
  {
    const Point x{(i + 0.5) / 20.0, 0.5};
    // Both equal 6 pi sin^2(2 pi x) cos(2 pi x) up to the sign of n = (0, -1).
    const double s = std::sin(2.0 * M_PI * x.x);
    const double expect = 6.0 * M_PI * s * s * std::cos(2.0 * M_PI * x.x);
    EXPECT_NEAR(-c.StokesVelocity(x).y, -c.DarcyVelocity(x).y, 1e-12);
    EXPECT_NEAR(std::abs(c.StokesVelocity(x).y), std::abs(expect), 1e-12);
  }
}

TEST(Assembly, StokesVelocityVanishesOnOuterBoundary)
{
  const TrigonometricCase c;
  for (int i = 0; i <= 20; i++)
  {
    const double t = i / 20.0;
    for (Point x : {Point{0.0, 0.5 + 0.5 * t}, Point{1.0, 0.5 + 0.5 * t}, Point{t, 1.0}})
    {
      EXPECT_NEAR(c.StokesVelocity(x).x, 0.0, 1e-12);
      EXPECT_NEAR(c.StokesVelocity(x).y, 0.0, 1e-12);
    }
  }
}

TEST(Assembly, SourcesAgreeWithFiniteDifferences)
{
  const PhysicalParams params{1.5, 0.7, 2.0};
  const TrigonometricCase c(params);
  const double h = 1e-6;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  for (int i = 0; i < 10; i++)
  {
    const Point xs{0.05 + 0.09 * i, 0.55 + 0.04 * i};
    const Point dx{h, 0.0}, dy{0.0, h};
    // Gradient of the velocity.
    const Point ux = (1.0 / (2 * h)) * (c.StokesVelocity(xs + dx) - c.StokesVelocity(xs - dx));
    const Point uy = (1.0 / (2 * h)) * (c.StokesVelocity(xs + dy) - c.StokesVelocity(xs - dy));
    const Gradient g = c.StokesVelocityGradient(xs);
    EXPECT_LE(rel(ux.x, g[0]), 1e-6);
    EXPECT_LE(rel(uy.x, g[1]), 1e-6);
    EXPECT_LE(rel(ux.y, g[2]), 1e-6);
    EXPECT_LE(rel(uy.y, g[3]), 1e-6);
    EXPECT_LE(std::abs(g[0] + g[3]), 1e-10);  // divergence free
    // f_S = -nu lap u + grad p from differences of the gradient and the pressure.
    auto grad = [&](Point x) { return c.StokesVelocityGradient(x); };
    const Gradient gxp = grad(xs + dx), gxm = grad(xs - dx), gyp = grad(xs + dy), gym = grad(xs - dy);
    const double lap1 = (gxp[0] - gxm[0] + gyp[1] - gym[1]) / (2 * h);
    const double lap2 = (gxp[2] - gxm[2] + gyp[3] - gym[3]) / (2 * h);
    const double px = (c.StokesPressure(xs + dx) - c.StokesPressure(xs - dx)) / (2 * h);
    const double py = (c.StokesPressure(xs + dy) - c.StokesPressure(xs - dy)) / (2 * h);
    const Point f = c.StokesForce(xs);
    EXPECT_LE(rel(-params.nu * lap1 + px, f.x), 1e-6);
    EXPECT_LE(rel(-params.nu * lap2 + py, f.y), 1e-6);

    // f_D = div(-grad p_D / tau).
    const Point xd{0.05 + 0.09 * i, 0.04 + 0.045 * i};
    const double dxx = (c.DarcyPressureGradient(xd + dx).x - c.DarcyPressureGradient(xd - dx).x) / (2 * h);
    const double dyy = (c.DarcyPressureGradient(xd + dy).y - c.DarcyPressureGradient(xd - dy).y) / (2 * h);
    EXPECT_LE(rel(-(dxx + dyy) / params.tau, c.DarcySource(xd)), 1e-6);
    const double pdx = (c.DarcyPressure(xd + dx) - c.DarcyPressure(xd - dx)) / (2 * h);
    EXPECT_LE(rel(-pdx / params.tau, c.DarcyVelocity(xd).x), 1e-6);
  }
}

TEST(Assembly, InterfaceResidualFromDefinition)
{
  const TrigonometricCase c;
  for (int i = 0; i < 10; i++)
  {
    const Point x{0.03 + 0.1 * i, 0.5};
    const Gradient g = c.StokesVelocityGradient(x);
    const Point u = c.StokesVelocity(x);
    // n = (0, -1): 2 eps(u) n = -(g[1] + g[2], 2 g[3]); pi_t u = (u_x, 0).
    const double nu = c.Params().nu, kappa = c.Params().kappa;
    const Point expect{-nu * (g[1] + g[2]) + kappa * u.x,
                       -2.0 * nu * g[3] + c.StokesPressure(x) - c.DarcyPressure(x)};
    const Point r = c.InterfaceResidual(x);
    EXPECT_NEAR(r.x, expect.x, 1e-10);
    EXPECT_NEAR(r.y, expect.y, 1e-10);
  }
}

TEST(Assembly, MatrixDumpFormat)
{
  SparseMatrix a(2, 2);
  a.insert(0, 1) = 2.5;
  std::ostringstream os;
  WriteMatrix(os, a);
  std::istringstream is(os.str());
  int i = -1, j = -1;
  double v = 0.0;
  is >> i >> j >> v;
  EXPECT_EQ(i, 0);
  EXPECT_EQ(j, 1);
  EXPECT_EQ(v, 2.5);
}
