#include <cmath>
#include <memory>
#include <random>
#include <set>
#include <gtest/gtest.h>
#include "sdarcy/assembly.hpp"
#include "sdarcy/errors.hpp"
#include "sdarcy/fespace.hpp"
#include "sdarcy/quadrature.hpp"

using namespace sdarcy;

namespace
{

std::shared_ptr<const SubMesh> Region(int n, Subdomain d)
{
  return std::make_shared<const SubMesh>(ExtractSubdomain(BuildUnitSquare(n), d));
}

// Three-point Gauss rule on [0, 1], written out so that the checks do not share the library's
// quadrature tables.
constexpr double kG = 0.3872983346207417;  // sqrt(15)/10
constexpr double kLinePts[3] = {0.5 - kG, 0.5, 0.5 + kG};
constexpr double kLineWts[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};

// Edge moments of f . n against 1 and 2s - 1 (s running from the lower to the higher vertex).
std::array<double, 2> EdgeMoments(const FluxSpace &space, int e,
                                  const std::function<Point(Point)> &f)
{
  const SubMesh &m = space.Mesh();
  const Point a = m.vertices[m.edges[e].v[0]], b = m.vertices[m.edges[e].v[1]];
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  const Point n = space.EdgeNormal(e);
  std::array<double, 2> out{0.0, 0.0};
  for (int q = 0; q < 3; q++)
  {
    const Point v = f(a + kLinePts[q] * (b - a));
    const double un = v.x * n.x + v.y * n.y;
    out[0] += len * kLineWts[q] * un;
    out[1] += len * kLineWts[q] * un * (2.0 * kLinePts[q] - 1.0);
  }
  return out;
}

Point EvalField(const FluxSpace &space, const Vector &c, int t, Point x)
{
  std::vector<Point> val(space.LocalSize());
  space.EvalAt(t, x, val);
  const auto dofs = space.CellDofs(t);
  Point u{0.0, 0.0};
  for (int i = 0; i < space.LocalSize(); i++)
  {
    u = u + c[dofs[i]] * val[i];
  }
  return u;
}

Vector RandomVector(int n, unsigned seed)
{
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; i++)
  {
    v[i] = dist(gen);
  }
  return v;
}

}  // namespace

TEST(FeSpace, DofCountsOnEightSubdivisions)
{
  const auto darcy = Region(8, Subdomain::Darcy);
  const auto stokes = Region(8, Subdomain::Stokes);
  EXPECT_EQ(darcy->NumEdges(), 45 + 64 - 1);
  EXPECT_EQ(FluxSpace(darcy, ElementFamily::BDM1).NumDofs(), 216);
  EXPECT_EQ(ScalarSpace(darcy, ElementFamily::P0dc).NumDofs(), 64);
  EXPECT_EQ(2 * ScalarSpace(stokes, ElementFamily::P1Bubble).NumDofs(), 218);
}

TEST(FeSpace, MismatchedFamilyAndRegionIsRejected)
{
  EXPECT_THROW(FluxSpace(Region(4, Subdomain::Stokes), ElementFamily::BDM1), InvalidArgument);
  EXPECT_THROW(FluxSpace(Region(4, Subdomain::Darcy), ElementFamily::P1c), InvalidArgument);
  EXPECT_THROW(ScalarSpace(Region(4, Subdomain::Darcy), ElementFamily::BDM1), InvalidArgument);
  EXPECT_THROW(ScalarSpace(Region(4, Subdomain::Darcy), ElementFamily::P1Bubble),
               InvalidArgument);
}

TEST(FeSpace, EverySigmaEdgeCarriesTwoFluxDofs)
{
  for (ElementFamily f : {ElementFamily::BDM1, ElementFamily::RT1})
  {
    const FluxSpace space(Region(8, Subdomain::Darcy), f);
    EXPECT_EQ(space.SigmaEdges().size(), 8u);
    EXPECT_EQ(space.SigmaDofs().size(), 16u);
    int sigma = 0;
    for (DofClass c : space.Classes())
    {
      sigma += c == DofClass::Sigma;
    }
    EXPECT_EQ(sigma, 16);
  }
}

TEST(FeSpace, ConstrainedDofsLieOnTheOuterBoundary)
{
  const ScalarSpace v(Region(8, Subdomain::Stokes), ElementFamily::P2c);
  for (int i = 0; i < v.NumDofs(); i++)
  {
    const Point p = v.DofPoints()[i];
    const bool outer = p.x == 0.0 || p.x == 1.0 || p.y == 1.0;
    EXPECT_EQ(v.Classes()[i] == DofClass::GammaS, outer) << i;
    if (!outer)
    {
      EXPECT_EQ(v.Classes()[i] == DofClass::Sigma, p.y == 0.5) << i;
    }
  }
}

TEST(FeSpace, LocalToGlobalIsInjective)
{
  const auto darcy = Region(4, Subdomain::Darcy);
  const FluxSpace flux(darcy, ElementFamily::RT1);
  const ScalarSpace p2(Region(4, Subdomain::Stokes), ElementFamily::P2c);
  for (int t = 0; t < darcy->NumTriangles(); t++)
  {
    const auto d = flux.CellDofs(t);
    EXPECT_EQ(std::set<int>(d.begin(), d.end()).size(), d.size());
    const auto s = p2.CellDofs(t);
    EXPECT_EQ(std::set<int>(s.begin(), s.end()).size(), s.size());
  }
}

TEST(FeSpace, P1ValuesAtBarycenter)
{
  const auto mesh = Region(2, Subdomain::Stokes);
  const ScalarSpace p1(mesh, ElementFamily::P1c);
  const TriangleGeometry geo(mesh->Corners(0));
  double v[3];
  p1.Eval(geo, {1.0 / 3, 1.0 / 3, 1.0 / 3}, v);
  for (double x : v)
  {
    EXPECT_DOUBLE_EQ(x, 1.0 / 3);
  }
}

TEST(FeSpace, P2PartitionOfUnity)
{
  const auto mesh = Region(2, Subdomain::Stokes);
  const ScalarSpace p2(mesh, ElementFamily::P2c);
  const TriangleGeometry geo(mesh->Corners(1));
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int k = 0; k < 20; k++)
  {
    double a = dist(gen), b = dist(gen);
    if (a + b > 1.0)
    {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    double v[6];
    Point g[6];
    p2.Eval(geo, {a, b, 1.0 - a - b}, v, g);
    double sum = 0.0, gx = 0.0, gy = 0.0;
    for (int i = 0; i < 6; i++)
    {
      sum += v[i];
      gx += g[i].x;
      gy += g[i].y;
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
    EXPECT_NEAR(gx, 0.0, 1e-12);
    EXPECT_NEAR(gy, 0.0, 1e-12);
  }
}

TEST(FeSpace, FluxMomentsOfBasisAreIdentity)
{
  for (ElementFamily f : {ElementFamily::BDM1, ElementFamily::RT1})
  {
    const auto mesh = Region(4, Subdomain::Darcy);
    const FluxSpace space(mesh, f);
    const int k = space.LocalSize();
    for (int t : {0, 5, 15})
    {
      const TriangleGeometry geo(mesh->Corners(t));
      for (int j = 0; j < k; j++)
      {
        auto basis = [&](Point x)
        {
          std::vector<Point> val(k);
          space.EvalAt(t, x, val);
          return val[j];
        };
        for (int i = 0; i < 3; i++)
        {
          const int e = mesh->tri_edges[t][i];
          const auto m = EdgeMoments(space, e, basis);
          EXPECT_NEAR(m[0], j == 2 * i ? 1.0 : 0.0, 1e-12) << to_string(f) << " t=" << t;
          EXPECT_NEAR(m[1], j == 2 * i + 1 ? 1.0 : 0.0, 1e-12) << to_string(f) << " t=" << t;
        }
        if (k == 8)
        {
          // Interior moments against constant unit vectors, scaled by 1/sqrt|T|.
          const TriangleRule &rule = TriangleQuadrature(4);
          double mx = 0.0, my = 0.0;
          for (int q = 0; q < rule.Size(); q++)
          {
            const Point v = basis(geo.Map(rule.points[q]));
            mx += rule.weights[q] * geo.area * v.x;
            my += rule.weights[q] * geo.area * v.y;
          }
          EXPECT_NEAR(mx / std::sqrt(geo.area), j == 6 ? 1.0 : 0.0, 1e-12);
          EXPECT_NEAR(my / std::sqrt(geo.area), j == 7 ? 1.0 : 0.0, 1e-12);
        }
      }
    }
  }
}

TEST(FeSpace, InterpolationReproducesDiscreteFields)
{
  for (ElementFamily f : {ElementFamily::BDM1, ElementFamily::RT1})
  {
    const FluxSpace space(Region(4, Subdomain::Darcy), f);
    const Vector c = RandomVector(space.NumDofs(), 7);
    // Moments taken from each triangle separately must return the coefficients.
    double worst = 0.0;
    std::vector<double> local(space.LocalSize());
    for (int t = 0; t < space.Mesh().NumTriangles(); t++)
    {
      space.LocalMoments(t, [&](Point x) { return EvalField(space, c, t, x); }, local);
      const auto dofs = space.CellDofs(t);
      for (int i = 0; i < space.LocalSize(); i++)
      {
        worst = std::max(worst, std::abs(local[i] - c[dofs[i]]));
      }
    }
    EXPECT_LT(worst, 1e-12) << to_string(f);
  }
}

TEST(FeSpace, ConstantFieldIsInterpolatedExactly)
{
  for (ElementFamily f : {ElementFamily::BDM1, ElementFamily::RT1})
  {
    const FluxSpace space(Region(4, Subdomain::Darcy), f);
    const Vector c = space.Interpolate([](Point) { return Point{1.0, 0.0}; });
    const TriangleRule &rule = TriangleQuadrature(3);
    for (int t = 0; t < space.Mesh().NumTriangles(); t++)
    {
      const TriangleGeometry geo(space.Mesh().Corners(t));
      for (const auto &b : rule.points)
      {
        const Point u = EvalField(space, c, t, geo.Map(b));
        EXPECT_NEAR(u.x, 1.0, 1e-12);
        EXPECT_NEAR(u.y, 0.0, 1e-12);
      }
    }
  }
}

TEST(FeSpace, QuadraticFieldEdgeMomentsMatchIndependentQuadrature)
{
  const FluxSpace space(Region(4, Subdomain::Darcy), ElementFamily::BDM1);
  auto f = [](Point x) { return Point{x.y * x.y, 0.0}; };
  const Vector c = space.Interpolate(f);
  const int t = 3;
  for (int i = 0; i < 3; i++)
  {
    const int e = space.Mesh().tri_edges[t][i];
    const auto exact = EdgeMoments(space, e, f);
    const auto interp = EdgeMoments(space, e, [&](Point x) { return EvalField(space, c, t, x); });
    EXPECT_NEAR(interp[0], exact[0], 1e-13);
    EXPECT_NEAR(interp[1], exact[1], 1e-13);
    EXPECT_NEAR(c[2 * e], exact[0], 1e-13);
    EXPECT_NEAR(c[2 * e + 1], exact[1], 1e-13);
  }
}

TEST(FeSpace, CommutingDiagram)
{
  // v = (x^2 y, x y^2 + y^3), div v = 2 x y + 2 x y + 3 y^2.
  auto v = [](Point x) { return Point{x.x * x.x * x.y, x.x * x.y * x.y + std::pow(x.y, 3)}; };
  auto divv = [](Point x) { return 4.0 * x.x * x.y + 3.0 * x.y * x.y; };
  for (ElementFamily f : {ElementFamily::BDM1, ElementFamily::RT1})
  {
    const auto mesh = Region(4, Subdomain::Darcy);
    const FluxSpace space(mesh, f);
    const ScalarSpace pressure(mesh, PairedPressure(f));
    const Vector c = space.Interpolate(v);
    const int k = space.LocalSize(), kp = pressure.LocalSize();
    const TriangleRule &rule = TriangleQuadrature(8);
    double worst = 0.0;
    for (int t = 0; t < mesh->NumTriangles(); t++)
    {
      const TriangleGeometry geo(mesh->Corners(t));
      // Local L2 projection of div v onto the pressure space.
      DenseMatrix mass = DenseMatrix::Zero(kp, kp);
      Vector load = Vector::Zero(kp);
      std::vector<double> phi(kp);
      for (int q = 0; q < rule.Size(); q++)
      {
        pressure.Eval(geo, rule.points[q], phi);
        const double w = rule.weights[q] * geo.area;
        for (int i = 0; i < kp; i++)
        {
          load[i] += w * phi[i] * divv(geo.Map(rule.points[q]));
          for (int j = 0; j < kp; j++)
          {
            mass(i, j) += w * phi[i] * phi[j];
          }
        }
      }
      const Vector proj = mass.ldlt().solve(load);
      std::vector<Point> val(k);
      std::vector<double> div(k);
      const auto dofs = space.CellDofs(t);
      for (int q = 0; q < rule.Size(); q++)
      {
        space.Eval(t, rule.points[q], val, div);
        pressure.Eval(geo, rule.points[q], phi);
        double dh = 0.0, ph = 0.0;
        for (int i = 0; i < k; i++)
        {
          dh += c[dofs[i]] * div[i];
        }
        for (int i = 0; i < kp; i++)
        {
          ph += proj[i] * phi[i];
        }
        worst = std::max(worst, std::abs(dh - ph));
      }
    }
    EXPECT_LT(worst, 1e-12) << to_string(f);
  }
}

TEST(FeSpace, NormalTracesAreSingleValued)
{
  for (ElementFamily f : {ElementFamily::BDM1, ElementFamily::RT1})
  {
    const auto mesh = Region(8, Subdomain::Darcy);
    const FluxSpace space(mesh, f);
    const Vector c = RandomVector(space.NumDofs(), 11);
    std::vector<std::vector<int>> owners(mesh->NumEdges());
    for (int t = 0; t < mesh->NumTriangles(); t++)
    {
      for (int e : mesh->tri_edges[t])
      {
        owners[e].push_back(t);
      }
    }
    double worst = 0.0;
    for (int e = 0; e < mesh->NumEdges(); e++)
    {
      if (owners[e].size() != 2)
      {
        continue;
      }
      const Point a = mesh->vertices[mesh->edges[e].v[0]];
      const Point b = mesh->vertices[mesh->edges[e].v[1]];
      const Point n = space.EdgeNormal(e);
      for (double s : kLinePts)
      {
        const Point x = a + s * (b - a);
        const Point u0 = EvalField(space, c, owners[e][0], x);
        const Point u1 = EvalField(space, c, owners[e][1], x);
        worst = std::max(worst, std::abs((u0.x - u1.x) * n.x + (u0.y - u1.y) * n.y));
      }
    }
    EXPECT_LT(worst, 1e-12) << to_string(f);
  }
}

TEST(FeSpace, PairedPressureFamilies)
{
  EXPECT_EQ(PairedPressure(ElementFamily::BDM1), ElementFamily::P0dc);
  EXPECT_EQ(PairedPressure(ElementFamily::RT1), ElementFamily::P1dc);
}

TEST(FeSpace, P2isoP1VelocityLivesOnTheRefinedPressureMesh)
{
  const CoupledSpaces s = BuildSpaces(ElementPair::P2isoP1Bdm1, 8);
  EXPECT_EQ(s.velocity->Family(), ElementFamily::P1c);
  EXPECT_EQ(s.velocity->Mesh().n, 2 * s.stokes_pressure->Mesh().n);
  EXPECT_EQ(s.velocity->NumDofs(), s.velocity->Mesh().NumVertices());
  EXPECT_EQ(s.stokes_pressure->NumDofs(), 5 * 3);
  EXPECT_THROW(BuildSpaces(ElementPair::P2isoP1Bdm1, 2), InvalidArgument);
}

TEST(FeSpace, TotalDofColumn)
{
  EXPECT_EQ(BuildSpaces(ElementPair::MiniBdm1, 8).TotalDofs(), 543);
  EXPECT_EQ(BuildSpaces(ElementPair::P2isoP1Bdm1, 8).TotalDofs(), 385);
  EXPECT_EQ(BuildSpaces(ElementPair::TaylorHoodRt1, 8).TotalDofs(), 887);
  EXPECT_EQ(BuildSpaces(ElementPair::MiniBdm1, 16).TotalDofs(), 2043);
}

TEST(FeSpace, ParsePairNames)
{
  EXPECT_EQ(ParseElementPair("MINI-BDM1"), ElementPair::MiniBdm1);
  EXPECT_EQ(ParseElementPair("p2isop1"), ElementPair::P2isoP1Bdm1);
  EXPECT_EQ(ParseElementPair("TH"), ElementPair::TaylorHoodRt1);
  EXPECT_THROW(ParseElementPair("q2"), InvalidArgument);
}
