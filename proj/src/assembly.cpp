#include "sdarcy/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include "sdarcy/errors.hpp"
#include "sdarcy/quadrature.hpp"

namespace sdarcy
{

int CoupledSpaces::TotalDofs() const
{
  return 2 * velocity->NumDofs() + stokes_pressure->NumDofs() + flux->NumDofs() +
         darcy_pressure->NumDofs();
}

CoupledSpaces BuildSpaces(ElementPair pair, int n)
{
  std::vector<CoupledMesh> meshes = BuildHierarchy(n);
  const PairFamilies fam = FamiliesOf(pair);
  CoupledSpaces s;
  s.pair = pair;
  s.n = n;
  for (std::size_t l = 0; l < meshes.size(); l++)
  {
    if (l == 0)
    {
      s.stokes_levels.push_back(
        std::make_shared<const SubMesh>(ExtractSubdomain(meshes[0], Subdomain::Stokes)));
      s.darcy_levels.push_back(
        std::make_shared<const SubMesh>(ExtractSubdomain(meshes[0], Subdomain::Darcy)));
    }
    else
    {
      s.stokes_levels.push_back(std::make_shared<const SubMesh>(
        ExtractSubdomain(meshes[l], Subdomain::Stokes, *s.stokes_levels.back())));
      s.darcy_levels.push_back(std::make_shared<const SubMesh>(
        ExtractSubdomain(meshes[l], Subdomain::Darcy, *s.darcy_levels.back())));
    }
  }
  auto pressure_mesh = s.stokes_levels.back();
  if (fam.pressure_on_coarse_mesh)
  {
    if (s.stokes_levels.size() < 2)
    {
      throw InvalidArgument("BuildSpaces: this pair needs n divisible by 4");
    }
    pressure_mesh = s.stokes_levels[s.stokes_levels.size() - 2];
  }
  s.velocity = std::make_shared<const ScalarSpace>(s.stokes_levels.back(), fam.stokes_velocity);
  s.stokes_pressure = std::make_shared<const ScalarSpace>(pressure_mesh, fam.stokes_pressure);
  s.flux = std::make_shared<const FluxSpace>(s.darcy_levels.back(), fam.darcy_flux);
  s.darcy_pressure = std::make_shared<const ScalarSpace>(s.darcy_levels.back(), fam.darcy_pressure);
  return s;
}

std::vector<EdgeOwner> SigmaEdgeOwners(const SubMesh &mesh)
{
  std::vector<EdgeOwner> out;
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    for (int i = 0; i < 3; i++)
    {
      const int e = mesh.tri_edges[t][i];
      if (mesh.edges[e].tag == EdgeTag::Sigma)
      {
        out.push_back({e, t, i});
      }
    }
  }
  auto mid = [&](const EdgeOwner &o)
  {
    const auto &e = mesh.edges[o.edge];
    return mesh.vertices[e.v[0]].x + mesh.vertices[e.v[1]].x;
  };
  std::sort(out.begin(), out.end(),
            [&](const EdgeOwner &a, const EdgeOwner &b) { return mid(a) < mid(b); });
  return out;
}

namespace
{

SparseMatrix FromTriplets(int rows, int cols, const std::vector<Triplet> &trips)
{
  SparseMatrix m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

// The triangle of `pressure`'s mesh that contains velocity triangle t.
int PressureTriangle(const ScalarSpace &velocity, const ScalarSpace &pressure, int t)
{
  if (velocity.MeshPtr() == pressure.MeshPtr())
  {
    return t;
  }
  const auto &parents = velocity.Mesh().tri_parents;
  if (parents.empty())
  {
    throw InvalidArgument("AssembleStokes: velocity mesh is not a refinement of the pressure mesh");
  }
  return parents[t];
}

// scale_k (grad u, grad v) + scale_m (u, v)
SparseMatrix ScalarForm(const ScalarSpace &space, double scale_k, double scale_m)
{
  const SubMesh &m = space.Mesh();
  const int k = space.LocalSize();
  const TriangleRule &rule = TriangleQuadrature(2 * space.PolynomialDegree() + 2);
  std::vector<Triplet> trips;
  std::vector<double> val(k);
  std::vector<Point> grad(k);
  for (int t = 0; t < m.NumTriangles(); t++)
  {
    const TriangleGeometry geo(m.Corners(t));
    const auto dofs = space.CellDofs(t);
    DenseMatrix loc = DenseMatrix::Zero(k, k);
    for (int q = 0; q < rule.Size(); q++)
    {
      space.Eval(geo, rule.points[q], val, grad);
      const double w = rule.weights[q] * geo.area;
      for (int i = 0; i < k; i++)
      {
        for (int j = 0; j < k; j++)
        {
          loc(i, j) += w * (scale_m * val[i] * val[j] +
                            scale_k * (grad[i].x * grad[j].x + grad[i].y * grad[j].y));
        }
      }
    }
    for (int i = 0; i < k; i++)
    {
      for (int j = 0; j < k; j++)
      {
        trips.emplace_back(dofs[i], dofs[j], loc(i, j));
      }
    }
  }
  return FromTriplets(space.NumDofs(), space.NumDofs(), trips);
}

SparseMatrix ScalarMass(const ScalarSpace &space, double scale = 1.0)
{
  return ScalarForm(space, 0.0, scale);
}

}  // namespace

StokesForms AssembleStokes(const ScalarSpace &velocity, const ScalarSpace &pressure,
                           const PhysicalParams &params)
{
  params.Validate();
  const SubMesh &m = velocity.Mesh();
  const int nv = velocity.NumDofs(), np = pressure.NumDofs();
  const VectorLayout lay{nv};
  const int k = velocity.LocalSize(), kp = pressure.LocalSize();
  const double nu = params.nu;
  const TriangleRule &rule = TriangleQuadrature(2 * velocity.PolynomialDegree() + 2);

  std::vector<Triplet> ta, tb;
  std::vector<double> val(k), pval(kp);
  std::vector<Point> grad(k);
  for (int t = 0; t < m.NumTriangles(); t++)
  {
    const TriangleGeometry geo(m.Corners(t));
    const int tp = PressureTriangle(velocity, pressure, t);
    const TriangleGeometry pgeo(pressure.Mesh().Corners(tp));
    const auto dofs = velocity.CellDofs(t);
    const auto pdofs = pressure.CellDofs(tp);
    // Component blocks: axx, ayy and the x-test/y-trial coupling axy.
    DenseMatrix axx = DenseMatrix::Zero(k, k), ayy = axx, axy = axx;
    DenseMatrix bx = DenseMatrix::Zero(kp, k), by = bx;
    for (int q = 0; q < rule.Size(); q++)
    {
      velocity.Eval(geo, rule.points[q], val, grad);
      pressure.Eval(pgeo, pgeo.Barycentric(geo.Map(rule.points[q])), pval);
      const double w = rule.weights[q] * geo.area;
      for (int i = 0; i < k; i++)
      {
        const Point a = grad[i];
        for (int j = 0; j < k; j++)
        {
          const Point b = grad[j];
          axx(i, j) += w * nu * (2.0 * a.x * b.x + a.y * b.y);
          ayy(i, j) += w * nu * (2.0 * a.y * b.y + a.x * b.x);
          axy(i, j) += w * nu * a.y * b.x;
        }
        for (int r = 0; r < kp; r++)
        {
          bx(r, i) += w * pval[r] * a.x;
          by(r, i) += w * pval[r] * a.y;
        }
      }
    }
    for (int i = 0; i < k; i++)
    {
      for (int j = 0; j < k; j++)
      {
        ta.emplace_back(lay.Dof(0, dofs[i]), lay.Dof(0, dofs[j]), axx(i, j));
        ta.emplace_back(lay.Dof(1, dofs[i]), lay.Dof(1, dofs[j]), ayy(i, j));
        ta.emplace_back(lay.Dof(0, dofs[i]), lay.Dof(1, dofs[j]), axy(i, j));
        ta.emplace_back(lay.Dof(1, dofs[j]), lay.Dof(0, dofs[i]), axy(i, j));
      }
      for (int r = 0; r < kp; r++)
      {
        tb.emplace_back(pdofs[r], lay.Dof(0, dofs[i]), bx(r, i));
        tb.emplace_back(pdofs[r], lay.Dof(1, dofs[i]), by(r, i));
      }
    }
  }

  // Friction term: pi_t u = (u_1, 0) for n = (0, -1).
  const LineRule &line = GaussLegendre(4);
  for (const EdgeOwner &o : SigmaEdgeOwners(m))
  {
    const TriangleGeometry geo(m.Corners(o.triangle));
    const auto &e = m.edges[o.edge];
    const Point a = m.vertices[e.v[0]], b = m.vertices[e.v[1]];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const auto dofs = velocity.CellDofs(o.triangle);
    for (int q = 0; q < line.Size(); q++)
    {
      const Point x = a + line.points[q] * (b - a);
      velocity.Eval(geo, geo.Barycentric(x), val);
      const double w = params.kappa * line.weights[q] * len;
      for (int i = 0; i < k; i++)
      {
        for (int j = 0; j < k; j++)
        {
          ta.emplace_back(lay.Dof(0, dofs[i]), lay.Dof(0, dofs[j]), w * val[i] * val[j]);
        }
      }
    }
  }

  StokesForms f;
  f.A = FromTriplets(lay.Size(), lay.Size(), ta);
  f.B = FromTriplets(np, lay.Size(), tb);
  f.M = ScalarMass(pressure);
  for (int c = 0; c < 2; c++)
  {
    for (int i = 0; i < nv; i++)
    {
      if (velocity.Classes()[i] != DofClass::GammaS)
      {
        f.free.push_back(lay.Dof(c, i));
      }
    }
  }
  std::vector<int> all_p(np);
  for (int i = 0; i < np; i++)
  {
    all_p[i] = i;
  }
  f.A0 = Submatrix(f.A, f.free, f.free);
  f.B0 = Submatrix(f.B, all_p, f.free);
  return f;
}

DarcyForms AssembleDarcy(const FluxSpace &flux, const ScalarSpace &pressure,
                         const PhysicalParams &params)
{
  params.Validate();
  if (flux.MeshPtr() != pressure.MeshPtr())
  {
    throw InvalidArgument("AssembleDarcy: flux and pressure live on different meshes");
  }
  const SubMesh &m = flux.Mesh();
  const int k = flux.LocalSize(), kp = pressure.LocalSize();
  const int nf = flux.NumDofs(), np = pressure.NumDofs();
  const TriangleRule &rule = TriangleQuadrature(2 * flux.PolynomialDegree() + 2);
  std::vector<Triplet> ta, td, tb;
  std::array<Point, 8> val;
  std::array<double, 8> div;
  std::vector<double> pval(kp);
  for (int t = 0; t < m.NumTriangles(); t++)
  {
    const TriangleGeometry geo(m.Corners(t));
    const auto dofs = flux.CellDofs(t);
    const auto pdofs = pressure.CellDofs(t);
    DenseMatrix a = DenseMatrix::Zero(k, k), d = a, b = DenseMatrix::Zero(kp, k);
    for (int q = 0; q < rule.Size(); q++)
    {
      flux.EvalAt(t, geo.Map(rule.points[q]), std::span(val.data(), k), std::span(div.data(), k));
      pressure.Eval(geo, rule.points[q], pval);
      const double w = rule.weights[q] * geo.area;
      for (int i = 0; i < k; i++)
      {
        for (int j = 0; j < k; j++)
        {
          a(i, j) += w * params.tau * (val[i].x * val[j].x + val[i].y * val[j].y);
          d(i, j) += w * div[i] * div[j];
        }
        for (int r = 0; r < kp; r++)
        {
          b(r, i) += w * pval[r] * div[i];
        }
      }
    }
    for (int i = 0; i < k; i++)
    {
      for (int j = 0; j < k; j++)
      {
        ta.emplace_back(dofs[i], dofs[j], a(i, j));
        td.emplace_back(dofs[i], dofs[j], d(i, j));
      }
      for (int r = 0; r < kp; r++)
      {
        tb.emplace_back(pdofs[r], dofs[i], b(r, i));
      }
    }
  }
  DarcyForms f;
  f.A = FromTriplets(nf, nf, ta);
  f.D = FromTriplets(nf, nf, td);
  f.B = FromTriplets(np, nf, tb);
  f.M = ScalarMass(pressure);
  for (int i = 0; i < nf; i++)
  {
    if (flux.Classes()[i] == DofClass::Interior)
    {
      f.interior.push_back(i);
    }
  }
  f.sigma = flux.SigmaDofs();
  return f;
}

InterfaceForms AssembleInterface(const ScalarSpace &velocity, const FluxSpace &flux)
{
  const SubMesh &sm = velocity.Mesh();
  const SubMesh &dm = flux.Mesh();
  const VectorLayout lay{velocity.NumDofs()};
  const auto &dedges = flux.SigmaEdges();
  const int nphi = 2 * static_cast<int>(dedges.size());
  std::vector<double> xa(dedges.size()), xb(dedges.size()), dlen(dedges.size());
  for (std::size_t k = 0; k < dedges.size(); k++)
  {
    const auto &e = dm.edges[dedges[k]];
    xa[k] = dm.vertices[e.v[0]].x;
    xb[k] = dm.vertices[e.v[1]].x;
    dlen[k] = xb[k] - xa[k];
  }

  std::vector<Triplet> tr, tq, tn;
  const LineRule &line = GaussLegendre(4);
  std::vector<double> val(velocity.LocalSize());
  for (const EdgeOwner &o : SigmaEdgeOwners(sm))
  {
    const auto &e = sm.edges[o.edge];
    const Point a = sm.vertices[e.v[0]], b = sm.vertices[e.v[1]];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const double mid = 0.5 * (a.x + b.x);
    const auto it = std::upper_bound(xa.begin(), xa.end(), mid);
    const int k = static_cast<int>(it - xa.begin()) - 1;
    if (k < 0 || mid > xb[k])
    {
      throw InvalidArgument("AssembleInterface: interface partitions are not nested");
    }
    const TriangleGeometry geo(sm.Corners(o.triangle));
    const auto dofs = velocity.CellDofs(o.triangle);
    for (int q = 0; q < line.Size(); q++)
    {
      const Point x = a + line.points[q] * (b - a);
      velocity.Eval(geo, geo.Barycentric(x), val);
      const double s = (x.x - xa[k]) / dlen[k];
      const double w = line.weights[q] * len;
      for (int j = 0; j < velocity.LocalSize(); j++)
      {
        // phi . n = -phi_y for the second component; the first component has zero normal trace.
        tr.emplace_back(2 * k, lay.Dof(1, dofs[j]), -w * val[j]);
        tr.emplace_back(2 * k + 1, lay.Dof(1, dofs[j]), -w * val[j] * (2.0 * s - 1.0));
      }
    }
  }
  for (int k = 0; k < static_cast<int>(dedges.size()); k++)
  {
    tq.emplace_back(2 * k, 2 * k, 1.0 / dlen[k]);
    tq.emplace_back(2 * k + 1, 2 * k + 1, 3.0 / dlen[k]);
  }
  const auto &sd = flux.SigmaDofs();
  for (int k = 0; k < nphi; k++)
  {
    tn.emplace_back(k, sd[k], 1.0);
  }
  InterfaceForms f;
  f.R = FromTriplets(nphi, lay.Size(), tr);
  f.R.prune(0.0);
  f.Q = FromTriplets(nphi, nphi, tq);
  f.T = f.Q * f.R;
  f.N = FromTriplets(nphi, flux.NumDofs(), tn);
  return f;
}

double DarcySourceIntegral(const ManufacturedCase &mcase)
{
  // 32 x 16 cells with 12 x 12 Gauss points on (0,1) x (0,1/2).
  constexpr int nx = 32, ny = 16;
  const LineRule &g = GaussLegendre(12);
  const double hx = 1.0 / nx, hy = 0.5 / ny;
  double sum = 0.0;
  for (int i = 0; i < nx; i++)
  {
    for (int j = 0; j < ny; j++)
    {
      for (int a = 0; a < g.Size(); a++)
      {
        for (int b = 0; b < g.Size(); b++)
        {
          const Point x{(i + g.points[a]) * hx, (j + g.points[b]) * hy};
          sum += g.weights[a] * g.weights[b] * hx * hy * mcase.DarcySource(x);
        }
      }
    }
  }
  return sum;
}

namespace
{

constexpr int kLoadDegree = 10;
constexpr int kLoadEdgePoints = 8;

}  // namespace

Loads AssembleLoads(const CoupledSpaces &spaces, const ManufacturedCase &mcase,
                    double compat_tol)
{
  Loads out;
  out.source_integral = DarcySourceIntegral(mcase);
  if (std::abs(out.source_integral) > compat_tol)
  {
    std::ostringstream msg;
    msg << "Darcy source violates the compatibility condition: int f_D = "
        << out.source_integral;
    throw InvalidCase(msg.str());
  }

  const ScalarSpace &vel = *spaces.velocity;
  const VectorLayout lay = spaces.VelocityLayout();
  const SubMesh &sm = vel.Mesh();
  const int k = vel.LocalSize();
  out.stokes = Vector::Zero(lay.Size());
  const TriangleRule &rule = TriangleQuadrature(kLoadDegree);
  std::vector<double> val(std::max(k, 3));
  for (int t = 0; t < sm.NumTriangles(); t++)
  {
    const TriangleGeometry geo(sm.Corners(t));
    const auto dofs = vel.CellDofs(t);
    for (int q = 0; q < rule.Size(); q++)
    {
      vel.Eval(geo, rule.points[q], val);
      const Point f = mcase.StokesForce(geo.Map(rule.points[q]));
      const double w = rule.weights[q] * geo.area;
      for (int i = 0; i < k; i++)
      {
        out.stokes[lay.Dof(0, dofs[i])] += w * f.x * val[i];
        out.stokes[lay.Dof(1, dofs[i])] += w * f.y * val[i];
      }
    }
  }
  out.stokes_body = out.stokes;
  const LineRule &line = GaussLegendre(kLoadEdgePoints);
  double gnorm2 = 0.0;
  for (const EdgeOwner &o : SigmaEdgeOwners(sm))
  {
    const TriangleGeometry geo(sm.Corners(o.triangle));
    const auto &e = sm.edges[o.edge];
    const Point a = sm.vertices[e.v[0]], b = sm.vertices[e.v[1]];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const auto dofs = vel.CellDofs(o.triangle);
    for (int q = 0; q < line.Size(); q++)
    {
      const Point x = a + line.points[q] * (b - a);
      vel.Eval(geo, geo.Barycentric(x), val);
      const Point g = mcase.InterfaceResidual(x);
      const double w = line.weights[q] * len;
      gnorm2 += w * (g.x * g.x + g.y * g.y);
      for (int i = 0; i < k; i++)
      {
        out.stokes[lay.Dof(0, dofs[i])] += w * g.x * val[i];
        out.stokes[lay.Dof(1, dofs[i])] += w * g.y * val[i];
      }
    }
  }
  out.interface_residual = std::sqrt(gnorm2);

  const ScalarSpace &dp = *spaces.darcy_pressure;
  const SubMesh &dm = dp.Mesh();
  out.darcy = Vector::Zero(dp.NumDofs());
  for (int t = 0; t < dm.NumTriangles(); t++)
  {
    const TriangleGeometry geo(dm.Corners(t));
    const auto dofs = dp.CellDofs(t);
    for (int q = 0; q < rule.Size(); q++)
    {
      dp.Eval(geo, rule.points[q], val);
      const double f = mcase.DarcySource(geo.Map(rule.points[q]));
      const double w = rule.weights[q] * geo.area;
      for (int i = 0; i < dp.LocalSize(); i++)
      {
        out.darcy[dofs[i]] += w * f * val[i];
      }
    }
  }
  return out;
}

SparseMatrix VectorH1Matrix(const ScalarSpace &space)
{
  const SparseMatrix s = ScalarForm(space, 1.0, 1.0);
  const int n = space.NumDofs();
  std::vector<Triplet> trips;
  for (int k = 0; k < s.outerSize(); k++)
  {
    for (SparseMatrix::InnerIterator it(s, k); it; ++it)
    {
      trips.emplace_back(it.row(), it.col(), it.value());
      trips.emplace_back(n + it.row(), n + it.col(), it.value());
    }
  }
  return FromTriplets(2 * n, 2 * n, trips);
}

void WriteMatrix(std::ostream &os, const SparseMatrix &a)
{
  for (int k = 0; k < a.outerSize(); k++)
  {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
    {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace sdarcy
