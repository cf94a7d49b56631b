#include "sdarcy/precond.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <Eigen/SparseCholesky>
#include "sdarcy/errors.hpp"
#include "sdarcy/quadrature.hpp"

namespace sdarcy
{

LinearOperator DirectInverse(const SparseMatrix &spd)
{
  auto llt = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>(spd);
  if (llt->info() != Eigen::Success)
  {
    throw InvalidArgument("DirectInverse: matrix is not symmetric positive definite");
  }
  return LinearOperator(static_cast<int>(spd.rows()),
                        [llt](const Vector &x, Vector &y) { y = llt->solve(x); });
}

LinearOperator JacobiInverse(const SparseMatrix &a)
{
  const Vector inv = a.diagonal().cwiseInverse();
  return LinearOperator(static_cast<int>(a.rows()),
                        [inv](const Vector &x, Vector &y) { y = inv.cwiseProduct(x); });
}

LinearOperator SymmetricGaussSeidel(const SparseMatrix &a)
{
  auto m = std::make_shared<const SparseMatrix>(a);
  return LinearOperator(static_cast<int>(a.rows()),
                        [m](const Vector &x, Vector &y)
                        {
                          Vector t = m->triangularView<Eigen::Lower>().solve(x);
                          t = m->diagonal().cwiseProduct(t);
                          y = m->triangularView<Eigen::Upper>().solve(t);
                        });
}

bool IsDiagonal(const SparseMatrix &a)
{
  for (int k = 0; k < a.outerSize(); k++)
  {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
    {
      if (it.row() != it.col() && it.value() != 0.0)
      {
        return false;
      }
    }
  }
  return true;
}

LinearOperator MassInverse(const SparseMatrix &m, MassMode mode)
{
  if (IsDiagonal(m))
  {
    return JacobiInverse(m);
  }
  if (mode == MassMode::Exact)
  {
    return DirectInverse(m);
  }
  return SymmetricGaussSeidel(m);
}

LinearOperator BlockDiagonal(const LinearOperator &first, const LinearOperator &second)
{
  const int n1 = first.Size(), n2 = second.Size();
  return LinearOperator(n1 + n2,
                        [first, second, n1, n2](const Vector &x, Vector &y)
                        {
                          y.resize(n1 + n2);
                          Vector a = first * Vector(x.head(n1));
                          Vector b = second * Vector(x.tail(n2));
                          y.head(n1) = a;
                          y.tail(n2) = b;
                        });
}

namespace
{

struct BpxData
{
  std::vector<SparseMatrix> prolong;  // prolong[l]: level l -> l + 1
  std::vector<Vector> dinv;           // per level, unused on the coarsest
  int coarsest = 0;
  std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> coarse;

  Vector Apply(int level, const Vector &r) const
  {
    if (level == coarsest)
    {
      return coarse->solve(r);
    }
    const SparseMatrix &t = prolong[level - 1];
    Vector z = dinv[level].cwiseProduct(r);
    z += t * Apply(level - 1, t.transpose() * r);
    return z;
  }
};

}  // namespace

LinearOperator BpxInverse(const SparseMatrix &fine, const std::vector<SparseMatrix> &prolongations)
{
  const int nlev = static_cast<int>(prolongations.size()) + 1;
  for (int l = 0; l + 1 < nlev; l++)
  {
    const SparseMatrix &t = prolongations[l];
    const Eigen::Index rows_expected = (l + 2 == nlev) ? fine.rows() : prolongations[l + 1].cols();
    if (t.rows() != rows_expected)
    {
      throw InvalidArgument("BpxInverse: prolongations do not form a nested hierarchy");
    }
  }
  auto data = std::make_shared<BpxData>();
  data->prolong = prolongations;
  data->dinv.resize(nlev);
  std::vector<SparseMatrix> levels(nlev);
  levels[nlev - 1] = fine;
  int coarsest = 0;
  for (int l = nlev - 1; l >= 1; l--)
  {
    const SparseMatrix &t = prolongations[l - 1];
    levels[l - 1] = SparseMatrix(t.transpose() * levels[l] * t);
    if (levels[l - 1].rows() == 0)
    {
      coarsest = l;
      break;
    }
  }
  data->coarsest = coarsest;
  for (int l = coarsest + 1; l < nlev; l++)
  {
    data->dinv[l] = levels[l].diagonal().cwiseInverse();
  }
  data->coarse = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>(levels[coarsest]);
  if (data->coarse->info() != Eigen::Success)
  {
    throw InvalidArgument("BpxInverse: coarse matrix is not symmetric positive definite");
  }
  return LinearOperator(static_cast<int>(fine.rows()),
                        [data, nlev](const Vector &x, Vector &y) { y = data->Apply(nlev - 1, x); });
}

SparseMatrix P1Prolongation(const SubMesh &fine, const SubMesh &coarse)
{
  if (fine.vertex_parents.size() != static_cast<std::size_t>(fine.NumVertices()))
  {
    throw InvalidArgument("P1Prolongation: mesh has no parent links");
  }
  std::vector<Triplet> trips;
  for (int v = 0; v < fine.NumVertices(); v++)
  {
    const auto [a, b] = fine.vertex_parents[v];
    if (a < 0 || b < 0 || a >= coarse.NumVertices() || b >= coarse.NumVertices())
    {
      throw InvalidArgument("P1Prolongation: meshes are not nested");
    }
    trips.emplace_back(v, a, 0.5);
    trips.emplace_back(v, b, 0.5);
  }
  SparseMatrix t(fine.NumVertices(), coarse.NumVertices());
  t.setFromTriplets(trips.begin(), trips.end());
  return t;
}

SparseMatrix P1Embedding(const ScalarSpace &target)
{
  const SubMesh &m = target.Mesh();
  const int nv = m.NumVertices();
  std::vector<Triplet> trips;
  for (int v = 0; v < nv; v++)
  {
    trips.emplace_back(v, v, 1.0);
  }
  switch (target.Family())
  {
    case ElementFamily::P1c:
    case ElementFamily::P1Bubble:
      break;
    case ElementFamily::P2c:
      for (int e = 0; e < m.NumEdges(); e++)
      {
        trips.emplace_back(nv + e, m.edges[e].v[0], 0.5);
        trips.emplace_back(nv + e, m.edges[e].v[1], 0.5);
      }
      break;
    default:
      throw InvalidArgument("P1Embedding: target is not a continuous nodal space");
  }
  SparseMatrix t(target.NumDofs(), nv);
  t.setFromTriplets(trips.begin(), trips.end());
  return t;
}

SparseMatrix Replicate(const SparseMatrix &t, int components)
{
  std::vector<Triplet> trips;
  for (int c = 0; c < components; c++)
  {
    for (int k = 0; k < t.outerSize(); k++)
    {
      for (SparseMatrix::InnerIterator it(t, k); it; ++it)
      {
        trips.emplace_back(c * t.rows() + it.row(), c * t.cols() + it.col(), it.value());
      }
    }
  }
  SparseMatrix out(components * t.rows(), components * t.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

bool KeepNotGammaS(DofClass c) { return c != DofClass::GammaS; }
bool KeepInterior(DofClass c) { return c == DofClass::Interior; }

namespace
{

std::vector<int> Kept(const std::vector<DofClass> &classes, bool (*keep)(DofClass))
{
  std::vector<int> out;
  for (std::size_t i = 0; i < classes.size(); i++)
  {
    if (keep(classes[i]))
    {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

}  // namespace

std::vector<SparseMatrix> NodalProlongations(
  const std::vector<std::shared_ptr<const SubMesh>> &levels, const ScalarSpace &fine_space,
  bool (*keep)(DofClass), int components)
{
  if (levels.empty() || levels.back() != fine_space.MeshPtr())
  {
    throw InvalidArgument("NodalProlongations: the fine space must live on the finest level");
  }
  std::vector<std::vector<int>> kept;
  for (const auto &mesh : levels)
  {
    kept.push_back(Kept(ScalarSpace(mesh, ElementFamily::P1c).Classes(), keep));
  }
  std::vector<SparseMatrix> out;
  for (std::size_t l = 1; l < levels.size(); l++)
  {
    const SparseMatrix t = P1Prolongation(*levels[l], *levels[l - 1]);
    out.push_back(Replicate(Submatrix(t, kept[l], kept[l - 1]), components));
  }
  if (fine_space.Family() != ElementFamily::P1c)
  {
    const SparseMatrix e = P1Embedding(fine_space);
    out.push_back(Replicate(Submatrix(e, Kept(fine_space.Classes(), keep), kept.back()), components));
  }
  return out;
}

namespace
{

// Entry collector that keeps the first value written to each position; used where a global
// dof is reached from several cells that all compute the same value.
class SetOnce
{
public:
  void Set(int i, int j, double v) { entries_.try_emplace({i, j}, v); }
  SparseMatrix Build(int rows, int cols) const
  {
    std::vector<Triplet> trips;
    trips.reserve(entries_.size());
    for (const auto &[ij, v] : entries_)
    {
      if (v != 0.0)
      {
        trips.emplace_back(ij.first, ij.second, v);
      }
    }
    SparseMatrix m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
  }

private:
  std::map<std::pair<int, int>, double> entries_;
};

}  // namespace

HxTransfer BuildHxTransfer(const FluxSpace &flux, const std::vector<int> &interior,
                           const SparseMatrix &adplusd, double tau)
{
  HxTransfer t;
  t.tau = tau;
  const ElementFamily nodal_family =
    flux.Family() == ElementFamily::BDM1 ? ElementFamily::P1c : ElementFamily::P2c;
  t.nodal = std::make_shared<const ScalarSpace>(flux.MeshPtr(), nodal_family);
  const ScalarSpace &v = *t.nodal;
  const SubMesh &m = flux.Mesh();
  const int nl = v.NumDofs(), nf = flux.NumDofs();
  const int k = v.LocalSize(), kf = flux.LocalSize();

  SetOnce curl, interp;
  std::vector<double> val(k), mom(kf);
  std::vector<Point> grad(k);
  std::array<Point, 8> fval;
  std::vector<Triplet> tk, tm;
  const TriangleRule &rule = TriangleQuadrature(2 * v.PolynomialDegree() + 2);
  for (int tr = 0; tr < m.NumTriangles(); tr++)
  {
    const TriangleGeometry geo(m.Corners(tr));
    const auto dofs = v.CellDofs(tr);
    const auto fdofs = flux.CellDofs(tr);
    for (int i = 0; i < k; i++)
    {
      auto curl_i = [&](Point x)
      {
        v.Eval(geo, geo.Barycentric(x), val, grad);
        return Point{grad[i].y, -grad[i].x};
      };
      flux.LocalMoments(tr, curl_i, mom);
      for (int j = 0; j < kf; j++)
      {
        curl.Set(fdofs[j], dofs[i], mom[j]);
      }
      // The expansion must reproduce the curl exactly.
      for (const auto &bary : {std::array<double, 3>{0.6, 0.3, 0.1}, {0.1, 0.2, 0.7},
                               std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3}})
      {
        const Point x = geo.Map(bary);
        flux.EvalAt(tr, x, std::span(fval.data(), kf));
        Point s{0.0, 0.0};
        for (int j = 0; j < kf; j++)
        {
          s = s + mom[j] * fval[j];
        }
        const Point c = curl_i(x);
        t.curl_residual = std::max(t.curl_residual, std::hypot(s.x - c.x, s.y - c.y));
      }
      for (int c = 0; c < 2; c++)
      {
        flux.LocalMoments(tr,
                          [&](Point x)
                          {
                            v.Eval(geo, geo.Barycentric(x), val);
                            return c == 0 ? Point{val[i], 0.0} : Point{0.0, val[i]};
                          },
                          mom);
        for (int j = 0; j < kf; j++)
        {
          interp.Set(fdofs[j], c * nl + dofs[i], mom[j]);
        }
      }
    }
    // Nodal stiffness and mass.
    DenseMatrix kl = DenseMatrix::Zero(k, k), ml = kl;
    for (int q = 0; q < rule.Size(); q++)
    {
      v.Eval(geo, rule.points[q], val, grad);
      const double w = rule.weights[q] * geo.area;
      for (int i = 0; i < k; i++)
      {
        for (int j = 0; j < k; j++)
        {
          kl(i, j) += w * (grad[i].x * grad[j].x + grad[i].y * grad[j].y);
          ml(i, j) += w * val[i] * val[j];
        }
      }
    }
    for (int i = 0; i < k; i++)
    {
      for (int j = 0; j < k; j++)
      {
        tk.emplace_back(dofs[i], dofs[j], kl(i, j));
        tm.emplace_back(dofs[i], dofs[j], ml(i, j));
      }
    }
  }
  if (t.curl_residual > 1e-10)
  {
    throw InvalidArgument("BuildHxTransfer: curl of the nodal space is not in the flux space");
  }

  t.nodal_free = Kept(v.Classes(), KeepInterior);
  std::vector<int> vec_free = t.nodal_free;
  for (int i : t.nodal_free)
  {
    vec_free.push_back(nl + i);
  }
  t.C = Submatrix(curl.Build(nf, nl), interior, t.nodal_free);
  t.Idiv = Submatrix(interp.Build(nf, 2 * nl), interior, vec_free);
  t.Sdiv = Submatrix(adplusd, interior, interior).diagonal();

  SparseMatrix stiff(nl, nl), mass(nl, nl);
  stiff.setFromTriplets(tk.begin(), tk.end());
  mass.setFromTriplets(tm.begin(), tm.end());
  t.Laplace = Submatrix(stiff, t.nodal_free, t.nodal_free);
  const SparseMatrix lscalar = Submatrix(SparseMatrix(stiff + tau * mass), t.nodal_free, t.nodal_free);
  t.L = Replicate(lscalar, 2);
  return t;
}

LinearOperator HxInverse(const HxTransfer &t, LaplaceSolver mode,
                         const std::vector<std::shared_ptr<const SubMesh>> &darcy_levels,
                         std::shared_ptr<HxCounters> counters)
{
  LinearOperator linv, dinv;
  if (mode == LaplaceSolver::Direct)
  {
    linv = DirectInverse(t.L);
    dinv = DirectInverse(t.Laplace);
  }
  else
  {
    linv = BpxInverse(t.L, NodalProlongations(darcy_levels, *t.nodal, KeepInterior, 2));
    dinv = BpxInverse(t.Laplace, NodalProlongations(darcy_levels, *t.nodal, KeepInterior, 1));
  }
  const Vector sinv = t.Sdiv.cwiseInverse();
  auto c = std::make_shared<const SparseMatrix>(t.C);
  auto idiv = std::make_shared<const SparseMatrix>(t.Idiv);
  const double tauinv = 1.0 / t.tau;
  return LinearOperator(static_cast<int>(t.Sdiv.size()),
                        [=](const Vector &x, Vector &y)
                        {
                          y = sinv.cwiseProduct(x);
                          y += *idiv * (linv * Vector(idiv->transpose() * x));
                          y += tauinv * (*c * (dinv * Vector(c->transpose() * x)));
                          if (counters)
                          {
                            counters->applications++;
                            counters->laplace_solves += 2;
                          }
                        });
}

std::string to_string(const PrecondCombo &c)
{
  std::string s = c.outer == OuterBlock::Direct ? "direct" : "bpx";
  switch (c.inner)
  {
    case InnerBlock::Direct:
      s += ":direct";
      break;
    case InnerBlock::HxDirect:
      s += ":hx-direct";
      break;
    case InnerBlock::HxBpx:
      s += ":hx-bpx";
      break;
  }
  if (c.mass == MassMode::Exact)
  {
    s += ":exact";
  }
  else if (c.mass == MassMode::GaussSeidel)
  {
    s += ":gs";
  }
  return s;
}

PrecondCombo ParseCombo(const std::string &text)
{
  std::vector<std::string> parts(1);
  for (char ch : text)
  {
    if (ch == ':' || ch == '(' || ch == ')')
    {
      if (!parts.back().empty())
      {
        parts.emplace_back();
      }
    }
    else if (!std::isspace(static_cast<unsigned char>(ch)))
    {
      parts.back().push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (parts.back().empty())
  {
    parts.pop_back();
  }
  if (parts.size() < 2 || parts.size() > 3)
  {
    throw InvalidArgument("combo must read outer:inner[:mass], got '" + text + "'");
  }
  PrecondCombo c;
  if (parts[0] == "direct" || parts[0] == "ps")
  {
    c.outer = OuterBlock::Direct;
  }
  else if (parts[0] == "bpx" || parts[0] == "psbpx")
  {
    c.outer = OuterBlock::Bpx;
  }
  else
  {
    throw InvalidArgument("unknown outer preconditioner '" + parts[0] + "'");
  }
  if (parts[1] == "direct" || parts[1] == "p0" || parts[1] == "pd0")
  {
    c.inner = InnerBlock::Direct;
  }
  else if (parts[1] == "hx-direct" || parts[1] == "hx" || parts[1] == "pd")
  {
    c.inner = InnerBlock::HxDirect;
  }
  else if (parts[1] == "hx-bpx" || parts[1] == "bpx" || parts[1] == "pdbpx")
  {
    c.inner = InnerBlock::HxBpx;
  }
  else
  {
    throw InvalidArgument("unknown inner preconditioner '" + parts[1] + "'");
  }
  if (parts.size() == 3)
  {
    if (parts[2] == "auto")
    {
      c.mass = MassMode::Auto;
    }
    else if (parts[2] == "exact")
    {
      c.mass = MassMode::Exact;
    }
    else if (parts[2] == "gs")
    {
      c.mass = MassMode::GaussSeidel;
    }
    else
    {
      throw InvalidArgument("unknown mass treatment '" + parts[2] + "'");
    }
  }
  return c;
}

}  // namespace sdarcy
