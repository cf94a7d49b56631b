#include "sdarcy/fespace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>
#include "sdarcy/errors.hpp"
#include "sdarcy/quadrature.hpp"

namespace sdarcy
{

const char *to_string(ElementFamily f)
{
  switch (f)
  {
    case ElementFamily::P0dc:
      return "P0dc";
    case ElementFamily::P1dc:
      return "P1dc";
    case ElementFamily::P1c:
      return "P1c";
    case ElementFamily::P2c:
      return "P2c";
    case ElementFamily::P1Bubble:
      return "P1+bubble";
    case ElementFamily::BDM1:
      return "BDM1";
    case ElementFamily::RT1:
      return "RT1";
  }
  return "?";
}

bool IsFluxFamily(ElementFamily f)
{
  return f == ElementFamily::BDM1 || f == ElementFamily::RT1;
}

ElementFamily PairedPressure(ElementFamily flux)
{
  switch (flux)
  {
    case ElementFamily::BDM1:
      return ElementFamily::P0dc;
    case ElementFamily::RT1:
      return ElementFamily::P1dc;
    default:
      throw InvalidArgument(std::string("PairedPressure: not a flux family: ") + to_string(flux));
  }
}

TriangleGeometry::TriangleGeometry(const std::array<Point, 3> &corners) : p(corners)
{
  const double det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
  area = 0.5 * det;
  for (int i = 0; i < 3; i++)
  {
    const Point a = p[(i + 1) % 3], b = p[(i + 2) % 3];
    grad_lambda[i] = {(a.y - b.y) / det, (b.x - a.x) / det};
  }
}

Point TriangleGeometry::Map(const std::array<double, 3> &bary) const
{
  return {bary[0] * p[0].x + bary[1] * p[1].x + bary[2] * p[2].x,
          bary[0] * p[0].y + bary[1] * p[1].y + bary[2] * p[2].y};
}

std::array<double, 3> TriangleGeometry::Barycentric(Point x) const
{
  std::array<double, 3> l;
  for (int i = 0; i < 3; i++)
  {
    const Point d = x - p[(i + 1) % 3];
    l[i] = grad_lambda[i].x * d.x + grad_lambda[i].y * d.y;
  }
  return l;
}

//
// ScalarSpace
//

ScalarSpace::ScalarSpace(std::shared_ptr<const SubMesh> mesh, ElementFamily family)
  : mesh_(std::move(mesh)), family_(family)
{
  const SubMesh &m = *mesh_;
  const int nv = m.NumVertices(), ne = m.NumEdges(), nt = m.NumTriangles();
  const DofClass outer = m.domain == Subdomain::Stokes ? DofClass::GammaS : DofClass::GammaD;
  auto edge_class = [&](EdgeTag tag)
  {
    if (IsBoundaryTag(tag))
    {
      return outer;
    }
    return tag == EdgeTag::Sigma ? DofClass::Sigma : DofClass::Interior;
  };
  auto vertex_classes = [&]()
  {
    std::vector<DofClass> cls(nv, DofClass::Interior);
    const auto outer_mark = m.OuterBoundaryVertices();
    const auto all_mark = m.BoundaryVertices();
    for (int v = 0; v < nv; v++)
    {
      cls[v] = outer_mark[v] ? outer : (all_mark[v] ? DofClass::Sigma : DofClass::Interior);
    }
    return cls;
  };

  switch (family_)
  {
    case ElementFamily::P0dc:
      local_size_ = 1;
      ndofs_ = nt;
      cell_dofs_.resize(nt);
      std::iota(cell_dofs_.begin(), cell_dofs_.end(), 0);
      classes_.assign(nt, DofClass::Interior);
      for (int t = 0; t < nt; t++)
      {
        dof_points_.push_back(TriangleGeometry(m.Corners(t)).Centroid());
      }
      break;
    case ElementFamily::P1dc:
      local_size_ = 3;
      ndofs_ = 3 * nt;
      cell_dofs_.resize(3 * nt);
      std::iota(cell_dofs_.begin(), cell_dofs_.end(), 0);
      classes_.assign(3 * nt, DofClass::Interior);
      for (int t = 0; t < nt; t++)
      {
        for (int i = 0; i < 3; i++)
        {
          dof_points_.push_back(m.vertices[m.triangles[t][i]]);
        }
      }
      break;
    case ElementFamily::P1c:
    case ElementFamily::P2c:
    case ElementFamily::P1Bubble:
    {
      if (family_ == ElementFamily::P1Bubble && m.domain != Subdomain::Stokes)
      {
        throw InvalidArgument("ScalarSpace: the MINI velocity lives on the Stokes region");
      }
      const bool p2 = family_ == ElementFamily::P2c;
      const bool bubble = family_ == ElementFamily::P1Bubble;
      local_size_ = p2 ? 6 : (bubble ? 4 : 3);
      ndofs_ = nv + (p2 ? ne : 0) + (bubble ? nt : 0);
      classes_ = vertex_classes();
      dof_points_ = m.vertices;
      if (p2)
      {
        for (const auto &e : m.edges)
        {
          classes_.push_back(edge_class(e.tag));
          dof_points_.push_back(0.5 * (m.vertices[e.v[0]] + m.vertices[e.v[1]]));
        }
      }
      if (bubble)
      {
        for (int t = 0; t < nt; t++)
        {
          classes_.push_back(DofClass::Interior);
          dof_points_.push_back(TriangleGeometry(m.Corners(t)).Centroid());
        }
      }
      cell_dofs_.reserve(static_cast<std::size_t>(nt) * local_size_);
      for (int t = 0; t < nt; t++)
      {
        for (int i = 0; i < 3; i++)
        {
          cell_dofs_.push_back(m.triangles[t][i]);
        }
        if (p2)
        {
          for (int i = 0; i < 3; i++)
          {
            cell_dofs_.push_back(nv + m.tri_edges[t][i]);
          }
        }
        if (bubble)
        {
          cell_dofs_.push_back(nv + t);
        }
      }
      break;
    }
    default:
      throw InvalidArgument(std::string("ScalarSpace: not a scalar family: ") +
                            to_string(family_));
  }
}

int ScalarSpace::PolynomialDegree() const
{
  switch (family_)
  {
    case ElementFamily::P0dc:
      return 0;
    case ElementFamily::P2c:
      return 2;
    case ElementFamily::P1Bubble:
      return 3;
    default:
      return 1;
  }
}

void ScalarSpace::Eval(const TriangleGeometry &geo, const std::array<double, 3> &l,
                       std::span<double> values, std::span<Point> grads) const
{
  const bool want_grad = !grads.empty();
  const auto &g = geo.grad_lambda;
  switch (family_)
  {
    case ElementFamily::P0dc:
      values[0] = 1.0;
      if (want_grad)
      {
        grads[0] = {0.0, 0.0};
      }
      return;
    case ElementFamily::P1dc:
    case ElementFamily::P1c:
      for (int i = 0; i < 3; i++)
      {
        values[i] = l[i];
        if (want_grad)
        {
          grads[i] = g[i];
        }
      }
      return;
    case ElementFamily::P2c:
      for (int i = 0; i < 3; i++)
      {
        values[i] = l[i] * (2.0 * l[i] - 1.0);
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        values[3 + i] = 4.0 * l[j] * l[k];
        if (want_grad)
        {
          grads[i] = (4.0 * l[i] - 1.0) * g[i];
          grads[3 + i] = 4.0 * (l[k] * g[j] + l[j] * g[k]);
        }
      }
      return;
    case ElementFamily::P1Bubble:
      for (int i = 0; i < 3; i++)
      {
        values[i] = l[i];
        if (want_grad)
        {
          grads[i] = g[i];
        }
      }
      values[3] = 27.0 * l[0] * l[1] * l[2];
      if (want_grad)
      {
        grads[3] = 27.0 * (l[1] * l[2] * g[0] + l[0] * l[2] * g[1] + l[0] * l[1] * g[2]);
      }
      return;
    default:
      return;
  }
}

Vector ScalarSpace::Interpolate(const std::function<double(Point)> &f) const
{
  Vector out(ndofs_);
  for (int i = 0; i < ndofs_; i++)
  {
    out[i] = f(dof_points_[i]);
  }
  if (family_ == ElementFamily::P1Bubble)
  {
    const int nv = mesh_->NumVertices();
    for (int t = 0; t < mesh_->NumTriangles(); t++)
    {
      const auto &tri = mesh_->triangles[t];
      out[nv + t] -= (out[tri[0]] + out[tri[1]] + out[tri[2]]) / 3.0;
    }
  }
  return out;
}

//
// FluxSpace
//

namespace
{

constexpr int kEdgeMomentPoints = 6;
constexpr int kCellMomentDegree = 10;

}  // namespace

FluxSpace::FluxSpace(std::shared_ptr<const SubMesh> mesh, ElementFamily family)
  : mesh_(std::move(mesh)), family_(family)
{
  if (!IsFluxFamily(family_))
  {
    throw InvalidArgument(std::string("FluxSpace: not a flux family: ") + to_string(family_));
  }
  const SubMesh &m = *mesh_;
  if (m.domain != Subdomain::Darcy)
  {
    throw InvalidArgument("FluxSpace: flux spaces live on the Darcy region");
  }
  const int ne = m.NumEdges(), nt = m.NumTriangles();
  const bool rt = family_ == ElementFamily::RT1;
  local_size_ = rt ? 8 : 6;
  ndofs_ = 2 * ne + (rt ? 2 * nt : 0);

  classes_.assign(ndofs_, DofClass::Interior);
  for (int e = 0; e < ne; e++)
  {
    DofClass c = DofClass::Interior;
    if (IsBoundaryTag(m.edges[e].tag))
    {
      c = DofClass::GammaD;
    }
    else if (m.edges[e].tag == EdgeTag::Sigma)
    {
      c = DofClass::Sigma;
      sigma_edges_.push_back(e);
    }
    classes_[2 * e] = classes_[2 * e + 1] = c;
  }
  std::sort(sigma_edges_.begin(), sigma_edges_.end(), [&](int a, int b)
            {
              const auto &ea = m.edges[a], &eb = m.edges[b];
              return m.vertices[ea.v[0]].x + m.vertices[ea.v[1]].x <
                     m.vertices[eb.v[0]].x + m.vertices[eb.v[1]].x;
            });
  for (int e : sigma_edges_)
  {
    sigma_dofs_.push_back(2 * e);
    sigma_dofs_.push_back(2 * e + 1);
  }

  cell_dofs_.reserve(static_cast<std::size_t>(nt) * local_size_);
  edge_signs_.resize(3 * nt);
  centers_.resize(nt);
  scales_.resize(nt);
  coeffs_.resize(nt);
  for (int t = 0; t < nt; t++)
  {
    const auto &tri = m.triangles[t];
    for (int i = 0; i < 3; i++)
    {
      const int e = m.tri_edges[t][i];
      cell_dofs_.push_back(2 * e);
      cell_dofs_.push_back(2 * e + 1);
      edge_signs_[3 * t + i] = (m.edges[e].v[0] == tri[(i + 1) % 3]) ? 1 : -1;
    }
    if (rt)
    {
      cell_dofs_.push_back(2 * ne + 2 * t);
      cell_dofs_.push_back(2 * ne + 2 * t + 1);
    }
    const TriangleGeometry geo(m.Corners(t));
    centers_[t] = geo.Centroid();
    scales_[t] = std::sqrt(2.0 * geo.area);
    coeffs_[t].setIdentity();

    // Moment matrix of the monomials: vdm(k, j) = l_k(raw_j).
    Eigen::MatrixXd vdm(local_size_, local_size_);
    std::vector<Point> raw(local_size_);
    for (int j = 0; j < local_size_; j++)
    {
      std::vector<double> col(local_size_);
      LocalMoments(t,
                   [&](Point x)
                   {
                     RawEval(t, x, raw, {});
                     return raw[j];
                   },
                   col);
      for (int k = 0; k < local_size_; k++)
      {
        vdm(k, j) = col[k];
      }
    }
    const Eigen::MatrixXd c = vdm.transpose().inverse();
    coeffs_[t].topLeftCorner(local_size_, local_size_) = c;
  }
}

Point FluxSpace::EdgeNormal(int e) const
{
  const auto &edge = mesh_->edges[e];
  const Point a = mesh_->vertices[edge.v[0]], b = mesh_->vertices[edge.v[1]];
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  return {(b.y - a.y) / len, -(b.x - a.x) / len};
}

void FluxSpace::RawEval(int t, Point x, std::span<Point> values, std::span<double> divs) const
{
  const double s = scales_[t];
  const double u = (x.x - centers_[t].x) / s, v = (x.y - centers_[t].y) / s;
  values[0] = {1.0, 0.0};
  values[1] = {u, 0.0};
  values[2] = {v, 0.0};
  values[3] = {0.0, 1.0};
  values[4] = {0.0, u};
  values[5] = {0.0, v};
  if (local_size_ == 8)
  {
    values[6] = {u * u, u * v};
    values[7] = {u * v, v * v};
  }
  if (!divs.empty())
  {
    divs[0] = 0.0;
    divs[1] = 1.0 / s;
    divs[2] = 0.0;
    divs[3] = 0.0;
    divs[4] = 0.0;
    divs[5] = 1.0 / s;
    if (local_size_ == 8)
    {
      divs[6] = 3.0 * u / s;
      divs[7] = 3.0 * v / s;
    }
  }
}

void FluxSpace::EvalAt(int t, Point x, std::span<Point> values, std::span<double> divs) const
{
  std::array<Point, 8> raw;
  std::array<double, 8> rawdiv{};
  RawEval(t, x, raw, divs.empty() ? std::span<double>{} : std::span<double>(rawdiv));
  const auto &c = coeffs_[t];
  for (int i = 0; i < local_size_; i++)
  {
    Point val{0.0, 0.0};
    double d = 0.0;
    for (int j = 0; j < local_size_; j++)
    {
      val.x += c(i, j) * raw[j].x;
      val.y += c(i, j) * raw[j].y;
      d += c(i, j) * rawdiv[j];
    }
    values[i] = val;
    if (!divs.empty())
    {
      divs[i] = d;
    }
  }
}

void FluxSpace::Eval(int t, const std::array<double, 3> &bary, std::span<Point> values,
                     std::span<double> divs) const
{
  const TriangleGeometry geo(mesh_->Corners(t));
  EvalAt(t, geo.Map(bary), values, divs);
}

void FluxSpace::LocalMoments(int t, const std::function<Point(Point)> &f,
                             std::span<double> out) const
{
  const SubMesh &m = *mesh_;
  const LineRule &line = GaussLegendre(kEdgeMomentPoints);
  for (int i = 0; i < 3; i++)
  {
    const int e = m.tri_edges[t][i];
    const Point a = m.vertices[m.edges[e].v[0]], b = m.vertices[m.edges[e].v[1]];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const Point n = EdgeNormal(e);
    double m0 = 0.0, m1 = 0.0;
    for (int q = 0; q < line.Size(); q++)
    {
      const double s = line.points[q];
      const Point val = f(a + s * (b - a));
      const double un = val.x * n.x + val.y * n.y;
      m0 += line.weights[q] * un;
      m1 += line.weights[q] * un * (2.0 * s - 1.0);
    }
    out[2 * i] = len * m0;
    out[2 * i + 1] = len * m1;
  }
  if (local_size_ == 8)
  {
    const TriangleGeometry geo(m.Corners(t));
    const TriangleRule &rule = TriangleQuadrature(kCellMomentDegree);
    double mx = 0.0, my = 0.0;
    for (int q = 0; q < rule.Size(); q++)
    {
      const Point val = f(geo.Map(rule.points[q]));
      mx += rule.weights[q] * val.x;
      my += rule.weights[q] * val.y;
    }
    const double scale = geo.area / std::sqrt(geo.area);
    out[6] = scale * mx;
    out[7] = scale * my;
  }
}

Vector FluxSpace::Interpolate(const std::function<Point(Point)> &f) const
{
  Vector out = Vector::Zero(ndofs_);
  std::vector<double> local(local_size_);
  for (int t = 0; t < mesh_->NumTriangles(); t++)
  {
    LocalMoments(t, f, local);
    const auto dofs = CellDofs(t);
    for (int i = 0; i < local_size_; i++)
    {
      out[dofs[i]] = local[i];
    }
  }
  return out;
}

//
// Element pairs
//

const char *to_string(ElementPair p)
{
  switch (p)
  {
    case ElementPair::MiniBdm1:
      return "MINI-BDM1";
    case ElementPair::P2isoP1Bdm1:
      return "P2isoP1-BDM1";
    case ElementPair::TaylorHoodRt1:
      return "TaylorHood-RT1";
  }
  return "?";
}

ElementPair ParseElementPair(const std::string &name)
{
  std::string key;
  for (char c : name)
  {
    if (std::isalnum(static_cast<unsigned char>(c)))
    {
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (key == "mini" || key == "minibdm1")
  {
    return ElementPair::MiniBdm1;
  }
  if (key == "p2isop1" || key == "p2isop1bdm1")
  {
    return ElementPair::P2isoP1Bdm1;
  }
  if (key == "th" || key == "taylorhood" || key == "thrt1" || key == "taylorhoodrt1")
  {
    return ElementPair::TaylorHoodRt1;
  }
  throw InvalidArgument("unknown element pair '" + name + "'");
}

PairFamilies FamiliesOf(ElementPair pair)
{
  switch (pair)
  {
    case ElementPair::MiniBdm1:
      return {ElementFamily::P1Bubble, ElementFamily::P1c, false, ElementFamily::BDM1,
              ElementFamily::P0dc};
    case ElementPair::P2isoP1Bdm1:
      return {ElementFamily::P1c, ElementFamily::P1c, true, ElementFamily::BDM1,
              ElementFamily::P0dc};
    case ElementPair::TaylorHoodRt1:
      return {ElementFamily::P2c, ElementFamily::P1c, false, ElementFamily::RT1,
              ElementFamily::P1dc};
  }
  throw InvalidArgument("FamiliesOf: unknown pair");
}

}  // namespace sdarcy
