#include "sdarcy/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include "sdarcy/errors.hpp"

namespace sdarcy
{

const char *to_string(Subdomain s)
{
  return s == Subdomain::Stokes ? "S" : "D";
}

const char *to_string(EdgeTag t)
{
  switch (t)
  {
    case EdgeTag::InteriorS:
      return "interior-S";
    case EdgeTag::InteriorD:
      return "interior-D";
    case EdgeTag::GammaS:
      return "GammaS";
    case EdgeTag::GammaD:
      return "GammaD";
    case EdgeTag::Sigma:
      return "Sigma";
  }
  return "?";
}

double CoupledMesh::SignedArea(int t) const
{
  const auto &tri = triangles_[t];
  const Point a = vertices_[tri[0]], b = vertices_[tri[1]], c = vertices_[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

int CoupledMesh::FindEdge(int a, int b) const
{
  if (a > b)
  {
    std::swap(a, b);
  }
  for (int k = edge_row_[a]; k < edge_row_[a + 1]; k++)
  {
    if (edges_[edge_col_[k]].v[1] == b)
    {
      return edge_col_[k];
    }
  }
  return -1;
}

void CoupledMesh::BuildEdges()
{
  std::vector<std::array<int, 2>> pairs;
  pairs.reserve(3 * triangles_.size());
  for (const auto &tri : triangles_)
  {
    for (int i = 0; i < 3; i++)
    {
      int a = tri[(i + 1) % 3], b = tri[(i + 2) % 3];
      pairs.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  edges_.assign(pairs.size(), Edge{});
  edge_row_.assign(vertices_.size() + 1, 0);
  for (std::size_t e = 0; e < pairs.size(); e++)
  {
    edges_[e].v = pairs[e];
    edge_row_[pairs[e][0] + 1]++;
  }
  std::partial_sum(edge_row_.begin(), edge_row_.end(), edge_row_.begin());
  edge_col_.resize(pairs.size());
  std::iota(edge_col_.begin(), edge_col_.end(), 0);  // pairs are sorted by lower vertex

  tri_edges_.assign(triangles_.size(), {});
  std::vector<int> count(edges_.size(), 0);
  std::vector<std::array<int, 2>> owners(edges_.size(), {-1, -1});
  for (std::size_t t = 0; t < triangles_.size(); t++)
  {
    const auto &tri = triangles_[t];
    for (int i = 0; i < 3; i++)
    {
      const int e = FindEdge(tri[(i + 1) % 3], tri[(i + 2) % 3]);
      tri_edges_[t][i] = e;
      owners[e][count[e]++] = static_cast<int>(t);
    }
  }
  for (std::size_t e = 0; e < edges_.size(); e++)
  {
    const Point a = vertices_[edges_[e].v[0]], b = vertices_[edges_[e].v[1]];
    if (count[e] == 1)
    {
      edges_[e].tag = tri_tags_[owners[e][0]] == Subdomain::Stokes ? EdgeTag::GammaS
                                                                   : EdgeTag::GammaD;
    }
    else if (a.y == 0.5 && b.y == 0.5)
    {
      edges_[e].tag = EdgeTag::Sigma;
    }
    else
    {
      edges_[e].tag = tri_tags_[owners[e][0]] == Subdomain::Stokes ? EdgeTag::InteriorS
                                                                   : EdgeTag::InteriorD;
    }
  }
}

CoupledMesh BuildUnitSquare(int n)
{
  if (n < 2 || n % 2 != 0)
  {
    throw InvalidArgument("BuildUnitSquare: n must be even and >= 2, got " +
                          std::to_string(n));
  }
  CoupledMesh mesh;
  mesh.n_ = n;
  const int nv = n + 1;
  mesh.vertices_.reserve(nv * nv);
  for (int j = 0; j <= n; j++)
  {
    for (int i = 0; i <= n; i++)
    {
      mesh.vertices_.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  for (int j = 0; j < n; j++)
  {
    const Subdomain tag = 2 * j >= n ? Subdomain::Stokes : Subdomain::Darcy;
    for (int i = 0; i < n; i++)
    {
      const int bl = j * nv + i, br = bl + 1, tl = bl + nv, tr = tl + 1;
      mesh.triangles_.push_back({bl, br, tr});
      mesh.triangles_.push_back({bl, tr, tl});
      mesh.tri_tags_.push_back(tag);
      mesh.tri_tags_.push_back(tag);
    }
  }
  mesh.tri_parents_.assign(mesh.triangles_.size(), -1);
  mesh.vertex_parents_.assign(mesh.vertices_.size(), {-1, -1});
  mesh.BuildEdges();
  return mesh;
}

CoupledMesh RefineUniform(const CoupledMesh &coarse)
{
  CoupledMesh fine;
  fine.n_ = 2 * coarse.n_;
  fine.has_parent_ = true;

  // Old vertices first, then edge midpoints; renumbered lexicographically below.
  const int nvc = coarse.NumVertices();
  std::vector<Point> pts = coarse.vertices_;
  std::vector<std::array<int, 2>> parents(nvc);
  for (int v = 0; v < nvc; v++)
  {
    parents[v] = {v, v};
  }
  for (const auto &e : coarse.edges_)
  {
    pts.push_back(0.5 * (coarse.vertices_[e.v[0]] + coarse.vertices_[e.v[1]]));
    parents.push_back(e.v);
  }
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b)
            { return pts[a].y != pts[b].y ? pts[a].y < pts[b].y : pts[a].x < pts[b].x; });
  std::vector<int> renum(pts.size());
  fine.vertices_.resize(pts.size());
  fine.vertex_parents_.resize(pts.size());
  for (std::size_t k = 0; k < order.size(); k++)
  {
    renum[order[k]] = static_cast<int>(k);
    fine.vertices_[k] = pts[order[k]];
    fine.vertex_parents_[k] = parents[order[k]];
  }

  for (int t = 0; t < coarse.NumTriangles(); t++)
  {
    const auto &tri = coarse.triangles_[t];
    const auto &te = coarse.tri_edges_[t];
    // Midpoint of the edge opposite local vertex i.
    std::array<int, 3> mid;
    for (int i = 0; i < 3; i++)
    {
      mid[i] = renum[nvc + te[i]];
    }
    const int v0 = renum[tri[0]], v1 = renum[tri[1]], v2 = renum[tri[2]];
    const int m01 = mid[2], m12 = mid[0], m20 = mid[1];
    for (const auto &child : {std::array<int, 3>{v0, m01, m20}, std::array<int, 3>{m01, v1, m12},
                              std::array<int, 3>{m20, m12, v2}, std::array<int, 3>{m01, m12, m20}})
    {
      fine.triangles_.push_back(child);
      fine.tri_tags_.push_back(coarse.tri_tags_[t]);
      fine.tri_parents_.push_back(t);
    }
  }
  fine.BuildEdges();
  return fine;
}

std::vector<InterfaceEdge> InterfaceTrace(const CoupledMesh &mesh)
{
  std::vector<InterfaceEdge> out;
  for (int e = 0; e < mesh.NumEdges(); e++)
  {
    const auto &edge = mesh.Edges()[e];
    if (edge.tag != EdgeTag::Sigma)
    {
      continue;
    }
    InterfaceEdge ie;
    ie.edge = e;
    ie.a = mesh.Vertices()[edge.v[0]];
    ie.b = mesh.Vertices()[edge.v[1]];
    if (ie.a.x > ie.b.x)
    {
      std::swap(ie.a, ie.b);
    }
    ie.normal = {0.0, -1.0};
    ie.length = ie.b.x - ie.a.x;
    out.push_back(ie);
  }
  std::sort(out.begin(), out.end(),
            [](const InterfaceEdge &p, const InterfaceEdge &q) { return p.a.x < q.a.x; });
  return out;
}

std::vector<CoupledMesh> BuildHierarchy(int n)
{
  if (n < 2 || n % 2 != 0)
  {
    throw InvalidArgument("BuildHierarchy: n must be even and >= 2, got " + std::to_string(n));
  }
  int n0 = n, levels = 1;
  while (n0 % 4 == 0)
  {
    n0 /= 2;
    levels++;
  }
  std::vector<CoupledMesh> out;
  out.reserve(levels);
  out.push_back(BuildUnitSquare(n0));
  for (int l = 1; l < levels; l++)
  {
    out.push_back(RefineUniform(out.back()));
  }
  return out;
}

void WriteMesh(std::ostream &os, const CoupledMesh &mesh)
{
  os.precision(17);
  for (const auto &p : mesh.Vertices())
  {
    os << "v " << p.x << ' ' << p.y << '\n';
  }
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    const auto &tri = mesh.Triangles()[t];
    os << "t " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' '
       << to_string(mesh.TriangleTags()[t]) << '\n';
  }
  for (const auto &e : mesh.Edges())
  {
    if (e.tag == EdgeTag::GammaS || e.tag == EdgeTag::GammaD || e.tag == EdgeTag::Sigma)
    {
      os << "e " << e.v[0] << ' ' << e.v[1] << ' ' << to_string(e.tag) << '\n';
    }
  }
}

double SubMesh::Area(int t) const
{
  const auto [a, b, c] = Corners(t);
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::vector<bool> SubMesh::OuterBoundaryVertices() const
{
  std::vector<bool> mark(vertices.size(), false);
  for (const auto &e : edges)
  {
    if (IsBoundaryTag(e.tag))
    {
      mark[e.v[0]] = mark[e.v[1]] = true;
    }
  }
  return mark;
}

std::vector<bool> SubMesh::BoundaryVertices() const
{
  std::vector<bool> mark = OuterBoundaryVertices();
  for (const auto &e : edges)
  {
    if (e.tag == EdgeTag::Sigma)
    {
      mark[e.v[0]] = mark[e.v[1]] = true;
    }
  }
  return mark;
}

SubMesh ExtractSubdomain(const CoupledMesh &mesh, Subdomain domain)
{
  SubMesh sub;
  sub.domain = domain;
  sub.n = mesh.Subdivisions();
  sub.local_vertex.assign(mesh.NumVertices(), -1);
  sub.local_triangle.assign(mesh.NumTriangles(), -1);
  std::vector<int> local_edge(mesh.NumEdges(), -1);
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    if (mesh.TriangleTags()[t] != domain)
    {
      continue;
    }
    for (int i = 0; i < 3; i++)
    {
      sub.local_vertex[mesh.Triangles()[t][i]] = 0;
      local_edge[mesh.TriangleEdges()[t][i]] = 0;
    }
  }
  for (int v = 0; v < mesh.NumVertices(); v++)
  {
    if (sub.local_vertex[v] == 0)
    {
      sub.local_vertex[v] = sub.NumVertices();
      sub.global_vertex.push_back(v);
      sub.vertices.push_back(mesh.Vertices()[v]);
    }
  }
  for (int e = 0; e < mesh.NumEdges(); e++)
  {
    if (local_edge[e] == 0)
    {
      local_edge[e] = sub.NumEdges();
      sub.global_edge.push_back(e);
      const auto &ge = mesh.Edges()[e];
      sub.edges.push_back({{sub.local_vertex[ge.v[0]], sub.local_vertex[ge.v[1]]}, ge.tag});
    }
  }
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    if (mesh.TriangleTags()[t] != domain)
    {
      continue;
    }
    sub.local_triangle[t] = sub.NumTriangles();
    sub.global_triangle.push_back(t);
    const auto &tri = mesh.Triangles()[t];
    const auto &te = mesh.TriangleEdges()[t];
    sub.triangles.push_back(
      {sub.local_vertex[tri[0]], sub.local_vertex[tri[1]], sub.local_vertex[tri[2]]});
    sub.tri_edges.push_back({local_edge[te[0]], local_edge[te[1]], local_edge[te[2]]});
  }
  return sub;
}

SubMesh ExtractSubdomain(const CoupledMesh &fine, Subdomain domain, const SubMesh &coarse)
{
  if (!fine.HasParent() || coarse.domain != domain || fine.Subdivisions() != 2 * coarse.n)
  {
    throw InvalidArgument("ExtractSubdomain: meshes are not nested");
  }
  SubMesh sub = ExtractSubdomain(fine, domain);
  sub.tri_parents.resize(sub.NumTriangles());
  for (int t = 0; t < sub.NumTriangles(); t++)
  {
    sub.tri_parents[t] = coarse.local_triangle[fine.TriangleParents()[sub.global_triangle[t]]];
  }
  sub.vertex_parents.resize(sub.NumVertices());
  for (int v = 0; v < sub.NumVertices(); v++)
  {
    const auto &p = fine.VertexParents()[sub.global_vertex[v]];
    sub.vertex_parents[v] = {coarse.local_vertex[p[0]], coarse.local_vertex[p[1]]};
  }
  return sub;
}

}  // namespace sdarcy
