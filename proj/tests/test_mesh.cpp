#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>
#include <gtest/gtest.h>
#include "sdarcy/errors.hpp"
#include "sdarcy/mesh.hpp"

using namespace sdarcy;

namespace
{

void ExpectValid(const CoupledMesh &m)
{
  const int n = m.Subdivisions();
  EXPECT_EQ(m.NumVertices(), (n + 1) * (n + 1));
  EXPECT_EQ(m.NumTriangles(), 2 * n * n);
  double area[2] = {0.0, 0.0};
  for (int t = 0; t < m.NumTriangles(); t++)
  {
    ASSERT_GT(m.SignedArea(t), 0.0);
    area[static_cast<int>(m.TriangleTags()[t])] += m.SignedArea(t);
  }
  EXPECT_NEAR(area[0], 0.5, 1e-14);
  EXPECT_NEAR(area[1], 0.5, 1e-14);

  // Every Sigma edge lies on y = 1/2 with one Stokes and one Darcy neighbor.
  std::vector<std::vector<int>> owners(m.NumEdges());
  for (int t = 0; t < m.NumTriangles(); t++)
  {
    for (int e : m.TriangleEdges()[t])
    {
      owners[e].push_back(t);
    }
  }
  int sigma = 0;
  for (int e = 0; e < m.NumEdges(); e++)
  {
    const Edge &edge = m.Edges()[e];
    EXPECT_LT(edge.v[0], edge.v[1]);
    if (edge.tag != EdgeTag::Sigma)
    {
      continue;
    }
    sigma++;
    EXPECT_EQ(m.Vertices()[edge.v[0]].y, 0.5);
    EXPECT_EQ(m.Vertices()[edge.v[1]].y, 0.5);
    ASSERT_EQ(owners[e].size(), 2u);
    EXPECT_NE(m.TriangleTags()[owners[e][0]], m.TriangleTags()[owners[e][1]]);
  }
  EXPECT_EQ(sigma, n);
}

std::set<std::pair<double, double>> CoordinateSet(const CoupledMesh &m)
{
  std::set<std::pair<double, double>> s;
  for (const Point &p : m.Vertices())
  {
    s.insert({p.x, p.y});
  }
  return s;
}

}  // namespace

TEST(Mesh, CountsForTwoSubdivisions)
{
  const CoupledMesh m = BuildUnitSquare(2);
  EXPECT_EQ(m.NumVertices(), 9);
  EXPECT_EQ(m.NumTriangles(), 8);
  EXPECT_EQ(InterfaceTrace(m).size(), 2u);
}

TEST(Mesh, CountsForEightSubdivisions)
{
  const CoupledMesh m = BuildUnitSquare(8);
  EXPECT_EQ(m.NumVertices(), 81);
  EXPECT_EQ(m.NumTriangles(), 128);
  EXPECT_EQ(InterfaceTrace(m).size(), 8u);
  EXPECT_DOUBLE_EQ(m.MeshSize(), 1.0 / 8);
  ExpectValid(m);
}

TEST(Mesh, RejectsOddOrTinySubdivisions)
{
  EXPECT_THROW(BuildUnitSquare(3), InvalidArgument);
  EXPECT_THROW(BuildUnitSquare(0), InvalidArgument);
  EXPECT_THROW(BuildUnitSquare(-2), InvalidArgument);
}

TEST(Mesh, RefinementQuartersTriangles)
{
  const CoupledMesh fine = RefineUniform(BuildUnitSquare(2));
  EXPECT_EQ(fine.NumTriangles(), 32);
  EXPECT_DOUBLE_EQ(fine.MeshSize(), 0.25);
  ExpectValid(fine);
  for (int t = 0; t < fine.NumTriangles(); t++)
  {
    EXPECT_GE(fine.TriangleParents()[t], 0);
  }
}

TEST(Mesh, TwiceRefinedMatchesGeneratedMesh)
{
  const CoupledMesh refined = RefineUniform(RefineUniform(BuildUnitSquare(8)));
  const CoupledMesh direct = BuildUnitSquare(32);
  EXPECT_EQ(CoordinateSet(refined), CoordinateSet(direct));
  // The numbering rule reproduces the generated vertex order and the subdomain tags.
  for (int v = 0; v < direct.NumVertices(); v++)
  {
    EXPECT_EQ(refined.Vertices()[v].x, direct.Vertices()[v].x);
    EXPECT_EQ(refined.Vertices()[v].y, direct.Vertices()[v].y);
  }
  ExpectValid(refined);
}

TEST(Mesh, InterfaceTraceGeometry)
{
  const auto trace = InterfaceTrace(BuildUnitSquare(8));
  ASSERT_EQ(trace.size(), 8u);
  double total = 0.0;
  double last_x = -1.0;
  for (const InterfaceEdge &e : trace)
  {
    EXPECT_DOUBLE_EQ(e.length, 1.0 / 8);
    EXPECT_DOUBLE_EQ(e.normal.x * 0.0 + e.normal.y * -1.0, 1.0);
    EXPECT_GT(e.a.x, last_x);
    last_x = e.a.x;
    total += e.length;
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Mesh, EulerRelationPerSubdomain)
{
  for (int n : {2, 4, 8, 16})
  {
    const CoupledMesh m = BuildUnitSquare(n);
    for (Subdomain d : {Subdomain::Stokes, Subdomain::Darcy})
    {
      const SubMesh s = ExtractSubdomain(m, d);
      EXPECT_EQ(s.NumVertices() - s.NumEdges() + s.NumTriangles(), 1) << "n=" << n;
      double area = 0.0;
      for (int t = 0; t < s.NumTriangles(); t++)
      {
        area += s.Area(t);
      }
      EXPECT_NEAR(area, 0.5, 1e-14);
    }
  }
}

TEST(Mesh, EdgeOrientationStableUnderRefinement)
{
  // Inherited vertices keep their coordinates, so an edge between two of them keeps its
  // orientation when the indices follow the generated numbering.
  const CoupledMesh coarse = BuildUnitSquare(4);
  const CoupledMesh fine = RefineUniform(coarse);
  for (const Edge &e : fine.Edges())
  {
    const Point a = fine.Vertices()[e.v[0]];
    const Point b = fine.Vertices()[e.v[1]];
    EXPECT_TRUE(a.y < b.y || (a.y == b.y && a.x < b.x));
  }
}

TEST(Mesh, HierarchyStartsAtCoarsestEvenMesh)
{
  const auto levels = BuildHierarchy(32);
  ASSERT_EQ(levels.size(), 5u);
  EXPECT_EQ(levels.front().Subdivisions(), 2);
  EXPECT_EQ(levels.back().Subdivisions(), 32);
  EXPECT_FALSE(levels.front().HasParent());
  EXPECT_TRUE(levels.back().HasParent());
}

TEST(Mesh, DumpListsEveryEntity)
{
  const CoupledMesh m = BuildUnitSquare(2);
  std::ostringstream os;
  WriteMesh(os, m);
  std::istringstream is(os.str());
  std::string line;
  int v = 0, t = 0, e = 0;
  while (std::getline(is, line))
  {
    v += line.rfind("v ", 0) == 0;
    t += line.rfind("t ", 0) == 0;
    e += line.rfind("e ", 0) == 0;
  }
  EXPECT_EQ(v, 9);
  EXPECT_EQ(t, 8);
  // 8 outer boundary edges and 2 interface edges.
  EXPECT_EQ(e, 10);
}
