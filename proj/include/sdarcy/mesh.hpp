#ifndef SDARCY_MESH_HPP
#define SDARCY_MESH_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace sdarcy
{

struct Point
{
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

enum class Subdomain : std::uint8_t
{
  Stokes,
  Darcy
};

enum class EdgeTag : std::uint8_t
{
  InteriorS,
  InteriorD,
  GammaS,
  GammaD,
  Sigma
};

const char *to_string(Subdomain s);
const char *to_string(EdgeTag t);

struct Edge
{
  // v[0] < v[1]; the edge is oriented from v[0] to v[1].
  std::array<int, 2> v{};
  EdgeTag tag = EdgeTag::InteriorS;
};

// Interface edge with the unit normal pointing from the Stokes into the Darcy region.
struct InterfaceEdge
{
  int edge = -1;
  Point a, b;  // a.x < b.x
  Point normal;
  double length = 0.0;
};

//
// Structured triangulation of (0,1)^2 split at y = 1/2. The top half is the Stokes region,
// the bottom half the Darcy region. Vertices are numbered row by row (y-major, then x), so
// that refining a mesh reproduces the numbering of the directly generated finer mesh.
// Local edge i of a triangle is the edge opposite its local vertex i.
//
class CoupledMesh
{
public:
  int Subdivisions() const { return n_; }
  // Reported mesh size 1/n (the triangles have diameter sqrt(2)/n).
  double MeshSize() const { return 1.0 / n_; }

  int NumVertices() const { return static_cast<int>(vertices_.size()); }
  int NumTriangles() const { return static_cast<int>(triangles_.size()); }
  int NumEdges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Point> &Vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>> &Triangles() const { return triangles_; }
  const std::vector<Edge> &Edges() const { return edges_; }
  const std::vector<std::array<int, 3>> &TriangleEdges() const { return tri_edges_; }
  const std::vector<Subdomain> &TriangleTags() const { return tri_tags_; }

  // Parent triangle in the next coarser mesh, or -1 for a generated mesh.
  const std::vector<int> &TriangleParents() const { return tri_parents_; }
  // Coarse vertices whose average is this vertex (equal entries for inherited vertices);
  // {-1, -1} for a generated mesh.
  const std::vector<std::array<int, 2>> &VertexParents() const { return vertex_parents_; }
  bool HasParent() const { return has_parent_; }

  double SignedArea(int t) const;
  int FindEdge(int a, int b) const;

  friend CoupledMesh BuildUnitSquare(int n);
  friend CoupledMesh RefineUniform(const CoupledMesh &mesh);

private:
  void BuildEdges();

  int n_ = 0;
  bool has_parent_ = false;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Subdomain> tri_tags_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<int> tri_parents_;
  std::vector<std::array<int, 2>> vertex_parents_;
  // CSR lookup from the lower vertex of an edge to its edges.
  std::vector<int> edge_row_, edge_col_;
};

// n subdivisions per unit length; n must be even and >= 2.
CoupledMesh BuildUnitSquare(int n);

// Red refinement: every triangle is split into four, h is halved.
CoupledMesh RefineUniform(const CoupledMesh &mesh);

// Interface edges sorted by x, each carrying the normal (0,-1).
std::vector<InterfaceEdge> InterfaceTrace(const CoupledMesh &mesh);

// Nested meshes from the coarsest even subdivision reachable by halving n, up to n.
std::vector<CoupledMesh> BuildHierarchy(int n);

// Plain-text dump: "v x y", "t i j k tag", "e i j tag" (boundary and interface edges).
void WriteMesh(std::ostream &os, const CoupledMesh &mesh);

//
// One subdomain of a CoupledMesh with its own compact numbering.
//
struct SubMesh
{
  Subdomain domain = Subdomain::Stokes;
  int n = 0;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 3>> tri_edges;
  std::vector<Edge> edges;
  std::vector<int> global_vertex, global_triangle, global_edge;
  std::vector<int> local_vertex;  // indexed by global vertex, -1 if not in the subdomain
  std::vector<int> local_triangle;
  // Parent coarse local triangle / coarse local vertex pair, when extracted from a refined mesh
  // together with its coarse counterpart.
  std::vector<int> tri_parents;
  std::vector<std::array<int, 2>> vertex_parents;

  int NumVertices() const { return static_cast<int>(vertices.size()); }
  int NumTriangles() const { return static_cast<int>(triangles.size()); }
  int NumEdges() const { return static_cast<int>(edges.size()); }
  double Area(int t) const;
  std::array<Point, 3> Corners(int t) const
  {
    const auto &tri = triangles[t];
    return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
  }
  // Vertex lies on the part of the subdomain boundary that excludes the interface.
  std::vector<bool> OuterBoundaryVertices() const;
  // Vertex lies anywhere on the subdomain boundary (outer part or interface).
  std::vector<bool> BoundaryVertices() const;
};

SubMesh ExtractSubdomain(const CoupledMesh &mesh, Subdomain domain);

// Extract `domain` from `fine`, recording parent links into the submesh `coarse` extracted from
// the mesh `fine` was refined from.
SubMesh ExtractSubdomain(const CoupledMesh &fine, Subdomain domain, const SubMesh &coarse);

inline bool IsBoundaryTag(EdgeTag t) { return t == EdgeTag::GammaS || t == EdgeTag::GammaD; }

}  // namespace sdarcy

#endif  // SDARCY_MESH_HPP
