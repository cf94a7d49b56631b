#ifndef SDARCY_FESPACE_HPP
#define SDARCY_FESPACE_HPP

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>
#include "sdarcy/linalg.hpp"
#include "sdarcy/mesh.hpp"

namespace sdarcy
{

enum class ElementFamily
{
  P0dc,
  P1dc,
  P1c,
  P2c,
  P1Bubble,  // MINI velocity: continuous P1 enriched with the cubic bubble
  BDM1,
  RT1
};

const char *to_string(ElementFamily f);
bool IsFluxFamily(ElementFamily f);

enum class DofClass : std::uint8_t
{
  Interior,
  GammaS,  // constrained by the no-slip condition
  GammaD,  // constrained by the zero normal flux condition
  Sigma    // interface dof
};

// Affine geometry of one triangle.
struct TriangleGeometry
{
  std::array<Point, 3> p;
  double area = 0.0;
  std::array<Point, 3> grad_lambda;

  explicit TriangleGeometry(const std::array<Point, 3> &corners);
  Point Map(const std::array<double, 3> &bary) const;
  std::array<double, 3> Barycentric(Point x) const;
  Point Centroid() const { return (1.0 / 3.0) * (p[0] + p[1] + p[2]); }
};

//
// H1-conforming Lagrange spaces (P1, P2, P1 + bubble) and discontinuous P0/P1 spaces on a
// subdomain mesh. Continuous dofs are numbered vertices first, then edges (P2), then cells
// (bubble).
//
class ScalarSpace
{
public:
  ScalarSpace(std::shared_ptr<const SubMesh> mesh, ElementFamily family);

  ElementFamily Family() const { return family_; }
  const SubMesh &Mesh() const { return *mesh_; }
  std::shared_ptr<const SubMesh> MeshPtr() const { return mesh_; }
  int NumDofs() const { return ndofs_; }
  int LocalSize() const { return local_size_; }
  bool IsContinuous() const { return family_ != ElementFamily::P0dc && family_ != ElementFamily::P1dc; }
  int PolynomialDegree() const;

  std::span<const int> CellDofs(int t) const
  {
    return {cell_dofs_.data() + static_cast<std::size_t>(t) * local_size_,
            static_cast<std::size_t>(local_size_)};
  }

  // Shape function values (and physical gradients if `grads` is non-empty) at a barycentric point.
  void Eval(const TriangleGeometry &geo, const std::array<double, 3> &bary,
            std::span<double> values, std::span<Point> grads = {}) const;

  const std::vector<DofClass> &Classes() const { return classes_; }
  // Location of the nodal dof (cell centroid for bubbles and discontinuous dofs).
  const std::vector<Point> &DofPoints() const { return dof_points_; }

  // Nodal interpolation; bubble coefficients are chosen so that the interpolant matches f at the
  // centroid.
  Vector Interpolate(const std::function<double(Point)> &f) const;

private:
  std::shared_ptr<const SubMesh> mesh_;
  ElementFamily family_;
  int ndofs_ = 0;
  int local_size_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<DofClass> classes_;
  std::vector<Point> dof_points_;
};

// Two-component vector space built on a scalar space: dof (c, i) -> c * n + i.
struct VectorLayout
{
  int scalar_dofs = 0;
  int Dof(int comp, int i) const { return comp * scalar_dofs + i; }
  int Size() const { return 2 * scalar_dofs; }
};

//
// H(div)-conforming BDM1 and RT1 spaces. Global dofs are two normal-flux moments per edge
// (against 1 and the Legendre P1 function oriented from the lower to the higher vertex
// index, with the edge normal obtained by rotating the edge tangent clockwise), followed for
// RT1 by two interior moments per cell (against the constant unit vectors, scaled by
// 1/sqrt|T|). Shape functions are constructed on each physical triangle by inverting the
// moment matrix of a monomial basis; this is the contravariant Piola image of the reference
// basis with the edge signs folded in.
//
class FluxSpace
{
public:
  FluxSpace(std::shared_ptr<const SubMesh> mesh, ElementFamily family);

  ElementFamily Family() const { return family_; }
  const SubMesh &Mesh() const { return *mesh_; }
  std::shared_ptr<const SubMesh> MeshPtr() const { return mesh_; }
  int NumDofs() const { return ndofs_; }
  int LocalSize() const { return local_size_; }
  int PolynomialDegree() const { return family_ == ElementFamily::RT1 ? 2 : 1; }

  std::span<const int> CellDofs(int t) const
  {
    return {cell_dofs_.data() + static_cast<std::size_t>(t) * local_size_,
            static_cast<std::size_t>(local_size_)};
  }

  void Eval(int t, const std::array<double, 3> &bary, std::span<Point> values,
            std::span<double> divs = {}) const;
  void EvalAt(int t, Point x, std::span<Point> values, std::span<double> divs = {}) const;

  const std::vector<DofClass> &Classes() const { return classes_; }

  // +1 if the outward normal of local edge i of triangle t equals the global edge normal.
  int EdgeSign(int t, int i) const { return edge_signs_[3 * t + i]; }
  Point EdgeNormal(int e) const;

  // Canonical degrees of freedom applied to f on cell t (local ordering).
  void LocalMoments(int t, const std::function<Point(Point)> &f, std::span<double> out) const;
  // Canonical interpolation of a continuous field.
  Vector Interpolate(const std::function<Point(Point)> &f) const;

  // Interface dofs ordered by the x-position of their edge, moment 0 before moment 1.
  const std::vector<int> &SigmaDofs() const { return sigma_dofs_; }
  // Interface edges (local edge ids) in the same order.
  const std::vector<int> &SigmaEdges() const { return sigma_edges_; }

private:
  void RawEval(int t, Point x, std::span<Point> values, std::span<double> divs) const;

  std::shared_ptr<const SubMesh> mesh_;
  ElementFamily family_;
  int ndofs_ = 0;
  int local_size_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<int> edge_signs_;
  std::vector<DofClass> classes_;
  std::vector<int> sigma_dofs_, sigma_edges_;
  std::vector<Point> centers_;
  std::vector<double> scales_;
  // Row i holds the monomial coefficients of local shape function i.
  std::vector<Eigen::Matrix<double, 8, 8>> coeffs_;
};

// Space descriptions of the three coupled discretizations.
enum class ElementPair
{
  MiniBdm1,
  P2isoP1Bdm1,
  TaylorHoodRt1
};

const char *to_string(ElementPair p);
ElementPair ParseElementPair(const std::string &name);

struct PairFamilies
{
  ElementFamily stokes_velocity;
  ElementFamily stokes_pressure;
  bool pressure_on_coarse_mesh;  // pressure on the mesh with twice the size of the velocity mesh
  ElementFamily darcy_flux;
  ElementFamily darcy_pressure;
};

PairFamilies FamiliesOf(ElementPair pair);

// The Darcy pressure family paired with a flux family.
ElementFamily PairedPressure(ElementFamily flux);

}  // namespace sdarcy

#endif  // SDARCY_FESPACE_HPP
