#ifndef SDARCY_QUADRATURE_HPP
#define SDARCY_QUADRATURE_HPP

#include <array>
#include <vector>

namespace sdarcy
{

// Gauss-Legendre rule on [0, 1] with weights summing to 1.
struct LineRule
{
  std::vector<double> points;
  std::vector<double> weights;
  int Size() const { return static_cast<int>(points.size()); }
};

// Rule on the reference triangle in barycentric coordinates, weights summing to 1 (multiply by
// the triangle area).
struct TriangleRule
{
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int Size() const { return static_cast<int>(points.size()); }
};

const LineRule &GaussLegendre(int npoints);

// Collapsed Gauss rule exact for polynomials up to the given total degree.
const TriangleRule &TriangleQuadrature(int degree);

}  // namespace sdarcy

#endif  // SDARCY_QUADRATURE_HPP
