#include "sdarcy/manufactured.hpp"

#include <cmath>
#include <numbers>
#include "sdarcy/errors.hpp"

namespace sdarcy
{

void PhysicalParams::Validate() const
{
  if (!(nu > 0.0) || !(kappa > 0.0) || !(tau > 0.0))
  {
    throw InvalidArgument("PhysicalParams: nu, kappa and tau must be positive");
  }
}

Point ManufacturedCase::StokesForce(Point x) const
{
  const Point lap = StokesVelocityLaplacian(x);
  const Point gp = StokesPressureGradient(x);
  return {-params_.nu * lap.x + gp.x, -params_.nu * lap.y + gp.y};
}

Point ManufacturedCase::DarcyVelocity(Point x) const
{
  const Point g = DarcyPressureGradient(x);
  return {-g.x / params_.tau, -g.y / params_.tau};
}

double ManufacturedCase::DarcySource(Point x) const
{
  return -DarcyPressureLaplacian(x) / params_.tau;
}

Point ManufacturedCase::InterfaceResidual(Point x) const
{
  const Gradient g = StokesVelocityGradient(x);
  const double eps12 = 0.5 * (g[1] + g[2]);
  const double eps22 = g[3];
  const Point u = StokesVelocity(x);
  return {-2.0 * params_.nu * eps12 + params_.kappa * u.x,
          -2.0 * params_.nu * eps22 + StokesPressure(x) - DarcyPressure(x)};
}

namespace
{

constexpr double pi = std::numbers::pi;

// S(x) = sin^2(2 pi x) cos(2 pi x) and its derivatives.
double S0(double x)
{
  const double s = std::sin(2 * pi * x), c = std::cos(2 * pi * x);
  return s * s * c;
}
double S1(double x)
{
  const double s = std::sin(2 * pi * x), c = std::cos(2 * pi * x);
  return 2 * pi * (2 * s * c * c - s * s * s);
}
double S2(double x)
{
  const double s = std::sin(2 * pi * x), c = std::cos(2 * pi * x);
  return 4 * pi * pi * (2 * c * c * c - 7 * s * s * c);
}

}  // namespace

Point TrigonometricCase::StokesVelocity(Point x) const
{
  const double sa = std::sin(2 * pi * x.x), sb = std::sin(pi * x.y);
  return {pi * std::sin(2 * pi * x.y) * sa * sa * sa, -6 * pi * S0(x.x) * sb * sb};
}

Gradient TrigonometricCase::StokesVelocityGradient(Point x) const
{
  const double sa = std::sin(2 * pi * x.x), ca = std::cos(2 * pi * x.x);
  const double sb = std::sin(pi * x.y);
  const double s2b = std::sin(2 * pi * x.y), c2b = std::cos(2 * pi * x.y);
  return {6 * pi * pi * s2b * sa * sa * ca, 2 * pi * pi * c2b * sa * sa * sa,
          -6 * pi * S1(x.x) * sb * sb, -6 * pi * pi * S0(x.x) * s2b};
}

Point TrigonometricCase::StokesVelocityLaplacian(Point x) const
{
  const double sa = std::sin(2 * pi * x.x);
  const double sb = std::sin(pi * x.y);
  const double s2b = std::sin(2 * pi * x.y), c2b = std::cos(2 * pi * x.y);
  const double d11u1 = 6 * pi * pi * s2b * S1(x.x);
  const double d22u1 = -4 * pi * pi * pi * s2b * sa * sa * sa;
  const double d11u2 = -6 * pi * S2(x.x) * sb * sb;
  const double d22u2 = -12 * pi * pi * pi * S0(x.x) * c2b;
  return {d11u1 + d22u1, d11u2 + d22u2};
}

double TrigonometricCase::StokesPressure(Point x) const
{
  const double z = x.y - 0.5 - std::cos(pi * (x.y + 0.5));
  return -0.25 * pi * std::cos(0.5 * pi * x.x) * z;
}

Point TrigonometricCase::StokesPressureGradient(Point x) const
{
  const double z = x.y - 0.5 - std::cos(pi * (x.y + 0.5));
  const double dz = 1.0 + pi * std::sin(pi * (x.y + 0.5));
  return {0.125 * pi * pi * std::sin(0.5 * pi * x.x) * z,
          -0.25 * pi * std::cos(0.5 * pi * x.x) * dz};
}

double TrigonometricCase::DarcyPressure(Point x) const
{
  const double y = 0.5 * x.y - std::sin(2 * pi * x.y) / (4 * pi);
  return 6 * pi * y * S0(x.x);
}

Point TrigonometricCase::DarcyPressureGradient(Point x) const
{
  const double y = 0.5 * x.y - std::sin(2 * pi * x.y) / (4 * pi);
  const double dy = 0.5 - 0.5 * std::cos(2 * pi * x.y);
  return {6 * pi * y * S1(x.x), 6 * pi * dy * S0(x.x)};
}

double TrigonometricCase::DarcyPressureLaplacian(Point x) const
{
  const double y = 0.5 * x.y - std::sin(2 * pi * x.y) / (4 * pi);
  const double d2y = pi * std::sin(2 * pi * x.y);
  return 6 * pi * (y * S2(x.x) + d2y * S0(x.x));
}

}  // namespace sdarcy
