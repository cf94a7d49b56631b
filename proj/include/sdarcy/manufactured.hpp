#ifndef SDARCY_MANUFACTURED_HPP
#define SDARCY_MANUFACTURED_HPP

#include <array>
#include <memory>
#include "sdarcy/mesh.hpp"

namespace sdarcy
{

struct PhysicalParams
{
  double nu = 1.0;     // kinematic viscosity
  double kappa = 1.0;  // friction coefficient of the Beavers-Joseph-Saffman law
  double tau = 1.0;    // K = tau^{-1} I

  void Validate() const;
};

// Row-major 2x2 gradient: {d1 u1, d2 u1, d1 u2, d2 u2}.
using Gradient = std::array<double, 4>;

//
// Closed-form fields of a coupled problem. Derived classes provide a divergence-free Stokes
// velocity vanishing on the outer Stokes boundary, the Stokes pressure and a Darcy pressure
// with zero normal derivative on the outer Darcy boundary; sources and the interface stress
// residual follow from the equations.
//
class ManufacturedCase
{
public:
  explicit ManufacturedCase(PhysicalParams params) : params_(params) { params_.Validate(); }
  virtual ~ManufacturedCase() = default;

  const PhysicalParams &Params() const { return params_; }

  virtual Point StokesVelocity(Point x) const = 0;
  virtual Gradient StokesVelocityGradient(Point x) const = 0;
  virtual Point StokesVelocityLaplacian(Point x) const = 0;
  virtual double StokesPressure(Point x) const = 0;
  virtual Point StokesPressureGradient(Point x) const = 0;
  virtual double DarcyPressure(Point x) const = 0;
  virtual Point DarcyPressureGradient(Point x) const = 0;
  virtual double DarcyPressureLaplacian(Point x) const = 0;

  // -div(2 nu eps(u) - p I)
  Point StokesForce(Point x) const;
  // u_D = -K grad p_D
  Point DarcyVelocity(Point x) const;
  // f_D = div u_D
  double DarcySource(Point x) const;
  // 2 nu eps(u_S) n - p_S n + kappa pi_t u_S + p_D n on the interface, n = (0, -1).
  Point InterfaceResidual(Point x) const;

private:
  PhysicalParams params_;
};

// The trigonometric benchmark on (0,1)^2 with the interface at y = 1/2.
class TrigonometricCase final : public ManufacturedCase
{
public:
  explicit TrigonometricCase(PhysicalParams params = {}) : ManufacturedCase(params) {}

  Point StokesVelocity(Point x) const override;
  Gradient StokesVelocityGradient(Point x) const override;
  Point StokesVelocityLaplacian(Point x) const override;
  double StokesPressure(Point x) const override;
  Point StokesPressureGradient(Point x) const override;
  double DarcyPressure(Point x) const override;
  Point DarcyPressureGradient(Point x) const override;
  double DarcyPressureLaplacian(Point x) const override;
};

// Identically zero data.
class ZeroCase final : public ManufacturedCase
{
public:
  explicit ZeroCase(PhysicalParams params = {}) : ManufacturedCase(params) {}

  Point StokesVelocity(Point) const override { return {}; }
  Gradient StokesVelocityGradient(Point) const override { return {}; }
  Point StokesVelocityLaplacian(Point) const override { return {}; }
  double StokesPressure(Point) const override { return 0.0; }
  Point StokesPressureGradient(Point) const override { return {}; }
  double DarcyPressure(Point) const override { return 0.0; }
  Point DarcyPressureGradient(Point) const override { return {}; }
  double DarcyPressureLaplacian(Point) const override { return 0.0; }
};

// Constant Darcy source 1: violates the compatibility condition.
class IncompatibleCase final : public ManufacturedCase
{
public:
  explicit IncompatibleCase(PhysicalParams params = {}) : ManufacturedCase(params) {}

  Point StokesVelocity(Point) const override { return {}; }
  Gradient StokesVelocityGradient(Point) const override { return {}; }
  Point StokesVelocityLaplacian(Point) const override { return {}; }
  double StokesPressure(Point) const override { return 0.0; }
  Point StokesPressureGradient(Point) const override { return {}; }
  // p_D = -tau y^2 / 2 gives f_D = 1.
  double DarcyPressure(Point x) const override { return -0.5 * Params().tau * x.y * x.y; }
  Point DarcyPressureGradient(Point x) const override { return {0.0, -Params().tau * x.y}; }
  double DarcyPressureLaplacian(Point) const override { return -Params().tau; }
};

}  // namespace sdarcy

#endif  // SDARCY_MANUFACTURED_HPP
