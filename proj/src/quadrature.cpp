#include "sdarcy/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include "sdarcy/errors.hpp"

namespace sdarcy
{

namespace
{

LineRule MakeGaussLegendre(int n)
{
  // Newton iteration on P_n over [-1, 1], then mapped to [0, 1].
  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; i++)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; it++)
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; k++)
      {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1)
      {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
      {
        break;
      }
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; k++)
    {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

TriangleRule MakeTriangleRule(int degree)
{
  // Duffy map (s, t) -> (s (1 - t), t) with Jacobian (1 - t).
  const int n = std::max(1, (degree + 2 + 1) / 2);
  const LineRule &g = GaussLegendre(n);
  TriangleRule rule;
  for (int j = 0; j < n; j++)
  {
    for (int i = 0; i < n; i++)
    {
      const double s = g.points[i], t = g.points[j];
      const double xi = s * (1.0 - t), eta = t;
      rule.points.push_back({1.0 - xi - eta, xi, eta});
      rule.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - t));
    }
  }
  return rule;
}

}  // namespace

const LineRule &GaussLegendre(int npoints)
{
  if (npoints < 1 || npoints > 64)
  {
    throw InvalidArgument("GaussLegendre: unsupported number of points");
  }
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<LineRule>> cache;
  std::lock_guard lock(mutex);
  auto &slot = cache[npoints];
  if (!slot)
  {
    slot = std::make_unique<LineRule>(MakeGaussLegendre(npoints));
  }
  return *slot;
}

const TriangleRule &TriangleQuadrature(int degree)
{
  if (degree < 0 || degree > 60)
  {
    throw InvalidArgument("TriangleQuadrature: unsupported degree");
  }
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<TriangleRule>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(degree);
    if (it != cache.end())
    {
      return *it->second;
    }
  }
  auto rule = std::make_unique<TriangleRule>(MakeTriangleRule(degree));
  std::lock_guard lock(mutex);
  auto &slot = cache[degree];
  if (!slot)
  {
    slot = std::move(rule);
  }
  return *slot;
}

}  // namespace sdarcy
