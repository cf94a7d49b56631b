#include "sdarcy/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include "sdarcy/errors.hpp"

namespace sdarcy
{

LinearOperator LinearOperator::FromMatrix(SparseMatrix a)
{
  const int n = static_cast<int>(a.rows());
  return LinearOperator(n, [a = std::move(a)](const Vector &x, Vector &y) { y = a * x; });
}

LinearOperator LinearOperator::Identity(int size)
{
  return LinearOperator(size, [](const Vector &x, Vector &y) { y = x; });
}

double SymmetryDefect(const LinearOperator &a, int probes, unsigned seed)
{
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  auto random = [&]()
  {
    Vector v(a.Size());
    for (auto &c : v)
    {
      c = dist(gen);
    }
    return v;
  };
  double worst = 0.0;
  for (int p = 0; p < probes; p++)
  {
    const Vector x = random(), y = random();
    const Vector ax = a * x, ay = a * y;
    const double scale = std::max(ax.norm() * y.norm(), std::numeric_limits<double>::min());
    worst = std::max(worst, std::abs(ax.dot(y) - x.dot(ay)) / scale);
  }
  return worst;
}

SolveStats Minres(const LinearOperator &a, const LinearOperator &pinv, const Vector &b, Vector &x,
                  const MinresOptions &opts)
{
  const auto start = std::chrono::steady_clock::now();
  const int n = a.Size();
  const bool euclid = opts.norm == ResidualNorm::Euclidean;
  SolveStats stats;
  auto finish = [&]()
  {
    stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return stats;
  };

  if (x.size() != n)
  {
    x = Vector::Zero(n);
  }
  Vector r1 = b - a * x;
  Vector y = pinv * r1;
  const double r1y = r1.dot(y);
  if (r1y < 0.0)
  {
    throw SolverFailure("MINRES: indefinite preconditioner");
  }
  const double beta1 = std::sqrt(r1y);

  // Reference value of the stopping norm.
  double ref = 0.0;
  if (opts.reference == ResidualReference::InitialResidual)
  {
    ref = euclid ? r1.norm() : beta1;
  }
  else
  {
    ref = euclid ? b.norm() : std::sqrt(std::max(0.0, b.dot(pinv * b)));
  }
  const double res0 = euclid ? r1.norm() : beta1;
  if (res0 == 0.0 || ref == 0.0)
  {
    // Exact initial guess, or b = 0 measured against |b| (the solution is zero).
    if (res0 != 0.0)
    {
      x.setZero();
    }
    stats.converged = true;
    stats.history.push_back(0.0);
    return finish();
  }
  stats.history.push_back(res0 / ref);
  if (res0 <= opts.rtol * ref)
  {
    stats.converged = true;
    return finish();
  }

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Vector r2 = r1, v(n), w = Vector::Zero(n), w1(n), w2 = Vector::Zero(n);
  Vector res = r1;  // Euclidean residual vector
  for (int it = 1; it <= opts.maxit; it++)
  {
    v = y / beta;
    y = a * v;
    if (it >= 2)
    {
      y -= (beta / oldb) * r1;
    }
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1.swap(r2);
    r2 = y;
    y = pinv * r2;
    oldb = beta;
    const double r2y = r2.dot(y);
    if (r2y < 0.0)
    {
      throw SolverFailure("MINRES: indefinite preconditioner");
    }
    beta = std::sqrt(r2y);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::epsilon());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1.swap(w2);
    w2.swap(w);
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;

    double current = phibar;
    if (euclid)
    {
      // r_k = s_k^2 r_{k-1} - phibar_k c_k u_{k+1}, u_{k+1} = r2 / beta.
      res *= sn * sn;
      if (beta > 0.0)
      {
        res -= (phibar * cs / beta) * r2;
      }
      current = res.norm();
    }
    stats.iterations = it;
    stats.history.push_back(current / ref);
    if (current <= opts.rtol * ref || beta == 0.0)
    {
      stats.converged = true;
      break;
    }
  }
  return finish();
}

Vector LanczosRitzValues(const LinearOperator &op, const LinearOperator &g, int steps,
                         unsigned seed)
{
  const int n = op.Size();
  steps = std::min(steps, n);
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  Vector q(n);
  for (auto &c : q)
  {
    c = dist(gen);
  }
  // Basis vectors q_j and their images G q_j.
  std::vector<Vector> qs, gqs;
  Vector gq = g * q;
  double nrm = std::sqrt(q.dot(gq));
  q /= nrm;
  gq /= nrm;
  std::vector<double> alpha, beta;
  for (int j = 0; j < steps; j++)
  {
    qs.push_back(q);
    gqs.push_back(gq);
    Vector w = op * q;
    const double a = gq.dot(w);
    alpha.push_back(a);
    // Full reorthogonalization in the G inner product (twice is enough).
    for (int pass = 0; pass < 2; pass++)
    {
      for (std::size_t i = 0; i < qs.size(); i++)
      {
        w -= gqs[i].dot(w) * qs[i];
      }
    }
    Vector gw = g * w;
    const double b2 = w.dot(gw);
    const double b = std::sqrt(std::max(b2, 0.0));
    if (j + 1 == steps || b <= 1e-12 * std::abs(a) || b == 0.0)
    {
      break;
    }
    beta.push_back(b);
    q = w / b;
    gq = gw / b;
  }
  const int m = static_cast<int>(alpha.size());
  DenseMatrix t = DenseMatrix::Zero(m, m);
  for (int i = 0; i < m; i++)
  {
    t(i, i) = alpha[i];
    if (i + 1 < m)
    {
      t(i, i + 1) = t(i + 1, i) = beta[i];
    }
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(t, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace sdarcy
