#include "sdarcy/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include "sdarcy/errors.hpp"

namespace sdarcy
{

namespace
{

std::vector<int> Range(int n)
{
  std::vector<int> r(n);
  for (int i = 0; i < n; i++)
  {
    r[i] = i;
  }
  return r;
}

// Appends scale * a (or its transpose) at the given block offset.
void AddBlock(std::vector<Triplet> &trips, const SparseMatrix &a, int row0, int col0,
              double scale, bool transpose = false)
{
  for (int k = 0; k < a.outerSize(); k++)
  {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
    {
      const int r = static_cast<int>(transpose ? it.col() : it.row());
      const int c = static_cast<int>(transpose ? it.row() : it.col());
      trips.emplace_back(row0 + r, col0 + c, scale * it.value());
    }
  }
}

double Integral(const SparseMatrix &mass, const Vector &p)
{
  return (mass * Vector::Ones(p.size())).dot(p);
}

void Finalize(const Discretization &disc, SolveReport &r)
{
  const double area_s = disc.stokes.M.sum();
  const double area_d = disc.darcy.M.sum();
  const double total = Integral(disc.stokes.M, r.stokes_pressure) +
                       Integral(disc.darcy.M, r.darcy_pressure);
  r.global_shift = -total / (area_s + area_d);
  r.dofs = disc.spaces.TotalDofs();
  r.h = 1.0 / disc.spaces.n;
}

DarcySolverOptions InnerOptions(const SolveConfig &c)
{
  DarcySolverOptions o;
  o.mode = c.inner_mode;
  o.block = c.combo.inner;
  o.mass = c.combo.mass;
  o.rtol = c.inner_rtol;
  o.maxit = c.inner_maxit;
  o.norm = c.inner_norm;
  return o;
}

LinearOperator VelocityInverse(const Discretization &disc, OuterBlock block)
{
  if (block == OuterBlock::Direct)
  {
    return DirectInverse(disc.stokes.A0);
  }
  return BpxInverse(disc.stokes.A0, NodalProlongations(disc.spaces.stokes_levels,
                                                       *disc.spaces.velocity, KeepNotGammaS, 2));
}

}  // namespace

Discretization Discretize(ElementPair pair, int n, const PhysicalParams &params)
{
  params.Validate();
  Discretization d;
  d.params = params;
  d.spaces = BuildSpaces(pair, n);
  d.stokes = AssembleStokes(*d.spaces.velocity, *d.spaces.stokes_pressure, params);
  d.darcy = AssembleDarcy(*d.spaces.flux, *d.spaces.darcy_pressure, params);
  d.iface = AssembleInterface(*d.spaces.velocity, *d.spaces.flux);
  d.r_free = Submatrix(d.iface.R, Range(static_cast<int>(d.iface.R.rows())), d.stokes.free);
  return d;
}

SolveReport SolveCoupled(const SolveConfig &config, const ManufacturedCase &mcase)
{
  return SolveCoupled(Discretize(config.pair, config.n, mcase.Params()), mcase, config);
}

SolveReport SolveCoupled(const Discretization &disc, const ManufacturedCase &mcase,
                         const SolveConfig &config)
{
  const auto start = std::chrono::steady_clock::now();
  const Loads loads = AssembleLoads(disc.spaces, mcase);
  if (std::abs(loads.darcy.sum()) > 1e-10)
  {
    throw InvalidCase("SolveCoupled: discrete Darcy source has nonzero mean");
  }
  SolveReport rep;
  const int nu = disc.NumFreeVelocity();
  const int np = disc.NumStokesPressure();
  const Vector fs = Gather(loads.stokes, disc.stokes.free);

  DarcySubsolver sub(disc.spaces, disc.darcy, InnerOptions(config), disc.params.tau);
  const SparseMatrix &r0 = disc.r_free;
  const SparseMatrix &a0 = disc.stokes.A0;
  const SparseMatrix &b0 = disc.stokes.B0;

  const LinearOperator pinv =
    BlockDiagonal(VelocityInverse(disc, config.combo.outer),
                  MassInverse(disc.stokes.M, config.combo.mass));

  MinresOptions mo;
  mo.rtol = config.outer_rtol;
  mo.maxit = config.outer_maxit;
  mo.norm = config.outer_norm;
  mo.reference = config.outer_reference;

  try
  {
    const FtpResult src = SourceResidual(sub, loads.darcy, 1e-10, config.recovery_rtol);
    Vector rhs = Vector::Zero(nu + np);
    rhs.head(nu) = fs - r0.transpose() * src.functional;

    Vector x = Vector::Zero(nu + np);
    if (config.initialize)
    {
      // Uncoupled Stokes problem with a homogeneous natural condition on the interface.
      const LinearOperator stokes(nu + np,
                                  [&](const Vector &v, Vector &y)
                                  {
                                    y.resize(nu + np);
                                    y.head(nu) = a0 * v.head(nu) - b0.transpose() * v.tail(np);
                                    y.tail(np) = -(b0 * v.head(nu));
                                  });
      Vector init_rhs = Vector::Zero(nu + np);
      init_rhs.head(nu) = Gather(loads.stokes_body, disc.stokes.free);
      const SolveStats st = Minres(stokes, pinv, init_rhs, x, mo);
      rep.init_iterations = st.iterations;
    }

    sub.ResetCounters();
    const LinearOperator outer(nu + np,
                               [&](const Vector &v, Vector &y)
                               {
                                 y.resize(nu + np);
                                 const Vector u = v.head(nu);
                                 y.head(nu) = a0 * u + ApplyCS(sub, r0, u) -
                                              b0.transpose() * v.tail(np);
                                 y.tail(np) = -(b0 * u);
                               });
    const SolveStats st = Minres(outer, pinv, rhs, x, mo);
    rep.outer_iterations = st.iterations;
    rep.converged = st.converged;
    rep.history = st.history;
    rep.inner_solves = sub.Solves();
    rep.mean_inner = sub.MeanIterations();
    if (!st.converged)
    {
      rep.failure = "outer MINRES did not converge";
    }

    // Darcy fields from the splitting u_D = u^f + u^{R u_S}.
    const Vector u = x.head(nu);
    const DarcyFields lift = sub.Solve(r0 * u, Vector(), config.recovery_rtol);
    rep.flux = src.fields.flux + lift.flux;
    rep.darcy_pressure = src.fields.pressure + lift.pressure;
    rep.velocity = Vector::Zero(disc.stokes.A.rows());
    ScatterAdd(u, disc.stokes.free, rep.velocity);
    rep.stokes_pressure = x.tail(np);
  }
  catch (const SolverFailure &e)
  {
    rep.converged = false;
    rep.failure = e.what();
    rep.velocity = Vector::Zero(disc.stokes.A.rows());
    rep.stokes_pressure = Vector::Zero(np);
    rep.flux = Vector::Zero(disc.darcy.A.rows());
    rep.darcy_pressure = Vector::Zero(disc.darcy.M.rows());
  }
  Finalize(disc, rep);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

MonolithicSystem AssembleMonolithic(const Discretization &disc, const Loads &loads)
{
  const DarcyForms &d = disc.darcy;
  const int nu = disc.NumFreeVelocity();
  const int np = disc.NumStokesPressure();
  const int n0 = static_cast<int>(d.interior.size());
  const int npd = static_cast<int>(d.M.rows());
  const std::vector<int> all_p = Range(npd);

  MonolithicSystem sys;
  const Vector w = d.M * Vector::Ones(npd);
  std::vector<Triplet> tz;
  for (int i = 0; i + 1 < npd; i++)
  {
    tz.emplace_back(i, i, 1.0);
    tz.emplace_back(npd - 1, i, -w[i] / w[npd - 1]);
  }
  sys.z = SparseMatrix(npd, npd - 1);
  sys.z.setFromTriplets(tz.begin(), tz.end());

  const SparseMatrix &r0 = disc.r_free;
  const SparseMatrix a00 = Submatrix(d.A, d.interior, d.interior);
  const SparseMatrix a0s = Submatrix(d.A, d.interior, d.sigma);
  const SparseMatrix ass = Submatrix(d.A, d.sigma, d.sigma);
  const SparseMatrix bd0 = SparseMatrix(sys.z.transpose()) * Submatrix(d.B, all_p, d.interior);
  const SparseMatrix bds = SparseMatrix(sys.z.transpose()) * Submatrix(d.B, all_p, d.sigma);

  // Blocks: velocity, Stokes pressure, interior flux, reduced Darcy pressure.
  const int ou = 0, op = nu, o0 = nu + np, od = nu + np + n0;
  const int size = od + npd - 1;
  std::vector<Triplet> t;
  const SparseMatrix rar = SparseMatrix(r0.transpose()) * ass * r0;
  AddBlock(t, disc.stokes.A0, ou, ou, 1.0);
  AddBlock(t, rar, ou, ou, 1.0);
  AddBlock(t, disc.stokes.B0, op, ou, -1.0);
  AddBlock(t, disc.stokes.B0, ou, op, -1.0, true);
  const SparseMatrix a0sr = a0s * r0;
  AddBlock(t, a0sr, o0, ou, 1.0);
  AddBlock(t, a0sr, ou, o0, 1.0, true);
  AddBlock(t, a00, o0, o0, 1.0);
  const SparseMatrix bdsr = bds * r0;
  AddBlock(t, bdsr, od, ou, -1.0);
  AddBlock(t, bdsr, ou, od, -1.0, true);
  AddBlock(t, bd0, od, o0, -1.0);
  AddBlock(t, bd0, o0, od, -1.0, true);
  sys.matrix = SparseMatrix(size, size);
  sys.matrix.setFromTriplets(t.begin(), t.end());

  sys.rhs = Vector::Zero(size);
  sys.rhs.segment(ou, nu) = Gather(loads.stokes, disc.stokes.free);
  sys.rhs.segment(od, npd - 1) = -(sys.z.transpose() * loads.darcy);
  return sys;
}

SolveReport SolveMonolithic(const Discretization &disc, const ManufacturedCase &mcase)
{
  const auto start = std::chrono::steady_clock::now();
  const Loads loads = AssembleLoads(disc.spaces, mcase);
  const MonolithicSystem sys = AssembleMonolithic(disc, loads);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(sys.matrix);
  if (lu.info() != Eigen::Success)
  {
    throw SolverFailure("SolveMonolithic: coupled matrix is singular");
  }
  const Vector x = lu.solve(sys.rhs);

  const int nu = disc.NumFreeVelocity();
  const int np = disc.NumStokesPressure();
  const int n0 = static_cast<int>(disc.darcy.interior.size());
  SolveReport rep;
  rep.converged = true;
  rep.velocity = Vector::Zero(disc.stokes.A.rows());
  ScatterAdd(x.head(nu), disc.stokes.free, rep.velocity);
  rep.stokes_pressure = x.segment(nu, np);
  rep.flux = Vector::Zero(disc.darcy.A.rows());
  ScatterAdd(x.segment(nu + np, n0), disc.darcy.interior, rep.flux);
  ScatterAdd(disc.r_free * x.head(nu), disc.darcy.sigma, rep.flux);
  rep.darcy_pressure = sys.z * x.tail(sys.z.cols());
  Finalize(disc, rep);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

DenseMatrix ExplicitFtp(const Discretization &disc)
{
  DarcySolverOptions o;
  o.mode = DarcySolveMode::Exact;
  DarcySubsolver sub(disc.spaces, disc.darcy, o, disc.params.tau);
  const int m = sub.NumPhi();
  DenseMatrix f(m, m);
  for (int j = 0; j < m; j++)
  {
    f.col(j) = ApplyFtp(sub, Vector::Unit(m, j)).functional;
  }
  return f;
}

SparseMatrix ExplicitOuterMatrix(const Discretization &disc)
{
  const int nu = disc.NumFreeVelocity();
  const int np = disc.NumStokesPressure();
  const SparseMatrix fs = ExplicitFtp(disc).sparseView();
  const SparseMatrix cs = SparseMatrix(disc.r_free.transpose()) * fs * disc.r_free;
  std::vector<Triplet> t;
  AddBlock(t, disc.stokes.A0, 0, 0, 1.0);
  AddBlock(t, cs, 0, 0, 1.0);
  AddBlock(t, disc.stokes.B0, nu, 0, -1.0);
  AddBlock(t, disc.stokes.B0, 0, nu, -1.0, true);
  SparseMatrix a(nu + np, nu + np);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

ConditionEstimate SpdCondition(const SparseMatrix &a, const LinearOperator &pinv, int steps,
                               unsigned seed)
{
  const LinearOperator op(static_cast<int>(a.rows()),
                          [&](const Vector &x, Vector &y) { y = pinv * Vector(a * x); });
  const Vector ritz = LanczosRitzValues(op, LinearOperator::FromMatrix(a), steps, seed);
  return {ritz.minCoeff(), ritz.maxCoeff()};
}

ConditionEstimate OuterCondition(const Discretization &disc, int steps, unsigned seed)
{
  const int nu = disc.NumFreeVelocity();
  const int np = disc.NumStokesPressure();
  const SparseMatrix a = ExplicitOuterMatrix(disc);
  std::vector<Triplet> t;
  AddBlock(t, disc.stokes.A0, 0, 0, 1.0);
  AddBlock(t, disc.stokes.M, nu, nu, 1.0);
  SparseMatrix p(nu + np, nu + np);
  p.setFromTriplets(t.begin(), t.end());

  const LinearOperator pinv = BlockDiagonal(DirectInverse(disc.stokes.A0),
                                            DirectInverse(disc.stokes.M));
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
  {
    throw SolverFailure("OuterCondition: outer matrix is singular");
  }
  const LinearOperator g = LinearOperator::FromMatrix(p);
  // Both P^{-1} A and A^{-1} P are self-adjoint in the P inner product.
  const LinearOperator forward(nu + np, [&](const Vector &x, Vector &y) { y = pinv * Vector(a * x); });
  const LinearOperator inverse(nu + np, [&](const Vector &x, Vector &y) { y = lu.solve(Vector(p * x)); });
  const Vector hi = LanczosRitzValues(forward, g, steps, seed);
  const Vector lo = LanczosRitzValues(inverse, g, steps, seed);
  return {1.0 / lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff()};
}

ConditionEstimate DarcyFluxCondition(const Discretization &disc, InnerBlock block, int steps,
                                     unsigned seed)
{
  const SparseMatrix full = disc.darcy.A + disc.darcy.D;
  const SparseMatrix a = Submatrix(full, disc.darcy.interior, disc.darcy.interior);
  LinearOperator pinv;
  if (block == InnerBlock::Direct)
  {
    pinv = DirectInverse(a);
  }
  else
  {
    const HxTransfer t = BuildHxTransfer(*disc.spaces.flux, disc.darcy.interior, full,
                                         disc.params.tau);
    pinv = HxInverse(t, block == InnerBlock::HxDirect ? LaplaceSolver::Direct : LaplaceSolver::Bpx,
                     disc.spaces.darcy_levels);
  }
  return SpdCondition(a, pinv, steps, seed);
}

double DiscreteInfSup(const SparseMatrix &b, const SparseMatrix &x, const SparseMatrix &m)
{
  Eigen::SimplicialLLT<SparseMatrix> llt(x);
  if (llt.info() != Eigen::Success)
  {
    throw InvalidArgument("DiscreteInfSup: velocity norm matrix is not positive definite");
  }
  const DenseMatrix bt = DenseMatrix(b.transpose());
  const DenseMatrix xinv_bt = llt.solve(bt);
  DenseMatrix s = DenseMatrix(b) * xinv_bt;
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(s, DenseMatrix(m), Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  const double cut = 1e-10 * ev.maxCoeff();
  for (int i = 0; i < ev.size(); i++)
  {
    if (ev[i] > cut)
    {
      return std::sqrt(ev[i]);
    }
  }
  return 0.0;
}

double StokesInfSup(const ScalarSpace &velocity, const ScalarSpace &pressure)
{
  const StokesForms f = AssembleStokes(velocity, pressure, PhysicalParams{});
  const VectorLayout lay{velocity.NumDofs()};
  std::vector<int> inner;
  for (int c = 0; c < 2; c++)
  {
    for (int i = 0; i < velocity.NumDofs(); i++)
    {
      if (velocity.Classes()[i] == DofClass::Interior)
      {
        inner.push_back(lay.Dof(c, i));
      }
    }
  }
  const std::vector<int> all_p = Range(pressure.NumDofs());
  return DiscreteInfSup(Submatrix(f.B, all_p, inner),
                        Submatrix(VectorH1Matrix(velocity), inner, inner), f.M);
}

double DarcyInfSup(const FluxSpace &flux, const ScalarSpace &pressure)
{
  const DarcyForms f = AssembleDarcy(flux, pressure, PhysicalParams{});
  const std::vector<int> all_p = Range(pressure.NumDofs());
  const SparseMatrix x = f.A + f.D;
  return DiscreteInfSup(Submatrix(f.B, all_p, f.interior), Submatrix(x, f.interior, f.interior),
                        f.M);
}

InfSupPair PairInfSup(ElementPair pair, int n)
{
  const CoupledSpaces s = BuildSpaces(pair, n);
  return {StokesInfSup(*s.velocity, *s.stokes_pressure),
          DarcyInfSup(*s.flux, *s.darcy_pressure)};
}

double UnstableInfSup(int n)
{
  const CoupledSpaces s = BuildSpaces(ElementPair::MiniBdm1, n);
  const ScalarSpace p1(s.stokes_levels.back(), ElementFamily::P1c);
  return StokesInfSup(p1, p1);
}

}  // namespace sdarcy
