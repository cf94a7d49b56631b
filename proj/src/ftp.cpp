#include "sdarcy/ftp.hpp"

#include <cmath>
#include <sstream>
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

}  // namespace

DarcySubsolver::DarcySubsolver(const CoupledSpaces &spaces, const DarcyForms &forms,
                               const DarcySolverOptions &opts, double tau)
  : opts_(opts), nflux_(static_cast<int>(forms.A.rows())), np_(static_cast<int>(forms.B.rows())),
    interior_(forms.interior), sigma_(forms.sigma)
{
  const std::vector<int> all_p = Range(np_);
  a00_ = Submatrix(forms.A, interior_, interior_);
  a0s_ = Submatrix(forms.A, interior_, sigma_);
  ass_ = Submatrix(forms.A, sigma_, sigma_);
  b0_ = Submatrix(forms.B, all_p, interior_);
  bs_ = Submatrix(forms.B, all_p, sigma_);
  m_ = forms.M;
  w_ = m_ * Vector::Ones(np_);
  we_ = w_.sum();
  const int n0 = static_cast<int>(interior_.size());

  if (opts_.mode == DarcySolveMode::Exact)
  {
    // Basis of L^h_0: drop the last dof and fix it through w'p = 0.
    std::vector<Triplet> tz;
    for (int i = 0; i + 1 < np_; i++)
    {
      tz.emplace_back(i, i, 1.0);
      tz.emplace_back(np_ - 1, i, -w_[i] / w_[np_ - 1]);
    }
    z_ = SparseMatrix(np_, np_ - 1);
    z_.setFromTriplets(tz.begin(), tz.end());
    const SparseMatrix bz = z_.transpose() * b0_;
    std::vector<Triplet> tk;
    for (int k = 0; k < a00_.outerSize(); k++)
    {
      for (SparseMatrix::InnerIterator it(a00_, k); it; ++it)
      {
        tk.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (int k = 0; k < bz.outerSize(); k++)
    {
      for (SparseMatrix::InnerIterator it(bz, k); it; ++it)
      {
        tk.emplace_back(n0 + it.row(), it.col(), -it.value());
        tk.emplace_back(it.col(), n0 + it.row(), -it.value());
      }
    }
    SparseMatrix kmat(n0 + np_ - 1, n0 + np_ - 1);
    kmat.setFromTriplets(tk.begin(), tk.end());
    lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
    lu_->compute(kmat);
    if (lu_->info() != Eigen::Success)
    {
      throw SolverFailure("DarcySubsolver: saddle point matrix is singular");
    }
    return;
  }

  // Quotient operator [A00, -B0'Q; -Q'B0, 0].
  auto a00 = std::make_shared<const SparseMatrix>(a00_);
  auto b0 = std::make_shared<const SparseMatrix>(b0_);
  const Vector w = w_;
  const double we = we_;
  const int np = np_;
  op_ = LinearOperator(n0 + np,
                       [=](const Vector &x, Vector &y)
                       {
                         y.resize(n0 + np);
                         const Vector u = x.head(n0);
                         Vector p = x.tail(np);
                         p.array() -= w.dot(p) / we;  // Q p
                         Vector g = *b0 * u;
                         g -= w * (g.sum() / we);  // Q' g
                         y.head(n0) = *a00 * u - b0->transpose() * p;
                         y.tail(np) = -g;
                       });

  LinearOperator flux_inv;
  const SparseMatrix adplusd = forms.A + forms.D;
  if (opts_.block == InnerBlock::Direct)
  {
    flux_inv = DirectInverse(Submatrix(adplusd, interior_, interior_));
  }
  else
  {
    hx_counters_ = std::make_shared<HxCounters>();
    const HxTransfer t = BuildHxTransfer(*spaces.flux, interior_, adplusd, tau);
    flux_inv = HxInverse(t,
                         opts_.block == InnerBlock::HxDirect ? LaplaceSolver::Direct
                                                             : LaplaceSolver::Bpx,
                         spaces.darcy_levels, hx_counters_);
  }
  // A discontinuous pressure mass is block diagonal, so its inverse is as cheap as a diagonal one.
  MassMode mass = opts_.mass;
  if (mass == MassMode::Auto && !spaces.darcy_pressure->IsContinuous())
  {
    mass = MassMode::Exact;
  }
  pinv_ = BlockDiagonal(flux_inv, MassInverse(m_, mass));
}

DarcyFields DarcySubsolver::Solve(const Vector &phi, const Vector &source, double rtol)
{
  const int n0 = static_cast<int>(interior_.size());
  Vector fu = -(a0s_ * phi);
  Vector fp = bs_ * phi;
  if (source.size() > 0)
  {
    fp -= source;
  }
  DarcyFields out;
  out.flux = Vector::Zero(nflux_);
  Vector u0, p;
  solves_++;
  if (opts_.mode == DarcySolveMode::Exact)
  {
    Vector rhs(n0 + np_ - 1);
    rhs.head(n0) = fu;
    rhs.tail(np_ - 1) = z_.transpose() * fp;
    const Vector x = lu_->solve(rhs);
    u0 = x.head(n0);
    p = z_ * x.tail(np_ - 1);
  }
  else
  {
    Vector rhs(n0 + np_);
    rhs.head(n0) = fu;
    fp -= w_ * (fp.sum() / we_);
    rhs.tail(np_) = fp;
    Vector x = Vector::Zero(n0 + np_);
    MinresOptions mo;
    mo.rtol = rtol > 0.0 ? rtol : opts_.rtol;
    mo.maxit = opts_.maxit;
    mo.norm = opts_.norm;
    const SolveStats st = Minres(op_, pinv_, rhs, x, mo);
    iterations_ += st.iterations;
    if (!st.converged)
    {
      std::ostringstream msg;
      msg << "inner MINRES did not converge in " << opts_.maxit << " iterations";
      throw SolverFailure(msg.str(), st.history.empty() ? -1.0 : st.history.back());
    }
    u0 = x.head(n0);
    p = x.tail(np_);
    p.array() -= w_.dot(p) / we_;
  }
  for (int i = 0; i < n0; i++)
  {
    out.flux[interior_[i]] = u0[i];
  }
  for (int i = 0; i < NumPhi(); i++)
  {
    out.flux[sigma_[i]] = phi[i];
  }
  out.pressure = p;
  return out;
}

Vector DarcySubsolver::InterfaceResidual(const DarcyFields &f) const
{
  const Vector u0 = Gather(f.flux, interior_);
  const Vector us = Gather(f.flux, sigma_);
  return a0s_.transpose() * u0 + ass_ * us - bs_.transpose() * f.pressure;
}

double DarcySubsolver::EquationResidual(const DarcyFields &f, const Vector &phi,
                                        const Vector &source) const
{
  const Vector u0 = Gather(f.flux, interior_);
  const Vector r1 = a00_ * u0 + a0s_ * phi - b0_.transpose() * f.pressure;
  Vector r2 = b0_ * u0 + bs_ * phi;
  if (source.size() > 0)
  {
    r2 -= source;
  }
  r2 -= w_ * (r2.sum() / we_);  // only mean-zero tests count
  return std::sqrt(r1.squaredNorm() + r2.squaredNorm());
}

FtpResult ApplyFtp(DarcySubsolver &solver, const Vector &phi)
{
  FtpResult r;
  if (phi.size() != solver.NumPhi())
  {
    throw InvalidArgument("ApplyFtp: datum has the wrong size");
  }
  r.fields = solver.Solve(phi);
  r.functional = solver.InterfaceResidual(r.fields);
  return r;
}

FtpResult SourceResidual(DarcySubsolver &solver, const Vector &source, double tol, double rtol)
{
  if (std::abs(source.sum()) > tol)
  {
    std::ostringstream msg;
    msg << "Darcy source violates the compatibility condition: int f_D = " << source.sum();
    throw InvalidCase(msg.str());
  }
  FtpResult r;
  r.fields = solver.Solve(Vector::Zero(solver.NumPhi()), source, rtol);
  r.functional = solver.InterfaceResidual(r.fields);
  return r;
}

Vector ApplyCS(DarcySubsolver &solver, const SparseMatrix &r_free, const Vector &u)
{
  const Vector phi = r_free * u;
  return r_free.transpose() * ApplyFtp(solver, phi).functional;
}

}  // namespace sdarcy
