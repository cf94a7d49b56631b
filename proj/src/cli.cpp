#include "sdarcy/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include "sdarcy/errors.hpp"

namespace sdarcy
{

namespace
{

std::string Trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
  {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int ParseInt(const std::string &key, const std::string &v)
{
  std::size_t used = 0;
  int r = 0;
  try
  {
    r = std::stoi(v, &used);
  }
  catch (const std::exception &)
  {
    used = 0;
  }
  if (used == 0 || used != v.size())
  {
    throw InvalidArgument("bad integer for " + key + ": " + v);
  }
  return r;
}

double ParseDouble(const std::string &key, const std::string &v)
{
  std::size_t used = 0;
  double r = 0.0;
  try
  {
    r = std::stod(v, &used);
  }
  catch (const std::exception &)
  {
    used = 0;
  }
  if (used == 0 || used != v.size() || !(r > 0.0))
  {
    throw InvalidArgument("bad positive number for " + key + ": " + v);
  }
  return r;
}

Vector Random(int n, std::mt19937 &gen)
{
  std::normal_distribution<double> dist;
  Vector v(n);
  for (int i = 0; i < n; i++)
  {
    v[i] = dist(gen);
  }
  return v;
}

std::vector<PrecondCombo> CombosOf(const ExperimentSpec &spec)
{
  return spec.combos.empty() ? std::vector<PrecondCombo>{PrecondCombo{}} : spec.combos;
}

SolveConfig ConfigFor(const ExperimentSpec &spec, int n, const PrecondCombo &combo)
{
  SolveConfig c;
  c.pair = spec.pair;
  c.n = n;
  c.combo = combo;
  c.outer_rtol = spec.outer_rtol;
  c.inner_rtol = spec.inner_rtol;
  c.outer_maxit = spec.outer_maxit;
  return c;
}

double RelDiff(const Vector &a, const Vector &b, const SparseMatrix &m)
{
  const Vector d = a - b;
  const double ref = b.dot(m * b);
  return ref > 0.0 ? std::sqrt(d.dot(m * d) / ref) : std::sqrt(d.dot(m * d));
}

double MaxAbs(const SparseMatrix &a)
{
  return a.nonZeros() ? a.coeffs().cwiseAbs().maxCoeff() : 0.0;
}

// One line per property: "PASS name value" or "FAIL name value".
class Checklist
{
public:
  explicit Checklist(std::ostream &os) : os_(os) {}
  void Report(const std::string &name, bool ok, double value)
  {
    os_ << (ok ? "PASS " : "FAIL ") << name << " " << Scientific(value) << "\n";
    all_ = all_ && ok;
  }
  bool AllPassed() const { return all_; }

private:
  std::ostream &os_;
  bool all_ = true;
};

// Random probes: largest symmetry defect and smallest Rayleigh quotient x'Px / x'x.
void ProbeSpd(Checklist &list, const std::string &name, const LinearOperator &p,
              std::mt19937 &gen)
{
  double rayleigh = INFINITY;
  for (int k = 0; k < 10; k++)
  {
    const Vector x = Random(p.Size(), gen);
    rayleigh = std::min(rayleigh, x.dot(p * x) / x.squaredNorm());
  }
  const double defect = SymmetryDefect(p, 5, gen());
  list.Report(name + ".symmetry", defect <= 1e-10, defect);
  list.Report(name + ".positive", rayleigh > 0.0, rayleigh);
}

}  // namespace

void SetOption(ExperimentSpec &spec, const std::string &key, const std::string &value)
{
  std::string k = key;
  std::replace(k.begin(), k.end(), '-', '_');
  if (k == "pair")
  {
    spec.pair = ParseElementPair(value);
  }
  else if (k == "nmin")
  {
    spec.nmin = ParseInt(k, value);
  }
  else if (k == "nmax")
  {
    spec.nmax = ParseInt(k, value);
  }
  else if (k == "combo")
  {
    spec.combos.push_back(ParseCombo(value));
  }
  else if (k == "outer_rtol")
  {
    spec.outer_rtol = ParseDouble(k, value);
  }
  else if (k == "inner_rtol")
  {
    spec.inner_rtol = ParseDouble(k, value);
  }
  else if (k == "format")
  {
    spec.format = ParseTableFormat(value);
  }
  else if (k == "out")
  {
    spec.out = value;
  }
  else if (k == "outer_maxit")
  {
    spec.outer_maxit = ParseInt(k, value);
    if (spec.outer_maxit < 1)
    {
      throw InvalidArgument("outer_maxit must be positive");
    }
  }
  else if (k == "seed")
  {
    const int s = ParseInt(k, value);
    if (s < 0)
    {
      throw InvalidArgument("seed must be nonnegative");
    }
    spec.seed = static_cast<unsigned>(s);
  }
  else
  {
    throw InvalidArgument("unknown configuration key: " + key);
  }
}

void ReadConfig(std::istream &is, ExperimentSpec &spec)
{
  std::string line;
  int number = 0;
  while (std::getline(is, line))
  {
    number++;
    line = Trim(line.substr(0, line.find('#')));
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw InvalidArgument("config line " + std::to_string(number) + ": expected key = value");
    }
    SetOption(spec, Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
}

std::vector<int> MeshSizes(const ExperimentSpec &spec)
{
  if (spec.nmin < 4 || spec.nmax < spec.nmin)
  {
    throw InvalidArgument("mesh range requires 4 <= nmin <= nmax");
  }
  if (spec.nmax > kMaxMeshSize)
  {
    throw InvalidArgument("nmax exceeds the memory guard of " + std::to_string(kMaxMeshSize));
  }
  std::vector<int> ns;
  for (int n = spec.nmin; n <= spec.nmax; n *= 2)
  {
    ns.push_back(n);
  }
  return ns;
}

std::string ResolveOutputPath(const std::string &out, const char *override_dir)
{
  if (out.empty() || override_dir == nullptr || *override_dir == '\0')
  {
    return out;
  }
  const std::filesystem::path p(out);
  if (p.is_absolute())
  {
    return out;
  }
  return (std::filesystem::path(override_dir) / p).string();
}

double FieldDifferences::Max() const
{
  return std::max({u_s, p_s, u_d, p_d});
}

FieldDifferences CompareSolutions(const Discretization &disc, const SolveReport &a,
                                  const SolveReport &reference)
{
  // A_D / tau is the flux mass; adding D gives the H(div) graph norm.
  const SparseMatrix hdiv = SparseMatrix(disc.darcy.A / disc.params.tau) + disc.darcy.D;
  FieldDifferences d;
  d.u_s = RelDiff(a.velocity, reference.velocity, VectorH1Matrix(*disc.spaces.velocity));
  d.p_s = RelDiff(a.stokes_pressure, reference.stokes_pressure, disc.stokes.M);
  d.u_d = RelDiff(a.flux, reference.flux, hdiv);
  d.p_d = RelDiff(a.darcy_pressure, reference.darcy_pressure, disc.darcy.M);
  return d;
}

int RunConvergence(const ExperimentSpec &spec, std::ostream &os, std::ostream &log)
{
  const PrecondCombo combo = CombosOf(spec).front();
  const TrigonometricCase mc;
  std::vector<ConvergenceRow> rows;
  bool ok = true;
  for (int n : MeshSizes(spec))
  {
    const Discretization d = Discretize(spec.pair, n, mc.Params());
    const SolveReport r = SolveCoupled(d, mc, ConfigFor(spec, n, combo));
    ConvergenceRow row;
    row.errors = ComputeErrors(d, r, mc);
    row.failed = !r.converged;
    ok = ok && r.converged;
    rows.push_back(row);
    log << to_string(spec.pair) << " n=" << n << " " << to_string(combo) << " outer "
        << r.outer_iterations << (r.converged ? "" : " FAILED: " + r.failure) << "\n";
  }
  WriteConvergenceTable(os, rows, spec.format,
                        std::string("Convergence rates: ") + to_string(spec.pair));
  return ok ? 0 : 1;
}

int RunIterations(const ExperimentSpec &spec, std::ostream &os, std::ostream &log)
{
  const std::vector<PrecondCombo> combos = CombosOf(spec);
  const TrigonometricCase mc;
  std::vector<IterationRow> rows;
  bool ok = true;
  for (int n : MeshSizes(spec))
  {
    const Discretization d = Discretize(spec.pair, n, mc.Params());
    IterationRow row;
    row.dofs = d.spaces.TotalDofs();
    row.h = 1.0 / n;
    for (const PrecondCombo &combo : combos)
    {
      const SolveReport r = SolveCoupled(d, mc, ConfigFor(spec, n, combo));
      row.cells.push_back({r.outer_iterations, r.mean_inner, !r.converged});
      ok = ok && r.converged;
      log << to_string(spec.pair) << " n=" << n << " " << to_string(combo) << " "
          << FormatIterationCell(row.cells.back()) << "\n";
    }
    rows.push_back(row);
  }
  std::vector<std::string> names;
  for (const PrecondCombo &c : combos)
  {
    names.push_back(to_string(c));
  }
  WriteIterationTable(os, names, rows, spec.format,
                      std::string("Number of iterations: ") + to_string(spec.pair));
  return ok ? 0 : 1;
}

int RunOracle(const ExperimentSpec &spec, std::ostream &os, std::ostream &log)
{
  const TrigonometricCase mc;
  bool ok = true;
  os << "n,combo,outer,d(u_S),d(p_S),d(u_D),d(p_D)\n";
  for (int n : MeshSizes(spec))
  {
    const Discretization d = Discretize(spec.pair, n, mc.Params());
    const SolveReport oracle = SolveMonolithic(d, mc);
    for (const PrecondCombo &combo : CombosOf(spec))
    {
      const SolveReport r = SolveCoupled(d, mc, ConfigFor(spec, n, combo));
      const FieldDifferences diff = CompareSolutions(d, r, oracle);
      ok = ok && r.converged;
      os << n << "," << to_string(combo) << "," << r.outer_iterations << ","
         << Scientific(diff.u_s) << "," << Scientific(diff.p_s) << "," << Scientific(diff.u_d)
         << "," << Scientific(diff.p_d) << "\n";
      log << to_string(spec.pair) << " n=" << n << " " << to_string(combo) << " max difference "
          << Scientific(diff.Max()) << "\n";
    }
  }
  return ok ? 0 : 1;
}

int RunCheck(const ExperimentSpec &spec, std::ostream &os, std::ostream &log)
{
  std::mt19937 gen(spec.seed);
  Checklist list(os);
  const int n = spec.nmin;
  const Discretization d = Discretize(spec.pair, n);
  log << "checking " << to_string(spec.pair) << " at n=" << n << "\n";

  // Flux-to-pressure map: symmetry and positive semidefiniteness.
  DarcySolverOptions exact;
  exact.mode = DarcySolveMode::Exact;
  DarcySubsolver sub(d.spaces, d.darcy, exact, d.params.tau);
  double asym = 0.0, minq = INFINITY;
  for (int k = 0; k < 10; k++)
  {
    const Vector phi = Random(sub.NumPhi(), gen), psi = Random(sub.NumPhi(), gen);
    const Vector fp = ApplyFtp(sub, phi).functional, fq = ApplyFtp(sub, psi).functional;
    const double scale = fp.norm() * psi.norm() + fq.norm() * phi.norm();
    asym = std::max(asym, std::abs(fp.dot(psi) - fq.dot(phi)) / scale);
    minq = std::min(minq, fp.dot(phi));
  }
  list.Report("ftp.symmetry", asym <= 1e-10, asym);
  list.Report("ftp.semidefinite", minq >= -1e-12, minq);

  // Auxiliary space transfers.
  const SparseMatrix full = d.darcy.A + d.darcy.D;
  const HxTransfer t = BuildHxTransfer(*d.spaces.flux, d.darcy.interior, full, d.params.tau);
  const SparseMatrix d0 = Submatrix(d.darcy.D, d.darcy.interior, d.darcy.interior);
  const double divcurl = MaxAbs(SparseMatrix(d0 * t.C)) / (MaxAbs(d0) * MaxAbs(t.C));
  list.Report("hx.div_curl", divcurl <= 1e-12, divcurl);
  list.Report("hx.curl_representation", t.curl_residual <= 1e-12, t.curl_residual);

  // Every preconditioner block.
  const SparseMatrix a00 = Submatrix(full, d.darcy.interior, d.darcy.interior);
  ProbeSpd(list, "precond.velocity_direct", DirectInverse(d.stokes.A0), gen);
  ProbeSpd(list, "precond.velocity_bpx",
           BpxInverse(d.stokes.A0, NodalProlongations(d.spaces.stokes_levels, *d.spaces.velocity,
                                                      KeepNotGammaS, 2)),
           gen);
  ProbeSpd(list, "precond.flux_direct", DirectInverse(a00), gen);
  ProbeSpd(list, "precond.flux_hx_direct",
           HxInverse(t, LaplaceSolver::Direct, d.spaces.darcy_levels), gen);
  ProbeSpd(list, "precond.flux_hx_bpx", HxInverse(t, LaplaceSolver::Bpx, d.spaces.darcy_levels),
           gen);
  ProbeSpd(list, "precond.stokes_mass", MassInverse(d.stokes.M, MassMode::Auto), gen);
  ProbeSpd(list, "precond.darcy_mass", MassInverse(d.darcy.M, MassMode::Auto), gen);

  // Monolithic system symmetry.
  const MonolithicSystem sys = AssembleMonolithic(d, AssembleLoads(d.spaces, TrigonometricCase()));
  const double msym =
    MaxAbs(SparseMatrix(sys.matrix - SparseMatrix(sys.matrix.transpose()))) / MaxAbs(sys.matrix);
  list.Report("monolithic.symmetry", msym <= 1e-12, msym);
  return list.AllPassed() ? 0 : 1;
}

int RunVerb(const std::string &verb, const ExperimentSpec &spec, std::ostream &os,
            std::ostream &log)
{
  int (*run)(const ExperimentSpec &, std::ostream &, std::ostream &) = nullptr;
  if (verb == "converge")
  {
    run = RunConvergence;
  }
  else if (verb == "iterations")
  {
    run = RunIterations;
  }
  else if (verb == "check")
  {
    run = RunCheck;
  }
  else if (verb == "oracle")
  {
    run = RunOracle;
  }
  else
  {
    throw InvalidArgument("unknown verb: " + verb);
  }
  const std::string path = ResolveOutputPath(spec.out, std::getenv(kOutputDirEnv));
  if (path.empty())
  {
    return run(spec, os, log);
  }
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty())
  {
    std::filesystem::create_directories(parent);
  }
  // Write to a buffer first so that a thrown error leaves no partial file behind.
  std::ostringstream buffer;
  const int code = run(spec, buffer, log);
  std::ofstream file(path, std::ios::binary);
  if (!file)
  {
    throw InvalidArgument("cannot open output file: " + path);
  }
  file << buffer.str();
  log << "wrote " << path << "\n";
  return code;
}

}  // namespace sdarcy
