#include "sdarcy/verify.hpp"

#include <cmath>
#include <cstdio>
#include "sdarcy/errors.hpp"
#include "sdarcy/quadrature.hpp"

namespace sdarcy
{

namespace
{

constexpr int kErrorDegree = 10;

double VelocityError(const ScalarSpace &space, const Vector &coeffs, const ManufacturedCase &c)
{
  const SubMesh &m = space.Mesh();
  const int k = space.LocalSize();
  const int nd = space.NumDofs();
  const TriangleRule &rule = TriangleQuadrature(kErrorDegree);
  std::vector<double> val(k);
  std::vector<Point> grad(k);
  double sum = 0.0;
  for (int t = 0; t < m.NumTriangles(); t++)
  {
    const TriangleGeometry geo(m.Corners(t));
    const auto dofs = space.CellDofs(t);
    for (int q = 0; q < rule.Size(); q++)
    {
      space.Eval(geo, rule.points[q], val, grad);
      const Point x = geo.Map(rule.points[q]);
      double uh[2] = {0.0, 0.0};
      Gradient gh{};
      for (int i = 0; i < k; i++)
      {
        for (int comp = 0; comp < 2; comp++)
        {
          const double a = coeffs[comp * nd + dofs[i]];
          uh[comp] += a * val[i];
          gh[2 * comp] += a * grad[i].x;
          gh[2 * comp + 1] += a * grad[i].y;
        }
      }
      const Point u = c.StokesVelocity(x);
      const Gradient g = c.StokesVelocityGradient(x);
      double e = std::pow(u.x - uh[0], 2) + std::pow(u.y - uh[1], 2);
      for (int j = 0; j < 4; j++)
      {
        e += std::pow(g[j] - gh[j], 2);
      }
      sum += rule.weights[q] * geo.area * e;
    }
  }
  return std::sqrt(sum);
}

template <class Exact>
double ScalarL2Error(const ScalarSpace &space, const Vector &coeffs, Exact exact)
{
  const SubMesh &m = space.Mesh();
  const int k = space.LocalSize();
  const TriangleRule &rule = TriangleQuadrature(kErrorDegree);
  std::vector<double> val(k);
  double sum = 0.0;
  for (int t = 0; t < m.NumTriangles(); t++)
  {
    const TriangleGeometry geo(m.Corners(t));
    const auto dofs = space.CellDofs(t);
    for (int q = 0; q < rule.Size(); q++)
    {
      space.Eval(geo, rule.points[q], val);
      double ph = 0.0;
      for (int i = 0; i < k; i++)
      {
        ph += coeffs[dofs[i]] * val[i];
      }
      sum += rule.weights[q] * geo.area * std::pow(exact(geo.Map(rule.points[q])) - ph, 2);
    }
  }
  return std::sqrt(sum);
}

double FluxError(const FluxSpace &space, const Vector &coeffs, const ManufacturedCase &c)
{
  const SubMesh &m = space.Mesh();
  const int k = space.LocalSize();
  const TriangleRule &rule = TriangleQuadrature(kErrorDegree);
  std::vector<Point> val(k);
  std::vector<double> div(k);
  const double tau = c.Params().tau;
  double sum = 0.0;
  for (int t = 0; t < m.NumTriangles(); t++)
  {
    const TriangleGeometry geo(m.Corners(t));
    const auto dofs = space.CellDofs(t);
    for (int q = 0; q < rule.Size(); q++)
    {
      space.Eval(t, rule.points[q], val, div);
      const Point x = geo.Map(rule.points[q]);
      Point uh{0.0, 0.0};
      double dh = 0.0;
      for (int i = 0; i < k; i++)
      {
        uh = uh + coeffs[dofs[i]] * val[i];
        dh += coeffs[dofs[i]] * div[i];
      }
      const Point u = c.DarcyVelocity(x);
      // div u_D = -lap p_D / tau
      const double d = -c.DarcyPressureLaplacian(x) / tau;
      sum += rule.weights[q] * geo.area *
             (std::pow(u.x - uh.x, 2) + std::pow(u.y - uh.y, 2) + std::pow(d - dh, 2));
    }
  }
  return std::sqrt(sum);
}

}  // namespace

ErrorRecord ComputeErrors(const Discretization &disc, const SolveReport &report,
                          const ManufacturedCase &mcase, bool drop_bubble)
{
  const CoupledSpaces &s = disc.spaces;
  ErrorRecord r;
  r.dofs = s.TotalDofs();
  r.h = 1.0 / s.n;
  Vector velocity = report.velocity;
  if (drop_bubble && s.velocity->Family() == ElementFamily::P1Bubble)
  {
    // Bubble dofs follow the vertex dofs in each component.
    const int nv = s.velocity->Mesh().NumVertices();
    const int nd = s.velocity->NumDofs();
    for (int c = 0; c < 2; c++)
    {
      velocity.segment(c * nd + nv, nd - nv).setZero();
    }
  }
  r.u_s = VelocityError(*s.velocity, velocity, mcase);
  r.p_s = ScalarL2Error(*s.stokes_pressure, report.stokes_pressure,
                        [&](Point x) { return mcase.StokesPressure(x); });
  r.u_d = FluxError(*s.flux, report.flux, mcase);
  r.p_d = ScalarL2Error(*s.darcy_pressure, report.darcy_pressure,
                        [&](Point x) { return mcase.DarcyPressure(x); });
  return r;
}

std::optional<double> Rate(double e, double e_next, double h, double h_next)
{
  if (!(e > 0.0) || !(e_next > 0.0) || !(h > 0.0) || !(h_next > 0.0) || h == h_next)
  {
    return std::nullopt;
  }
  return std::log(e / e_next) / std::log(h / h_next);
}

RateRecord ComputeRates(const ErrorRecord &coarse, const ErrorRecord &fine)
{
  if (std::abs(coarse.h / fine.h - 2.0) > 1e-12)
  {
    throw InvalidArgument("ComputeRates: consecutive rows must halve h");
  }
  return {Rate(coarse.u_s, fine.u_s, coarse.h, fine.h), Rate(coarse.p_s, fine.p_s, coarse.h, fine.h),
          Rate(coarse.u_d, fine.u_d, coarse.h, fine.h), Rate(coarse.p_d, fine.p_d, coarse.h, fine.h)};
}

TableFormat ParseTableFormat(const std::string &name)
{
  if (name == "csv")
  {
    return TableFormat::Csv;
  }
  if (name == "markdown" || name == "md")
  {
    return TableFormat::Markdown;
  }
  throw InvalidArgument("unknown table format: " + name);
}

std::string Scientific(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

namespace
{

std::string RateCell(const std::optional<double> &r, TableFormat f)
{
  if (!r)
  {
    return f == TableFormat::Csv ? "" : "-";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *r);
  return buf;
}

std::string HCell(double h)
{
  return "1/" + std::to_string(static_cast<int>(std::lround(1.0 / h)));
}

void WriteRow(std::ostream &os, const std::vector<std::string> &cells, TableFormat f)
{
  if (f == TableFormat::Markdown)
  {
    os << "|";
    for (const auto &c : cells)
    {
      os << " " << c << " |";
    }
  }
  else
  {
    for (std::size_t i = 0; i < cells.size(); i++)
    {
      os << (i ? "," : "") << cells[i];
    }
  }
  os << "\n";
}

void WriteHeader(std::ostream &os, const std::vector<std::string> &cells, TableFormat f,
                 const std::string &title)
{
  if (f == TableFormat::Markdown)
  {
    if (!title.empty())
    {
      os << "### " << title << "\n\n";
    }
    WriteRow(os, cells, f);
    std::vector<std::string> rule(cells.size(), "---");
    WriteRow(os, rule, f);
  }
  else
  {
    WriteRow(os, cells, f);
  }
}

}  // namespace

void WriteConvergenceTable(std::ostream &os, const std::vector<ConvergenceRow> &rows,
                           TableFormat format, const std::string &title)
{
  WriteHeader(os, {"DOF", "h", "e(u_S)", "r(u_S)", "e(p_S)", "r(p_S)", "e(u_D)", "r(u_D)", "e(p_D)",
                   "r(p_D)"},
              format, title);
  for (std::size_t i = 0; i < rows.size(); i++)
  {
    const ErrorRecord &e = rows[i].errors;
    RateRecord r;
    if (i > 0 && !rows[i].failed && !rows[i - 1].failed)
    {
      r = ComputeRates(rows[i - 1].errors, e);
    }
    std::vector<std::string> cells = {std::to_string(e.dofs), HCell(e.h)};
    if (rows[i].failed)
    {
      for (int k = 0; k < 8; k++)
      {
        cells.push_back("FAIL");
      }
    }
    else
    {
      cells.insert(cells.end(), {Scientific(e.u_s), RateCell(r.u_s, format), Scientific(e.p_s),
                                 RateCell(r.p_s, format), Scientific(e.u_d), RateCell(r.u_d, format),
                                 Scientific(e.p_d), RateCell(r.p_d, format)});
    }
    WriteRow(os, cells, format);
  }
}

std::string FormatIterationCell(const IterationCell &cell)
{
  if (cell.failed)
  {
    return "FAIL";
  }
  return std::to_string(cell.outer) + "(" + std::to_string(std::lround(cell.mean_inner)) + ")";
}

void WriteIterationTable(std::ostream &os, const std::vector<std::string> &combos,
                         const std::vector<IterationRow> &rows, TableFormat format,
                         const std::string &title)
{
  std::vector<std::string> head = {"DOF", "h"};
  head.insert(head.end(), combos.begin(), combos.end());
  WriteHeader(os, head, format, title);
  for (const IterationRow &row : rows)
  {
    std::vector<std::string> cells = {std::to_string(row.dofs), HCell(row.h)};
    for (const IterationCell &c : row.cells)
    {
      const std::string s = FormatIterationCell(c);
      cells.push_back(format == TableFormat::Csv ? "\"" + s + "\"" : s);
    }
    WriteRow(os, cells, format);
  }
}

}  // namespace sdarcy
