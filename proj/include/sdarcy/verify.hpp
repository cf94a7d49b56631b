#ifndef SDARCY_VERIFY_HPP
#define SDARCY_VERIFY_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>
#include "sdarcy/solver.hpp"

namespace sdarcy
{

// Errors in the natural norms: H1 (full gradient), L2, H(div) graph norm, L2.
struct ErrorRecord
{
  int dofs = 0;
  double h = 0.0;
  double u_s = 0.0, p_s = 0.0, u_d = 0.0, p_d = 0.0;
};

// With `drop_bubble` the MINI velocity error is measured on its continuous P1 part, which is
// the convention of the reference tables; the full field is used otherwise.
ErrorRecord ComputeErrors(const Discretization &disc, const SolveReport &report,
                          const ManufacturedCase &mcase, bool drop_bubble = true);

// log(e / e') / log(h / h'); empty when an error vanishes.
std::optional<double> Rate(double e, double e_next, double h, double h_next);

struct RateRecord
{
  std::optional<double> u_s, p_s, u_d, p_d;
};

// Throws InvalidArgument unless h halves from `coarse` to `fine`.
RateRecord ComputeRates(const ErrorRecord &coarse, const ErrorRecord &fine);

// One row of a convergence table; `failed` marks a solve that did not converge.
struct ConvergenceRow
{
  ErrorRecord errors;
  bool failed = false;
};

enum class TableFormat
{
  Csv,
  Markdown
};

TableFormat ParseTableFormat(const std::string &name);

void WriteConvergenceTable(std::ostream &os, const std::vector<ConvergenceRow> &rows,
                           TableFormat format, const std::string &title = "");

struct IterationCell
{
  int outer = 0;
  double mean_inner = 0.0;
  bool failed = false;
};

// "N(M)" with the mean inner count rounded to the nearest integer, or "FAIL".
std::string FormatIterationCell(const IterationCell &cell);

struct IterationRow
{
  int dofs = 0;
  double h = 0.0;
  std::vector<IterationCell> cells;
};

void WriteIterationTable(std::ostream &os, const std::vector<std::string> &combos,
                         const std::vector<IterationRow> &rows, TableFormat format,
                         const std::string &title = "");

// "%.3e"
std::string Scientific(double v);

}  // namespace sdarcy

#endif  // SDARCY_VERIFY_HPP
