#ifndef SDARCY_CLI_HPP
#define SDARCY_CLI_HPP

#include <istream>
#include <ostream>
#include <string>
#include <vector>
#include "sdarcy/verify.hpp"

namespace sdarcy
{

// Environment variable that redirects relative output paths into a directory.
inline constexpr const char *kOutputDirEnv = "SDARCY_OUTPUT_DIR";

// Largest mesh parameter accepted by the batch driver.
inline constexpr int kMaxMeshSize = 128;

struct ExperimentSpec
{
  ElementPair pair = ElementPair::MiniBdm1;
  int nmin = 8;
  int nmax = 64;
  std::vector<PrecondCombo> combos;  // empty means direct:direct
  double outer_rtol = 1e-6;
  double inner_rtol = 1e-2;
  TableFormat format = TableFormat::Csv;
  std::string out;  // empty writes to the given stream
  unsigned seed = 1;
  int outer_maxit = 2000;
};

// Reads "key = value" lines ('#' starts a comment). Repeated "combo" lines accumulate.
// Throws InvalidArgument on unknown keys or malformed values.
void ReadConfig(std::istream &is, ExperimentSpec &spec);
void SetOption(ExperimentSpec &spec, const std::string &key, const std::string &value);

// nmin, 2 nmin, ... up to nmax. Throws InvalidArgument for an empty or oversized range.
std::vector<int> MeshSizes(const ExperimentSpec &spec);

// `out` prefixed by the override directory when it is relative and the variable is set.
std::string ResolveOutputPath(const std::string &out, const char *override_dir);

// Relative differences between two solutions of one discretization in the natural norms.
struct FieldDifferences
{
  double u_s = 0.0, p_s = 0.0, u_d = 0.0, p_d = 0.0;
  double Max() const;
};
FieldDifferences CompareSolutions(const Discretization &disc, const SolveReport &a,
                                  const SolveReport &reference);

// Verbs. Tables go to `os`, progress to `log`. Return the process exit code: 0 iff every
// solve converged (and, for check and oracle, every property held).
int RunConvergence(const ExperimentSpec &spec, std::ostream &os, std::ostream &log);
int RunIterations(const ExperimentSpec &spec, std::ostream &os, std::ostream &log);
int RunCheck(const ExperimentSpec &spec, std::ostream &os, std::ostream &log);
int RunOracle(const ExperimentSpec &spec, std::ostream &os, std::ostream &log);

// Dispatches a verb, writing to spec.out (resolved against the environment) or to `os`.
int RunVerb(const std::string &verb, const ExperimentSpec &spec, std::ostream &os,
            std::ostream &log);

}  // namespace sdarcy

#endif  // SDARCY_CLI_HPP
