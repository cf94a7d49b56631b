// Batch driver: convergence and iteration tables, property checks, oracle comparison.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <CLI11.hpp>
#include "sdarcy/cli.hpp"
#include "sdarcy/errors.hpp"

int main(int argc, char **argv)
{
  CLI::App app{"Coupled Stokes-Darcy solver: table generation and checks"};
  std::string verb;
  std::string config;
  std::optional<std::string> pair, format, out;
  std::optional<int> nmin, nmax, seed;
  std::optional<double> outer_rtol, inner_rtol;
  std::vector<std::string> combos;
  app.add_option("verb", verb, "converge | iterations | check | oracle")
    ->required()
    ->check(CLI::IsMember({"converge", "iterations", "check", "oracle"}));
  app.add_option("--config", config, "key = value configuration file");
  app.add_option("--pair", pair, "mini | p2isop1 | taylor-hood");
  app.add_option("--nmin", nmin, "coarsest mesh parameter (h = 1/n)");
  app.add_option("--nmax", nmax, "finest mesh parameter");
  app.add_option("--combo", combos, "preconditioner outer:inner, repeatable");
  app.add_option("--outer-rtol", outer_rtol, "outer MINRES relative tolerance");
  app.add_option("--inner-rtol", inner_rtol, "inner MINRES relative tolerance");
  app.add_option("--format", format, "csv | markdown");
  app.add_option("--out", out, "output file (relative paths honor SDARCY_OUTPUT_DIR)");
  app.add_option("--seed", seed, "seed for random probes");
  CLI11_PARSE(app, argc, argv);

  try
  {
    sdarcy::ExperimentSpec spec;
    if (!config.empty())
    {
      std::ifstream is(config);
      if (!is)
      {
        throw sdarcy::InvalidArgument("cannot read config file: " + config);
      }
      sdarcy::ReadConfig(is, spec);
    }
    // Flags override the file.
    auto set = [&](const char *key, const auto &value)
    {
      if (value)
      {
        std::ostringstream s;
        s.precision(17);
        s << *value;
        sdarcy::SetOption(spec, key, s.str());
      }
    };
    set("pair", pair);
    set("nmin", nmin);
    set("nmax", nmax);
    set("outer_rtol", outer_rtol);
    set("inner_rtol", inner_rtol);
    set("format", format);
    set("out", out);
    set("seed", seed);
    if (!combos.empty())
    {
      spec.combos.clear();
      for (const auto &c : combos)
      {
        sdarcy::SetOption(spec, "combo", c);
      }
    }
    return sdarcy::RunVerb(verb, spec, std::cout, std::cerr);
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
