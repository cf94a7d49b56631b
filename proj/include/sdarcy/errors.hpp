#ifndef SDARCY_ERRORS_HPP
#define SDARCY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sdarcy
{

// Bad configuration or malformed input data.
class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Manufactured data violating the compatibility condition of the Darcy source.
class InvalidCase : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// An iterative or direct solve did not succeed.
class SolverFailure : public std::runtime_error
{
public:
  SolverFailure(const std::string &what, double residual = -1.0)
    : std::runtime_error(what), residual_(residual)
  {
  }
  double Residual() const { return residual_; }

private:
  double residual_;
};

}  // namespace sdarcy

#endif  // SDARCY_ERRORS_HPP
