#pragma once

#include <stdexcept>
#include <string>

namespace hyswitch {

// Base for every error raised by the library. The CLI maps subclasses onto
// its exit-code contract.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
  public:
    using Error::Error;
};

class NumericalFailure : public Error {
  public:
    using Error::Error;
};

class AbsorbingState : public Error {
  public:
    explicit AbsorbingState(std::size_t regime)
        : Error("regime " + std::to_string(regime + 1) + " is absorbing"),
          regime_(regime) {}
    std::size_t regime() const { return regime_; }

  private:
    std::size_t regime_;
};

class StepTooLarge : public Error {
  public:
    using Error::Error;
};

// Carries the simulated time at which the underlying failure happened.
class SimulationError : public Error {
  public:
    SimulationError(double time, const std::string& what)
        : Error("t=" + std::to_string(time) + ": " + what), time_(time) {}
    double time() const { return time_; }

  private:
    double time_;
};

} // namespace hyswitch
