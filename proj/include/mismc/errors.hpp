#pragma once

#include <stdexcept>
#include <string>

namespace mismc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration input (strict schema violations,
// out-of-range parameters). Maps to CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Argument outside an operation's domain (e.g. index below the allocation
// offset, nonpositive value passed to a log fit).
struct DomainError : Error {
  using Error::Error;
};

// A forward-model evaluation failed (singular solve, non-elliptic
// coefficient, solver non-convergence).
struct EvaluationError : Error {
  using Error::Error;
};

// All particle weights vanished numerically at some tempering stage.
struct DegeneratePopulationError : Error {
  DegeneratePopulationError(const std::string& what, std::string alpha, int stage)
      : Error(what), alpha_label(std::move(alpha)), stage(stage) {}
  std::string alpha_label;
  int stage = -1;
};

// Requested budget cannot satisfy the per-index particle floor.
struct InfeasibleBudgetError : Error {
  InfeasibleBudgetError(const std::string& what, double min_budget)
      : Error(what), min_feasible_budget(min_budget) {}
  double min_feasible_budget = 0.0;
};

// Too many realizations failed, or another numerical failure threshold was
// exceeded. Maps to CLI exit code 3.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace mismc
