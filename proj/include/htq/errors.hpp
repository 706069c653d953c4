#pragma once

#include <stdexcept>
#include <string>

namespace htq {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonStochasticRow : Error {
    int row;
    NonStochasticRow(int r, double sum)
        : Error("transition row " + std::to_string(r) +
                " does not sum to 1 (sum=" + std::to_string(sum) + ")"),
          row(r) {}
};

struct Reducible : Error {
    int state;
    explicit Reducible(int s)
        : Error("chain is reducible (state " + std::to_string(s) +
                " not mutually reachable from state 0)"),
          state(s) {}
};

struct Periodic : Error {
    int period;
    explicit Periodic(int p)
        : Error("chain is periodic with period " + std::to_string(p)), period(p) {}
};

struct SolverFailure : Error {
    explicit SolverFailure(const std::string& what) : Error(what) {}
};

struct EnvelopeInfeasible : Error {
    explicit EnvelopeInfeasible(const std::string& what) : Error(what) {}
};

struct InfeasibleRate : Error {
    explicit InfeasibleRate(const std::string& what) : Error(what) {}
};

struct UnknownState : Error {
    explicit UnknownState(const std::string& what) : Error(what) {}
};

struct UnstableRun : Error {
    explicit UnstableRun(const std::string& what) : Error(what) {}
};

struct DimensionTooLarge : Error {
    explicit DimensionTooLarge(const std::string& what) : Error(what) {}
};

struct ConvergenceFailure : Error {
    explicit ConvergenceFailure(const std::string& what) : Error(what) {}
};

struct ConfigInvalid : Error {
    explicit ConfigInvalid(const std::string& what) : Error(what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace htq
