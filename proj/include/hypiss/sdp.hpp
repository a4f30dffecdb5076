#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypiss/lmi.hpp"

// Dense log-det barrier solver for the small LMI problems built by the
// control module.
namespace hypiss::sdp {

enum class Status { Feasible, Optimal, Infeasible, NumericalFailure };

std::string_view to_string(Status s);

struct SolveOptions {
    /// Damped Newton steps allowed per centering.
    int max_newton_iterations = 100;
    /// Barrier-parameter updates allowed per phase.
    int max_outer_iterations = 60;
    double initial_t = 1.0;
    double growth = 10.0;
    /// Stop when the duality-gap surrogate (total barrier degree / t) drops below this.
    double tolerance = 1e-8;
    /// Phase 1 declares infeasibility once its slack is provably above this value.
    double infeasibility_threshold = 0.0;
    /// Every scalar decision entry is kept inside [-bound, bound].
    double variable_bound = 1e4;

    /// Throws std::invalid_argument when an option is out of range.
    void validate() const;
};

struct Solution {
    Status status = Status::NumericalFailure;
    lmi::Point point;
    std::optional<double> objective;
    /// One per problem constraint, recomputed through lmi::margins.
    std::vector<double> margins;
    /// Final phase-1 slack s (negative means strictly feasible).
    double phase1_slack = 0.0;
    int newton_steps = 0;
    std::string message;

    [[nodiscard]] bool ok() const noexcept {
        return status == Status::Feasible || status == Status::Optimal;
    }
    [[nodiscard]] double min_margin() const;
};

/// Phase 1 only: finds a point at which every constraint holds strictly.
/// The problem's objective, if any, is ignored.
Solution solve_feasibility(const lmi::LmiProblem& problem, const SolveOptions& opts = {});

/// Phase 1 followed by barrier path-following on the linear objective.
Solution minimize(const lmi::LmiProblem& problem, const SolveOptions& opts = {});

} // namespace hypiss::sdp
