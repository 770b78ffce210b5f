#pragma once

#include <string>
#include <vector>

namespace halfflow {

struct CheckResult {
    std::string name;
    bool passed;
    double value;
    double threshold;
    std::string detail;
};

/**
 * One empirical constant: ratios LHS / RHS over a data family. The constant is
 * the family maximum; it is accepted when finite and at most 2x the median.
 */
struct ConstantReport {
    std::string name;
    std::vector<std::string> members;
    std::vector<double> ratios;
    double constant = 0.0;
    double median = 0.0;
    /// Least-squares slope of log ratio against log frequency (frequency families only).
    double log_slope = 0.0;
    bool bounded = false;
};

ConstantReport fit_constant(std::string name, std::vector<std::string> members, std::vector<double> ratios);

/// sup_t t ||d_{1/2} S_t a||_inf^2 / [a]_{A_T}^2 over 1D data (standard estimate, c1).
ConstantReport standard_estimate_constant();
/// xt seminorm of S_t a over [a]_{A_T} (initial-condition estimate, c2).
ConstantReport initial_condition_constant();
/// X_T norm of u - S_t a over (X_T seminorm of u)^2 for converged small-data solves (c4).
ConstantReport quadratic_estimate_constant();
/// ||grad u|| / (||d u||^{1/2} ||d grad u||^{1/2}) over 10 fields spanning 3 octaves.
ConstantReport interpolation_gradient_constant();
/// ||(-Delta)^{1/2} u|| / (||u||^{1/2} ||d grad u||^{1/2}) over the same family.
ConstantReport interpolation_laplace_constant();

/// Fast analytic-oracle checks (kernel, semigroup, wave density, Duhamel, jump profile, fixed point).
std::vector<CheckResult> analytic_checks();

struct ValidationReport {
    std::vector<CheckResult> checks;
    std::vector<ConstantReport> constants;
    bool all_passed = false;
};

/// analytic_checks plus every constant study; a bounded constant counts as a passed check.
ValidationReport run_validation();

std::string to_json(const ValidationReport& report, int indent = 2);

}  // namespace halfflow
