#pragma once

#include <functional>
#include <span>
#include <vector>

namespace metacog {

struct SimplexOptions {
    /// Stop when (f_worst - f_best) <= ftol_rel * max(1, |f_best|).
    double ftol_rel = 1e-10;
    /// Or when every vertex lies within xtol of the best one (max-norm).
    double xtol = 1e-10;
    int max_evaluations = 100000;
    double initial_step = 0.25;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    int iterations = 0;
    bool tolerance_met = false;
};

/// Nelder-Mead minimization (standard reflection/expansion/contraction/shrink
/// coefficients 1, 2, 1/2, 1/2). Non-finite objective values are treated as +inf.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::vector<double> start, const SimplexOptions& opts = {});

}  // namespace metacog
