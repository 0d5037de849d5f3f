#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metacog/sdt.hpp"

namespace metacog {

/// Meta-d' model parameters. Evidence for S1/S2 stimuli is N(-meta_d/2, 1)
/// and N(+meta_d/2, 1); the full threshold vector
/// [t2_criteria_s1..., meta_c, t2_criteria_s2...] must be strictly increasing.
/// Confidence h is the outermost interval on each side.
struct MetaDParams {
    double meta_d = 0.0;
    double meta_c = 0.0;
    std::vector<double> t2_criteria_s1;  ///< h-1 thresholds below meta_c, ascending
    std::vector<double> t2_criteria_s2;  ///< h-1 thresholds above meta_c, ascending

    int h() const noexcept { return static_cast<int>(t2_criteria_s1.size()) + 1; }
    std::vector<double> thresholds() const;
    bool is_ordered() const noexcept;
};

/// P(confidence | stimulus, response) under a MetaDParams model.
class Type2ProbTable {
public:
    explicit Type2ProbTable(int h);

    int h() const noexcept { return h_; }
    double at(Stimulus stim, Response resp, int confidence) const;
    double& at(Stimulus stim, Response resp, int confidence);
    /// P(response | stimulus) implied by meta_c and meta_d.
    double response_mass(Stimulus stim, Response resp) const noexcept;
    void set_response_mass(Stimulus stim, Response resp, double mass) noexcept;

private:
    int h_;
    std::vector<double> p_;
    double mass_[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

/// Throws std::invalid_argument when thresholds are not strictly increasing
/// or the criteria vectors do not have h-1 entries.
Type2ProbTable type2_probs(const MetaDParams& params, int h);

/// Response-conditional multinomial log-likelihood
/// sum n(stim, resp, conf) * log P(conf | stim, resp).
double type2_log_likelihood(const RatingCounts& counts, const MetaDParams& params);

enum class CellPadding { Never, WhenDegenerate, Always };

std::string_view to_string(CellPadding p) noexcept;
std::optional<CellPadding> parse_cell_padding(std::string_view text) noexcept;

/// Adds 1/(2h) to every cell (WhenDegenerate: only if some cell is zero).
RatingCounts apply_cell_padding(const RatingCounts& counts, CellPadding policy);

struct OptimizerOptions {
    double rel_tolerance = 1e-8;  ///< relative log-likelihood change between restarts
    int max_evaluations = 100000;
    int max_restarts = 12;
};

struct FitOptions {
    CellPadding padding = CellPadding::WhenDegenerate;
    EdgeCorrection edge_correction = EdgeCorrection::WhenDegenerate;
    OptimizerOptions optimizer;
};

struct FitResult {
    MetaDParams params;
    double log_likelihood = 0.0;   ///< on the (possibly padded) counts that were fit
    std::optional<double> m_ratio; ///< meta_d / d', absent unless d' > 0
    Type1Stats type1;              ///< from the unpadded counts
    bool converged = false;
    bool padded = false;
    int iterations = 0;
    int evaluations = 0;
    std::string diagnostics;

    double d_prime_type1() const noexcept { return type1.d_prime; }
    double c_type1() const noexcept { return type1.c; }
};

/// Maximum-likelihood meta-d' with meta_c = c' * meta_d held to the type 1
/// normalized criterion. Non-convergence is reported in the result; throws
/// std::invalid_argument for malformed counts or type 1 d' = 0 (c' undefined).
FitResult fit_meta_d(const RatingCounts& counts, const FitOptions& options = {});

/// meta_d / d'. Throws std::domain_error for d' <= 0.
double m_ratio(double meta_d, double d_prime);

}  // namespace metacog
