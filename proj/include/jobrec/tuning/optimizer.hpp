#pragma once

#include "jobrec/tools/scoring.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace jobrec::tuning {

struct Bounds {
    double lo = 0.0;
    double hi = 1.0;
};

struct ParamSpace {
    std::vector<std::string> names;
    std::vector<Bounds> bounds;

    std::size_t size() const noexcept { return bounds.size(); }
    // Throws ConfigInvalid on empty, unnamed, non-finite or inverted bounds.
    void validate() const;
    bool contains(const std::vector<double>& x) const;

    // One bound per ScoringWeights field, all in [0, hi].
    static ParamSpace scoring_weights(double hi = 4.0);
};

using Params = std::vector<double>;
using Objective = std::function<double(const Params&)>;

struct TrialRecord {
    std::size_t index = 0;  // dense over successful trials
    Params params;
    double objective = 0.0;

    bool operator==(const TrialRecord&) const = default;
};

struct FailedTrial {
    std::size_t attempt = 0;  // position in the budget
    Params params;
    std::string error;
};

struct OptimizeResult {
    Params best;
    double best_objective = 0.0;
    std::vector<TrialRecord> trials;
    std::vector<FailedTrial> failed;
};

nlohmann::json to_json(const OptimizeResult& result, const ParamSpace& space);

// Trials spent on quasi-random initial design before the surrogate takes over.
std::size_t initial_design_size(std::size_t budget);

// Gaussian-process surrogate with expected improvement; maximises. A throwing
// or non-finite objective is recorded as failed and still uses budget.
// Throws TrialFailed when every trial fails.
OptimizeResult optimize(const Objective& objective, const ParamSpace& space, std::size_t budget, std::uint64_t seed);

// Uniform random search with the same budget, the comparison baseline.
OptimizeResult random_search(const Objective& objective, const ParamSpace& space, std::size_t budget,
                             std::uint64_t seed);

struct RandomComparison {
    std::vector<double> optimized;  // best objective per seed
    std::vector<double> random;
    double optimized_median = 0.0;
    double random_median = 0.0;
};

// Requires at least 10 seeds.
RandomComparison compare_to_random(const Objective& objective, const ParamSpace& space, std::size_t budget,
                                   const std::vector<std::uint64_t>& seeds);

double median(std::vector<double> values);

tools::ScoringWeights weights_from_params(const Params& x);

}  // namespace jobrec::tuning
