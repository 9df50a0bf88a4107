#include "jobrec/tuning/optimizer.hpp"

#include "jobrec/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

namespace jobrec::tuning {

namespace {

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::size_t i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

// Halton sequence under a seeded random shift (mod 1), in the unit cube.
class ShiftedHalton {
public:
    ShiftedHalton(std::size_t dims, std::mt19937_64& rng) {
        if (dims > std::size(kPrimes)) throw Error(Errc::ConfigInvalid, "too many dimensions for the initial design");
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t d = 0; d < dims; ++d) shift_.push_back(u(rng));
    }
    std::vector<double> at(std::size_t i) const {
        std::vector<double> x(shift_.size());
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double v = radical_inverse(i + 1, kPrimes[d]) + shift_[d];
            x[d] = v - std::floor(v);
        }
        return x;
    }

private:
    std::vector<double> shift_;
};

Params to_space(const std::vector<double>& u, const ParamSpace& space) {
    Params x(u.size());
    for (std::size_t d = 0; d < u.size(); ++d) {
        const auto& b = space.bounds[d];
        x[d] = std::clamp(b.lo + u[d] * (b.hi - b.lo), b.lo, b.hi);
    }
    return x;
}

struct Gp {
    Eigen::MatrixXd X;  // n x d, unit cube
    Eigen::VectorXd alpha;
    Eigen::LLT<Eigen::MatrixXd> llt;
    double lengthscale = 0.2;

    double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
        return std::exp(-(a - b).squaredNorm() / (2.0 * lengthscale * lengthscale));
    }

    // Returns the log marginal likelihood, or nullopt when the factorisation fails.
    std::optional<double> fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_std, double ell) {
        X = x;
        lengthscale = ell;
        const auto n = X.rows();
        Eigen::MatrixXd K(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j <= i; ++j) K(i, j) = K(j, i) = kernel(X.row(i), X.row(j));
            K(i, i) += 1e-6;
        }
        llt.compute(K);
        if (llt.info() != Eigen::Success) return std::nullopt;
        alpha = llt.solve(y_std);
        const Eigen::MatrixXd L = llt.matrixL();
        return -0.5 * y_std.dot(alpha) - L.diagonal().array().log().sum();
    }

    // Standardised mean and standard deviation at u.
    std::pair<double, double> predict(const Eigen::VectorXd& u) const {
        Eigen::VectorXd k(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i) k(i) = kernel(X.row(i), u);
        const double mu = k.dot(alpha);
        const Eigen::VectorXd v = llt.matrixL().solve(k);
        return {mu, std::sqrt(std::max(1.0 - v.squaredNorm(), 1e-12))};
    }
};

double expected_improvement(double mu, double sigma, double best, double xi) {
    const double z = (mu - best - xi) / sigma;
    const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    return (mu - best - xi) * cdf + sigma * pdf;
}

class TrialLog {
public:
    explicit TrialLog(const Objective& objective) : objective_(objective) {}

    void run(const std::vector<double>& unit, const ParamSpace& space) {
        const std::size_t attempt = units_.size() + result.failed.size();
        Params x = to_space(unit, space);
        try {
            const double y = objective_(x);
            if (!std::isfinite(y)) throw Error(Errc::TrialFailed, "objective is not finite");
            result.trials.push_back({result.trials.size(), x, y});
            units_.push_back(unit);
            if (result.trials.size() == 1 || y > result.best_objective) {
                result.best_objective = y;
                result.best = x;
            }
        } catch (const std::exception& e) {
            result.failed.push_back({attempt, std::move(x), e.what()});
        }
    }

    void finish() const {
        if (result.trials.empty()) throw Error(Errc::TrialFailed, "every trial failed");
    }

    const std::vector<std::vector<double>>& units() const { return units_; }
    OptimizeResult result;

private:
    const Objective& objective_;
    std::vector<std::vector<double>> units_;
};

// Picks the candidate with the largest expected improvement.
std::vector<double> propose(const TrialLog& log, std::size_t dims, const ShiftedHalton& halton,
                            std::size_t halton_offset, std::mt19937_64& rng) {
    const auto& units = log.units();
    const auto n = static_cast<Eigen::Index>(units.size());
    const auto d = static_cast<Eigen::Index>(dims);
    Eigen::MatrixXd X(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) X(i, j) = units[i][j];
        y(i) = log.result.trials[i].objective;
    }
    const double mean = y.mean();
    const double sd = std::sqrt((y.array() - mean).square().sum() / std::max<double>(1.0, n - 1.0));
    const double scale = sd > 1e-12 ? sd : 1.0;
    const Eigen::VectorXd ys = (y.array() - mean) / scale;

    Gp gp;
    std::optional<double> best_lml;
    double best_ell = 0.2;
    for (double base : {0.05, 0.1, 0.2, 0.35, 0.6, 1.0}) {
        const double ell = base * std::sqrt(static_cast<double>(dims));
        auto lml = gp.fit(X, ys, ell);
        if (lml && (!best_lml || *lml > *best_lml)) {
            best_lml = lml;
            best_ell = ell;
        }
    }
    gp.fit(X, ys, best_ell);
    const double incumbent = ys.maxCoeff();

    std::vector<std::vector<double>> candidates;
    constexpr std::size_t kSpaceFilling = 1024;
    for (std::size_t i = 0; i < kSpaceFilling; ++i) candidates.push_back(halton.at(halton_offset + i));
    // Local moves around the best points found so far.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return y(a) > y(b); });
    std::normal_distribution<double> step(0.0, 1.0);
    for (std::size_t r = 0; r < std::min<std::size_t>(3, order.size()); ++r) {
        for (double radius : {0.1, 0.03, 0.01}) {
            for (int k = 0; k < 40; ++k) {
                auto c = units[static_cast<std::size_t>(order[r])];
                for (auto& v : c) v = std::clamp(v + radius * step(rng), 0.0, 1.0);
                candidates.push_back(std::move(c));
            }
        }
    }

    double best_ei = -1.0;
    std::size_t pick = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto [mu, sigma] = gp.predict(Eigen::Map<const Eigen::VectorXd>(candidates[i].data(), d));
        const double ei = expected_improvement(mu, sigma, incumbent, 0.01);
        if (ei > best_ei) {
            best_ei = ei;
            pick = i;
        }
    }
    return candidates[pick];
}

}  // namespace

void ParamSpace::validate() const {
    if (bounds.empty()) throw Error(Errc::ConfigInvalid, "parameter space is empty");
    if (names.size() != bounds.size()) throw Error(Errc::ConfigInvalid, "every parameter needs a name");
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const auto& b = bounds[i];
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi) {
            throw Error(Errc::ConfigInvalid, "bad bounds for " + names[i]);
        }
    }
}

bool ParamSpace::contains(const std::vector<double>& x) const {
    if (x.size() != bounds.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= bounds[i].lo && x[i] <= bounds[i].hi)) return false;
    }
    return true;
}

ParamSpace ParamSpace::scoring_weights(double hi) {
    return {{"skills", "location", "education", "title_affinity", "beta", "gamma"},
            std::vector<Bounds>(tools::ScoringWeights::kDimensions, Bounds{0.0, hi})};
}

tools::ScoringWeights weights_from_params(const Params& x) {
    if (x.size() != tools::ScoringWeights::kDimensions) {
        throw Error(Errc::InvalidArgument, "expected " + std::to_string(tools::ScoringWeights::kDimensions) + " weights");
    }
    std::array<double, tools::ScoringWeights::kDimensions> a{};
    std::copy(x.begin(), x.end(), a.begin());
    return tools::ScoringWeights::from_array(a);
}

std::size_t initial_design_size(std::size_t budget) { return std::min(budget, std::max<std::size_t>(5, budget / 4)); }

OptimizeResult optimize(const Objective& objective, const ParamSpace& space, std::size_t budget, std::uint64_t seed) {
    space.validate();
    if (budget == 0) throw Error(Errc::ConfigInvalid, "budget must be positive");
    std::mt19937_64 rng(seed);
    const ShiftedHalton halton(space.size(), rng);
    TrialLog log(objective);

    const std::size_t initial = initial_design_size(budget);
    for (std::size_t i = 0; i < initial; ++i) log.run(halton.at(i), space);
    for (std::size_t t = initial; t < budget; ++t) {
        if (log.units().size() < 2) {
            // Too little data for a surrogate; keep exploring the sequence.
            log.run(halton.at(t), space);
            continue;
        }
        log.run(propose(log, space.size(), halton, 4096 + t * 1024, rng), space);
    }
    log.finish();
    return std::move(log.result);
}

OptimizeResult random_search(const Objective& objective, const ParamSpace& space, std::size_t budget,
                             std::uint64_t seed) {
    space.validate();
    if (budget == 0) throw Error(Errc::ConfigInvalid, "budget must be positive");
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TrialLog log(objective);
    for (std::size_t t = 0; t < budget; ++t) {
        std::vector<double> unit(space.size());
        for (auto& v : unit) v = u(rng);
        log.run(unit, space);
    }
    log.finish();
    return std::move(log.result);
}

double median(std::vector<double> values) {
    if (values.empty()) throw Error(Errc::InvalidArgument, "median of nothing");
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

RandomComparison compare_to_random(const Objective& objective, const ParamSpace& space, std::size_t budget,
                                   const std::vector<std::uint64_t>& seeds) {
    if (seeds.size() < 10) throw Error(Errc::ContractViolation, "compare_to_random needs at least 10 seeds");
    RandomComparison out;
    for (auto seed : seeds) {
        out.optimized.push_back(optimize(objective, space, budget, seed).best_objective);
        out.random.push_back(random_search(objective, space, budget, seed).best_objective);
    }
    out.optimized_median = median(out.optimized);
    out.random_median = median(out.random);
    return out;
}

nlohmann::json to_json(const OptimizeResult& result, const ParamSpace& space) {
    auto named = [&](const Params& x) {
        nlohmann::json j = nlohmann::json::object();
        for (std::size_t i = 0; i < x.size() && i < space.names.size(); ++i) j[space.names[i]] = x[i];
        return j;
    };
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : result.trials) {
        trials.push_back({{"index", t.index}, {"params", named(t.params)}, {"objective", t.objective}});
    }
    nlohmann::json failed = nlohmann::json::array();
    for (const auto& f : result.failed) {
        failed.push_back({{"attempt", f.attempt}, {"params", named(f.params)}, {"error", f.error}});
    }
    return {{"best", named(result.best)}, {"best_objective", result.best_objective}, {"trials", trials},
            {"failed", failed}};
}

}  // namespace jobrec::tuning
