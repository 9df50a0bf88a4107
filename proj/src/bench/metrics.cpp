#include "jobrec/bench/metrics.hpp"

#include "jobrec/error.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace jobrec::bench {

namespace {

void check_ranking(const std::vector<std::string>& ranked, std::size_t k) {
    if (k == 0) throw Error(Errc::InvalidArgument, "k must be positive");
    std::set<std::string> seen;
    for (const auto& id : ranked) {
        if (!seen.insert(id).second) throw Error(Errc::InvalidRanking, "duplicate id " + id);
    }
}

std::pair<double, double> mean_and_variance(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, ss / (n - 1.0)};
}

}  // namespace

double hit_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant, std::size_t k) {
    check_ranking(ranked, k);
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        if (relevant.count(ranked[i])) return 1.0;
    }
    return 0.0;
}

double ndcg_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant, std::size_t k) {
    check_ranking(ranked, k);
    if (relevant.empty()) return 0.0;
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        if (relevant.count(ranked[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
    double ideal = 0.0;
    for (std::size_t i = 0; i < std::min(k, relevant.size()); ++i) ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return dcg / ideal;
}

double map_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant, std::size_t k) {
    check_ranking(ranked, k);
    if (relevant.empty()) return 0.0;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        if (!relevant.count(ranked[i])) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    return sum / static_cast<double>(std::min(relevant.size(), k));
}

double hit_real_transitions(const std::map<std::string, std::string>& predictions,
                            const std::vector<TransitionRecord>& test_records) {
    std::map<std::string, std::set<std::string>> actual;
    for (const auto& r : test_records) actual[r.user].insert(r.to);
    if (predictions.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& [user, predicted] : predictions) {
        auto it = actual.find(user);
        if (it == actual.end()) throw Error(Errc::MissingGroundTruth, "no test records for " + user);
        correct += it->second.count(predicted);
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(predictions.size());
}

std::string frequency_baseline(const std::vector<TransitionRecord>& training, const std::string& current) {
    std::map<std::string, std::size_t> counts;  // ordered, so ties go to the smallest id
    for (const auto& r : training) {
        if (r.from == current) ++counts[r.to];
    }
    if (counts.empty()) throw Error(Errc::NoTrainingData, "no training transitions from " + current);
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw Error(Errc::InsufficientSamples, "each sample needs at least two values");
    const auto [ma, va] = mean_and_variance(a);
    const auto [mb, vb] = mean_and_variance(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double sa = va / na;
    const double sb = vb / nb;
    TTestResult r;
    if (sa + sb == 0.0) {
        r.df = na + nb - 2.0;
        if (ma == mb) return {0.0, r.df, 1.0};
        r.t = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    r.t = (ma - mb) / std::sqrt(sa + sb);
    r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    // Two-sided tail of Student's t: I_{df/(df+t^2)}(df/2, 1/2).
    r.p = std::clamp(boost::math::ibeta(r.df / 2.0, 0.5, r.df / (r.df + r.t * r.t)), 0.0, 1.0);
    return r;
}

LatencySummary summarize_latency(const std::vector<double>& samples) {
    if (samples.empty()) throw Error(Errc::InvalidArgument, "no latency samples");
    auto sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    auto rank = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
        return sorted[std::clamp<std::size_t>(idx, 1, sorted.size()) - 1];
    };
    return {std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size()), rank(0.5),
            rank(0.95)};
}

}  // namespace jobrec::bench
