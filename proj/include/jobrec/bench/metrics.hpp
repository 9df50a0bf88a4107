#pragma once

#include "jobrec/bench/world.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace jobrec::bench {

// Binary relevance. All throw InvalidRanking on duplicate ids and
// InvalidArgument when k == 0; an empty relevant set scores 0.
double hit_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant, std::size_t k);
// DCG = sum over i <= k of rel_i / log2(i + 1), divided by the ideal DCG.
double ndcg_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant, std::size_t k);
// AP = sum over i <= k of precision@i * rel_i, divided by min(|relevant|, k).
double map_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant, std::size_t k);

// Percentage of users whose predicted next title matches any of their
// test-year targets. Throws MissingGroundTruth.
double hit_real_transitions(const std::map<std::string, std::string>& predictions,
                            const std::vector<TransitionRecord>& test_records);

// Most frequent next title of `current` in training, ties to the smallest id.
// Throws NoTrainingData.
std::string frequency_baseline(const std::vector<TransitionRecord>& training, const std::string& current);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

// Two-sided Welch test. Throws InsufficientSamples when either side has
// fewer than two values; zero variance on both sides gives t = 0, p = 1 for
// equal means.
TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

struct LatencySummary {
    double mean = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
};

// Nearest-rank percentiles. Throws InvalidArgument on empty input.
LatencySummary summarize_latency(const std::vector<double>& samples_ms);

}  // namespace jobrec::bench
