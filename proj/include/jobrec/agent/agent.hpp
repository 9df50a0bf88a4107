#pragma once

#include "jobrec/agent/types.hpp"
#include "jobrec/lm/backend.hpp"

#include <optional>
#include <string>

namespace jobrec::agent {

// Simple-path queries see this many trailing turns of raw history.
inline constexpr std::size_t kSimpleHistoryWindow = 10;
inline constexpr int kDefaultReplanBudget = 3;

std::string serialize_history(const History& history, std::size_t last_n = static_cast<std::size_t>(-1));
std::string profile_summary(const UserProfile& profile);

// Routes a query. Unusable verdict text is retried once and then treated as
// Complex. Throws EmptyQuery, BackendError.
Complexity classify_complexity(const std::string& query, const History& history, const UserProfile& profile,
                               const lm::LmBackend& backend);

// Keeps only the relevant history turns. With none kept, text == query.
IntegratedQuery integrate_memory(const std::string& query, const History& history, const UserProfile& profile,
                                 const lm::LmBackend& backend);

// Throws PlanParseError / PlanInvalid when the planner output is unusable
// twice in a row.
Plan decompose(const IntegratedQuery& integrated, const lm::LmBackend& backend,
               const UserProfile* profile = nullptr);

// Plan wire format: JSON array of groups of {"d","tool","args"} objects.
Plan parse_plan(const std::string& text);
std::string serialize_plan(const Plan& plan);
// Throws PlanInvalid.
void validate_plan(const Plan& plan);

// Returns std::nullopt (give up) when budget_remaining is 0. Throws
// ContractViolation when the feedback names no failing sub-task.
std::optional<Plan> replan(const Plan& previous, const Feedback& feedback, int budget_remaining,
                           const lm::LmBackend& backend, const IntegratedQuery* integrated = nullptr);

}  // namespace jobrec::agent
