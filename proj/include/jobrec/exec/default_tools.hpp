#pragma once

#include "jobrec/exec/executor.hpp"

namespace jobrec::exec {

// Registry wiring every ToolHint to its implementation over the tool context.
//
// Argument conventions (all optional unless noted):
//   job_recommend      title, city, family, k
//   career_path        destination (required)
//   career_growth      title
//   skill_gap          target (required)
//   learning_resources gap (required)
//   mentor             gap (required), target
//   graph_template     template (required) plus its bindings
//   text_to_query      text (defaults to the query)
//   application_status -
//   compare            left, right (required)
// Any value may be a "$ref:G.P" to an earlier sub-task's payload.
ToolRegistry default_tool_registry();

// Title id a payload points to: a title name, a recommendation list (top
// opening's title), a growth or career path (next step), or a skill-gap report.
std::string title_from(const json& value, const kgraph::KnowledgeGraph& graph);
// Skill ids from a skill-gap report, template rows or a comma-separated list.
std::vector<std::string> skills_from(const json& value);

}  // namespace jobrec::exec
