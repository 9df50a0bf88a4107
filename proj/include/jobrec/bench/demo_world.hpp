#pragma once

#include "jobrec/agent/types.hpp"
#include "jobrec/kgraph/graph.hpp"
#include "jobrec/tools/applications.hpp"

#include <map>
#include <string>
#include <vector>

namespace jobrec::bench {

// A small hand-built retail/tech career graph: 19 titles in six families,
// openings across seven cities, mentors, and a handful of users.
std::vector<kgraph::Record> demo_world_records();
kgraph::KnowledgeGraph demo_world();

// Profiles of the non-mentor associates, keyed by user id.
std::map<std::string, agent::UserProfile> demo_profiles();
tools::ApplicationStore demo_applications();

}  // namespace jobrec::bench
