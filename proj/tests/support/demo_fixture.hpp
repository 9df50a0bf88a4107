#pragma once

#include "jobrec/bench/demo_world.hpp"
#include "jobrec/exec/default_tools.hpp"
#include "jobrec/exec/orchestrator.hpp"
#include "jobrec/lm/backend.hpp"

#include <memory>

// The demo world wired to the shipped stub rule table.
struct DemoFixture {
    std::shared_ptr<const jobrec::kgraph::KnowledgeGraph> graph =
        std::make_shared<const jobrec::kgraph::KnowledgeGraph>(jobrec::bench::demo_world());
    std::shared_ptr<const jobrec::lm::StubBackend> stub = std::make_shared<const jobrec::lm::StubBackend>(
        jobrec::lm::RuleTable::load_file(jobrec::lm::default_rule_table_path()),
        jobrec::lm::Gazetteer::from_graph(*graph));
    std::map<std::string, jobrec::agent::UserProfile> profiles = jobrec::bench::demo_profiles();
    jobrec::exec::ToolRegistry registry = jobrec::exec::default_tool_registry();

    jobrec::exec::ToolEnvironment env() const {
        jobrec::exec::ToolEnvironment e;
        e.graph = graph;
        e.applications = std::make_shared<const jobrec::tools::ApplicationStore>(jobrec::bench::demo_applications());
        e.backend = stub;
        return e;
    }

    jobrec::exec::SessionState session(const std::string& user = "u_alex") const {
        jobrec::exec::SessionState s;
        s.profile = profiles.at(user);
        return s;
    }

    jobrec::exec::ToolContext context(const std::string& user = "u_alex") const {
        return jobrec::exec::ToolContext{env(), profiles.at(user), {}, "", nullptr};
    }
};
