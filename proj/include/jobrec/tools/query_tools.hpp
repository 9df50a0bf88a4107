#pragma once

#include "jobrec/agent/types.hpp"
#include "jobrec/kgraph/templates.hpp"
#include "jobrec/lm/backend.hpp"

#include <string>

namespace jobrec::tools {

struct TemplateCall {
    std::string template_id;
    kgraph::Bindings bindings;
    kgraph::Rows rows;
};

nlohmann::json to_json(const TemplateCall& call);

// intent.args carries `template` plus one entry per binding.
TemplateCall select_and_fill_template(const agent::SubTask& intent, const kgraph::KnowledgeGraph& graph);

// The model must name a registered template and its bindings; anything else,
// twice, raises QueryGenerationFailed.
TemplateCall text_to_query(const std::string& text, const std::string& schema, const lm::LmBackend& backend,
                           const kgraph::KnowledgeGraph& graph);

}  // namespace jobrec::tools
