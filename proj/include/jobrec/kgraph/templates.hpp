#pragma once

#include "jobrec/kgraph/graph.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace jobrec::kgraph {

using Bindings = std::map<std::string, std::string>;
// Result rows: a JSON array of flat objects.
using Rows = nlohmann::json;

struct QueryTemplate {
    std::string id;
    std::vector<std::string> parameters;
    // Declarative description of the subgraph pattern and aggregation; every
    // parameter appears in it as `$name`.
    std::string semantics;
    std::function<Rows(const KnowledgeGraph&, const Bindings&)> procedure;
};

class TemplateRegistry {
public:
    // Throws ContractViolation on duplicate ids or undocumented parameters.
    void add(QueryTemplate tmpl);

    const QueryTemplate* find(const std::string& id) const;
    std::vector<std::string> ids() const;

    // Registry holding every built-in template.
    static const TemplateRegistry& builtin();

private:
    std::map<std::string, QueryTemplate> templates_;
};

// Throws TemplateNotFound, MissingParameter, plus whatever the procedure raises.
Rows execute_template(const KnowledgeGraph& graph, const std::string& template_id,
                      const Bindings& bindings,
                      const TemplateRegistry& registry = TemplateRegistry::builtin());

// Short human-readable description of the graph schema and templates, fed to
// the text-to-query prompt.
std::string schema_description(const TemplateRegistry& registry = TemplateRegistry::builtin());

// Skill ids required by a title.
std::set<std::string> required_skills(const KnowledgeGraph& graph, const Node& title);
// Required skills of `title` not present in `held`, sorted.
std::vector<std::string> skill_gap(const KnowledgeGraph& graph, const std::set<std::string>& held,
                                   const Node& title);

// Resolves a title by id, name or alias; throws NodeNotFound.
const Node& resolve_title(const KnowledgeGraph& graph, const std::string& name);

}  // namespace jobrec::kgraph
