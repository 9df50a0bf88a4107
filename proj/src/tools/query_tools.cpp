#include "jobrec/tools/query_tools.hpp"

#include "jobrec/error.hpp"

#include <optional>

namespace jobrec::tools {

using nlohmann::json;

json to_json(const TemplateCall& call) {
    return {{"template", call.template_id}, {"bindings", call.bindings}, {"rows", call.rows}};
}

TemplateCall select_and_fill_template(const agent::SubTask& intent, const kgraph::KnowledgeGraph& graph) {
    if (intent.tool != agent::ToolHint::GraphTemplate) {
        throw Error(Errc::ContractViolation, "select_and_fill_template needs a graph_template sub-task");
    }
    auto it = intent.args.find("template");
    if (it == intent.args.end()) throw Error(Errc::MissingParameter, "sub-task names no template");
    TemplateCall call;
    call.template_id = it->second;
    for (const auto& [k, v] : intent.args) {
        if (k != "template") call.bindings[k] = v;
    }
    call.rows = kgraph::execute_template(graph, call.template_id, call.bindings);
    return call;
}

namespace {

std::optional<TemplateCall> parse_call(const std::string& text) {
    try {
        const auto j = json::parse(text);
        TemplateCall call;
        call.template_id = j.at("template").get<std::string>();
        const json bindings = j.value("bindings", json::object());
        for (const auto& [k, v] : bindings.items()) {
            call.bindings[k] = v.get<std::string>();
        }
        if (!kgraph::TemplateRegistry::builtin().find(call.template_id)) return std::nullopt;
        return call;
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

}  // namespace

TemplateCall text_to_query(const std::string& text, const std::string& schema, const lm::LmBackend& backend,
                           const kgraph::KnowledgeGraph& graph) {
    lm::LmRequest request{lm::prompt_ids::kTextToQuery, {{"text", text}, {"schema", schema}}, 512};
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto call = parse_call(backend.complete(request).text);
        if (!call) continue;
        call->rows = kgraph::execute_template(graph, call->template_id, call->bindings);
        return *call;
    }
    throw Error(Errc::QueryGenerationFailed, "no usable template call for: " + text);
}

}  // namespace jobrec::tools
