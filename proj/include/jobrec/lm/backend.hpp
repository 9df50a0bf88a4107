#pragma once

#include "jobrec/lm/gazetteer.hpp"
#include "jobrec/lm/prompt.hpp"

#include <chrono>
#include <memory>
#include <string>
#include <vector>

namespace jobrec::lm {

struct LmRequest {
    std::string template_id;
    Bindings bindings;
    int max_output_length = 512;
};

enum class BackendKind { Stub, Remote };

struct LmResponse {
    std::string text;
    BackendKind backend = BackendKind::Stub;
    double elapsed_ms = 0.0;
};

// Stateless per call; implementations must tolerate concurrent use.
class LmBackend {
public:
    virtual ~LmBackend() = default;
    virtual LmResponse complete(const LmRequest& request) const = 0;
    virtual BackendKind kind() const noexcept = 0;
};

struct StubRule {
    Task task = Task::Classify;
    // Case-insensitive phrases matched on word boundaries against the rendered
    // live input; empty means catch-all.
    std::vector<std::string> any_of;
    // Literal text with `{entity}` captures, or an `@directive`.
    std::string output;
};

class RuleTable {
public:
    // Throws RuleTableInvalid when a task has no catch-all or a catch-all is
    // followed by further rules of the same task.
    explicit RuleTable(std::vector<StubRule> rules);

    static RuleTable from_json_text(const std::string& text);
    static RuleTable load_file(const std::string& path);

    const std::vector<StubRule>& rules() const noexcept { return rules_; }

private:
    std::vector<StubRule> rules_;
};

// Simulated generation time: a fixed cost per call plus a cost per output
// word, so long plans take longer than one-line verdicts.
struct SimulatedLatency {
    double per_call_ms = 0.0;
    double per_input_token_ms = 0.0;  // prefill
    double per_token_ms = 0.0;        // decode; tokens estimated as ceil(bytes / 4)

    double for_call(const std::string& prompt, const std::string& output) const;
};

// Deterministic rule-table backend: same request, byte-identical response.
class StubBackend final : public LmBackend {
public:
    StubBackend(RuleTable rules, Gazetteer gazetteer,
                const PromptRegistry& prompts = PromptRegistry::builtin(),
                SimulatedLatency simulated_latency = {});

    LmResponse complete(const LmRequest& request) const override;
    BackendKind kind() const noexcept override { return BackendKind::Stub; }

    const Gazetteer& gazetteer() const noexcept { return gazetteer_; }

private:
    std::string run_rules(const PromptTemplate& tmpl, const LmRequest& request) const;
    std::string run_directive(const std::string& directive, const LmRequest& request) const;

    RuleTable rules_;
    Gazetteer gazetteer_;
    const PromptRegistry& prompts_;
    SimulatedLatency latency_;
};

struct RemoteConfig {
    std::string endpoint;  // http://host:port/path
    int timeout_ms = 10000;
};

// POSTs {system, input, max_tokens} and expects {text}. Connection failures
// and deadline overruns raise BackendTimeout; non-2xx replies BackendError.
class RemoteBackend final : public LmBackend {
public:
    explicit RemoteBackend(RemoteConfig config, const PromptRegistry& prompts = PromptRegistry::builtin());

    LmResponse complete(const LmRequest& request) const override;
    BackendKind kind() const noexcept override { return BackendKind::Remote; }

private:
    RemoteConfig config_;
    std::string scheme_host_port_;
    std::string path_;
    const PromptRegistry& prompts_;
};

// Path of the rule table shipped with the repository.
std::string default_rule_table_path();

// Memory relevance used by the stub: content-token overlap after stop-word
// removal, a shared entity, or a job-search query meeting a turn that states
// a skill, city or title.
bool history_turn_relevant(const Gazetteer& gazetteer, const std::string& query, const std::string& turn);

std::vector<std::string> content_tokens(const std::string& text);

}  // namespace jobrec::lm
