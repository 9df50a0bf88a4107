#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace jobrec::lm {

using Bindings = std::map<std::string, std::string>;

enum class Task { Classify, Memory, Plan, Replan, Sufficiency, Query };

std::string_view to_string(Task task) noexcept;
Task parse_task(std::string_view text);

struct FewShotExample {
    std::string input;
    std::string output;
};

// A prompt is the system text, then the few-shot examples in order, then the
// live input. Placeholders are written `{name}` in the system text or the
// live-input pattern.
struct PromptTemplate {
    std::string id;
    Task task = Task::Classify;
    std::string system_text;
    std::vector<FewShotExample> few_shot;
    std::string input_text;

    std::vector<std::string> placeholders() const;
};

// Replaces `{name}` occurrences; throws MissingPlaceholder for unbound names.
std::string substitute(std::string_view text, const Bindings& bindings);

// Full prompt text. Extra bindings are ignored.
std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);
// System text plus serialized few-shot examples.
std::string render_system(const PromptTemplate& tmpl, const Bindings& bindings);
// Live input section only.
std::string render_input(const PromptTemplate& tmpl, const Bindings& bindings);

class PromptRegistry {
public:
    // Throws ContractViolation on a duplicate id.
    void add(PromptTemplate tmpl);
    // Throws UnknownTemplate.
    const PromptTemplate& get(const std::string& id) const;
    bool contains(const std::string& id) const { return templates_.count(id) != 0; }

    // The classify / memory / plan / replan / sufficiency / query prompts.
    static const PromptRegistry& builtin();

private:
    std::map<std::string, PromptTemplate> templates_;
};

namespace prompt_ids {
inline constexpr const char* kClassify = "classify";
inline constexpr const char* kMemory = "memory";
inline constexpr const char* kPlan = "plan";
inline constexpr const char* kReplan = "replan";
inline constexpr const char* kSufficiency = "sufficiency";
inline constexpr const char* kTextToQuery = "text_to_query";
}  // namespace prompt_ids

}  // namespace jobrec::lm
