#include "jobrec/lm/backend.hpp"

#include "jobrec/error.hpp"
#include "jobrec/kgraph/graph.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#ifndef JOBREC_DEFAULT_DATA_DIR
#define JOBREC_DEFAULT_DATA_DIR "data"
#endif

namespace jobrec::lm {

using nlohmann::json;

namespace {

const std::set<std::string>& stop_words() {
    static const std::set<std::string> words{
        "a",      "about", "after",  "all",    "also",   "am",     "an",     "and",   "any",   "are",
        "as",     "at",    "be",     "been",   "but",    "by",     "can",    "could", "did",   "do",
        "does",   "for",   "from",   "get",    "give",   "go",     "had",    "has",   "have",  "he",
        "help",   "her",   "here",   "him",    "his",    "how",    "i",      "if",    "in",    "into",
        "is",     "it",    "its",    "just",   "know",   "let",    "like",   "look",  "me",    "more",
        "my",     "need",  "no",     "not",    "now",    "of",     "ok",     "okay",  "on",    "or",
        "our",    "out",   "please", "so",     "some",   "tell",   "than",   "that",  "the",   "their",
        "them",   "then",  "there",  "these",  "they",   "this",   "to",     "too",   "up",    "us",
        "very",   "want",  "was",    "we",     "were",   "what",   "when",   "where", "which", "who",
        "why",    "will",  "with",   "would",  "you",    "your",   "find",   "show",  "s",     "thanks",
        "thank",  "hi",    "hello",  "going",  "should", "really", "other",  "only",  "new",   "good",
        "great",  "much",  "many",   "something", "anything", "yes", "sure",  "well",  "one",   "there's",
    };
    return words;
}

const std::set<std::string>& job_search_words() {
    static const std::set<std::string> words{"job",      "jobs",    "role",     "roles",    "opening",
                                             "openings", "position", "positions", "career",  "vacancy",
                                             "vacancies", "opportunities", "opportunity", "apply", "hiring"};
    return words;
}

std::vector<std::string> raw_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::string json_escape_inner(const std::string& value) {
    std::string dumped = json(value).dump();
    return dumped.substr(1, dumped.size() - 2);
}

// Fills `{capture}` / `{capture?}`; returns false when a required capture is missing.
bool fill_captures(const std::string& pattern, const std::map<std::string, std::string>& captures,
                   std::string& out) {
    out.clear();
    std::size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] == '{') {
            std::size_t j = i + 1;
            while (j < pattern.size() &&
                   (std::isalnum(static_cast<unsigned char>(pattern[j])) || pattern[j] == '_'))
                ++j;
            bool optional = false;
            std::size_t close = j;
            if (close < pattern.size() && pattern[close] == '?') {
                optional = true;
                ++close;
            }
            if (j > i + 1 && close < pattern.size() && pattern[close] == '}') {
                auto it = captures.find(pattern.substr(i + 1, j - i - 1));
                if (it == captures.end()) {
                    if (!optional) return false;
                } else {
                    out += json_escape_inner(it->second);
                }
                i = close + 1;
                continue;
            }
        }
        out.push_back(pattern[i]);
        ++i;
    }
    return true;
}

struct HistoryLine {
    std::size_t index;
    std::string role;
    std::string text;
};

// History is serialized by the agent as "[i] role: text" lines.
std::vector<HistoryLine> parse_history(const std::string& history) {
    std::vector<HistoryLine> lines;
    std::stringstream ss(history);
    for (std::string line; std::getline(ss, line);) {
        if (line.size() < 4 || line[0] != '[') continue;
        auto close = line.find(']');
        auto colon = line.find(':', close);
        if (close == std::string::npos || colon == std::string::npos) continue;
        try {
            HistoryLine h;
            h.index = std::stoul(line.substr(1, close - 1));
            h.role = line.substr(close + 2, colon - close - 2);
            h.text = line.substr(colon + 2 <= line.size() ? colon + 2 : line.size());
            lines.push_back(std::move(h));
        } catch (const std::exception&) {
            continue;
        }
    }
    return lines;
}

}  // namespace

std::vector<std::string> content_tokens(const std::string& text) {
    std::vector<std::string> out;
    for (auto& t : raw_tokens(text)) {
        if (t.size() < 2 || stop_words().count(t)) continue;
        out.push_back(std::move(t));
    }
    return out;
}

bool history_turn_relevant(const Gazetteer& gazetteer, const std::string& query, const std::string& turn) {
    const auto q_tokens = content_tokens(query);
    const auto t_tokens = content_tokens(turn);
    const std::set<std::string> q_set(q_tokens.begin(), q_tokens.end());
    for (const auto& t : t_tokens) {
        if (q_set.count(t)) return true;
    }
    const auto q_entities = gazetteer.extract(query);
    const auto t_entities = gazetteer.extract(turn);
    for (const auto& a : q_entities) {
        for (const auto& b : t_entities) {
            if (a.type == b.type && a.canonical == b.canonical) return true;
        }
    }
    bool job_search = std::any_of(q_entities.begin(), q_entities.end(),
                                  [](const EntityMention& m) { return m.type == EntityType::Title; });
    for (const auto& t : raw_tokens(query)) job_search |= job_search_words().count(t) != 0;
    if (job_search) {
        // Qualifications and preferences stated earlier shape any job search.
        for (const auto& m : t_entities) {
            if (m.type != EntityType::Family) return true;
        }
    }
    return false;
}

RuleTable::RuleTable(std::vector<StubRule> rules) : rules_(std::move(rules)) {
    std::map<Task, bool> closed;
    for (const auto& r : rules_) {
        if (closed[r.task]) {
            throw Error(Errc::RuleTableInvalid,
                        "rule after the catch-all of task " + std::string(to_string(r.task)));
        }
        if (r.any_of.empty()) closed[r.task] = true;
    }
    for (auto t : {Task::Classify, Task::Memory, Task::Plan, Task::Replan, Task::Sufficiency, Task::Query}) {
        if (!closed[t]) {
            throw Error(Errc::RuleTableInvalid, "task " + std::string(to_string(t)) + " has no catch-all rule");
        }
    }
}

RuleTable RuleTable::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::RuleTableInvalid, e.what());
    }
    if (!j.is_array()) throw Error(Errc::RuleTableInvalid, "rule table must be a JSON array");
    std::vector<StubRule> rules;
    for (const auto& r : j) {
        try {
            StubRule rule;
            rule.task = parse_task(r.at("task").get<std::string>());
            for (const auto& p : r.at("any_of")) rule.any_of.push_back(kgraph::lowercase(p.get<std::string>()));
            rule.output = r.at("output").get<std::string>();
            rules.push_back(std::move(rule));
        } catch (const json::exception& e) {
            throw Error(Errc::RuleTableInvalid, e.what());
        }
    }
    return RuleTable(std::move(rules));
}

RuleTable RuleTable::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::RuleTableInvalid, "cannot open rule table " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string default_rule_table_path() { return std::string(JOBREC_DEFAULT_DATA_DIR) + "/stub_rules.v1.json"; }

double SimulatedLatency::for_call(const std::string& prompt, const std::string& output) const {
    const auto tokens = [](const std::string& s) { return static_cast<double>((s.size() + 3) / 4); };
    return per_call_ms + per_input_token_ms * tokens(prompt) + per_token_ms * tokens(output);
}

StubBackend::StubBackend(RuleTable rules, Gazetteer gazetteer, const PromptRegistry& prompts,
                         SimulatedLatency simulated_latency)
    : rules_(std::move(rules)), gazetteer_(std::move(gazetteer)), prompts_(prompts), latency_(simulated_latency) {}

LmResponse StubBackend::complete(const LmRequest& request) const {
    const auto start = std::chrono::steady_clock::now();
    const PromptTemplate& tmpl = prompts_.get(request.template_id);
    const std::string prompt = render_prompt(tmpl, request.bindings);  // also the placeholder check
    std::string text = run_rules(tmpl, request);
    if (request.max_output_length > 0 && text.size() > static_cast<std::size_t>(request.max_output_length)) {
        text.resize(static_cast<std::size_t>(request.max_output_length));
    }
    spdlog::debug("stub {}: prompt {} bytes, output {} bytes", request.template_id, prompt.size(), text.size());
    if (const double ms = latency_.for_call(prompt, text); ms > 0.0) {
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
    }
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    return {std::move(text), BackendKind::Stub, elapsed.count()};
}

std::string StubBackend::run_rules(const PromptTemplate& tmpl, const LmRequest& request) const {
    const std::string input = render_input(tmpl, request.bindings);
    // Rule keywords are matched outside title and city mentions, so "learning"
    // in "Machine Learning Engineer" does not read as a request to learn.
    std::string lower = kgraph::lowercase(input);

    std::map<std::string, std::string> captures{{"query", input}};
    std::map<EntityType, int> counts;
    std::string skills;
    for (const auto& m : gazetteer_.extract(input)) {
        const char* prefix = m.type == EntityType::Title  ? "title"
                             : m.type == EntityType::City ? "city"
                             : m.type == EntityType::Skill ? "skill"
                                                           : "family";
        const int n = counts[m.type]++;
        // `_text` variants carry the words as the user wrote them, for descriptions.
        const std::string surface = input.substr(m.position, m.length);
        captures.emplace(prefix + std::to_string(n), m.canonical);
        captures.emplace(prefix + std::to_string(n) + "_text", surface);
        if (n == 0) {
            captures.emplace(prefix, m.canonical);
            captures.emplace(std::string(prefix) + "_text", surface);
        }
        if ((m.type == EntityType::Title || m.type == EntityType::City) && m.length > 0) {
            const std::string needle = kgraph::lowercase(surface);
            for (auto at = lower.find(needle); at != std::string::npos; at = lower.find(needle, at + m.length)) {
                std::fill_n(lower.begin() + static_cast<std::ptrdiff_t>(at), needle.size(), ' ');
            }
        }
        if (m.type == EntityType::Skill) skills += (skills.empty() ? "" : ",") + m.canonical;
    }
    if (!skills.empty()) captures.emplace("skills", skills);

    // Intent keywords come from the request itself; merged history context
    // only supplies slot values such as a city.
    if (const auto ctx = lower.find(" (context: "); ctx != std::string::npos) lower.resize(ctx);

    for (const auto& rule : rules_.rules()) {
        if (rule.task != tmpl.task) continue;
        if (!rule.any_of.empty()) {
            bool hit = false;
            std::size_t at = 0;
            for (const auto& phrase : rule.any_of) hit |= word_boundary_find(lower, phrase, 0, at);
            if (!hit) continue;
        }
        if (!rule.output.empty() && rule.output.front() == '@') return run_directive(rule.output, request);
        std::string out;
        if (fill_captures(rule.output, captures, out)) return out;
        if (rule.any_of.empty()) {
            throw Error(Errc::RuleTableInvalid, "catch-all rule for " + std::string(to_string(rule.task)) +
                                                    " needs a capture that is absent");
        }
    }
    throw Error(Errc::RuleTableInvalid, "no rule matched task " + std::string(to_string(tmpl.task)));
}

std::string StubBackend::run_directive(const std::string& directive, const LmRequest& request) const {
    const auto& b = request.bindings;
    if (directive == "@relevant_history") {
        const std::string query = b.count("query") ? b.at("query") : std::string{};
        const std::string history = b.count("history") ? b.at("history") : std::string{};
        std::vector<std::size_t> kept;
        std::string context;
        for (const auto& line : parse_history(history)) {
            if (line.role != "user") continue;
            if (!history_turn_relevant(gazetteer_, query, line.text)) continue;
            kept.push_back(line.index);
            context += (context.empty() ? "" : "; ") + line.text;
        }
        std::ostringstream out;
        out << "INDICES:";
        for (std::size_t i = 0; i < kept.size(); ++i) out << (i ? "," : " ") << kept[i];
        out << "\nIntegrated User Query: " << query;
        if (!kept.empty()) out << " (context: " << context << ")";
        return out.str();
    }
    if (directive == "@widen") {
        json plan;
        try {
            plan = json::parse(b.at("plan"));
        } catch (const std::exception&) {
            return b.count("plan") ? b.at("plan") : std::string{"[]"};
        }
        std::stringstream feedback(b.count("feedback") ? b.at("feedback") : std::string{});
        for (std::string line; std::getline(feedback, line);) {
            unsigned g = 0, p = 0;
            if (std::sscanf(line.c_str(), "%u.%u", &g, &p) != 2) continue;
            if (!plan.is_array() || g >= plan.size() || !plan[g].is_array() || p >= plan[g].size()) continue;
            auto& task = plan[g][p];
            if (!task.contains("args") || !task["args"].is_object()) continue;
            auto& args = task["args"];
            // Relax the narrowest filter first.
            for (const char* key : {"city", "family", "title"}) {
                if (args.contains(key)) {
                    args.erase(key);
                    task["d"] = task.value("d", std::string{}) + " (widened: no " + key + " filter)";
                    break;
                }
            }
        }
        return plan.dump();
    }
    throw Error(Errc::RuleTableInvalid, "unknown stub directive " + directive);
}

RemoteBackend::RemoteBackend(RemoteConfig config, const PromptRegistry& prompts)
    : config_(std::move(config)), prompts_(prompts) {
    const auto& url = config_.endpoint;
    const auto scheme_end = url.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    scheme_host_port_ = path_start == std::string::npos ? url : url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

LmResponse RemoteBackend::complete(const LmRequest& request) const {
    const auto start = std::chrono::steady_clock::now();
    const PromptTemplate& tmpl = prompts_.get(request.template_id);
    (void)render_prompt(tmpl, request.bindings);
    const json body{{"system", render_system(tmpl, request.bindings)},
                    {"input", render_input(tmpl, request.bindings)},
                    {"max_tokens", request.max_output_length}};

    httplib::Client client(scheme_host_port_);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) {
        throw Error(Errc::BackendTimeout, config_.endpoint + ": " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(Errc::BackendError, config_.endpoint + " returned HTTP " + std::to_string(res->status));
    }
    std::string text;
    try {
        text = json::parse(res->body).at("text").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(Errc::BackendError, std::string("malformed response body: ") + e.what());
    }
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    return {std::move(text), BackendKind::Remote, elapsed.count()};
}

}  // namespace jobrec::lm
