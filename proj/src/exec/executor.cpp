#include "jobrec/exec/executor.hpp"

#include "jobrec/error.hpp"

#include <future>
#include <thread>

namespace jobrec::exec {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

struct CallOutcome {
    json payload;
    ToolStatus status = ToolStatus::Empty;
    std::string error;
    Clock::time_point end;
};

CallOutcome invoke(const Tool& tool, const agent::Args& args, const ToolContext& context) {
    CallOutcome out;
    try {
        json payload = tool(args, context);
        out.status = classify_payload(payload);
        if (out.status == ToolStatus::Ok) out.payload = std::move(payload);
    } catch (const std::exception& e) {
        out.status = ToolStatus::Error;
        out.error = e.what();
    }
    out.end = Clock::now();
    return out;
}

}  // namespace

std::string_view to_string(ToolStatus status) noexcept {
    switch (status) {
        case ToolStatus::Ok: return "ok";
        case ToolStatus::Empty: return "empty";
        case ToolStatus::Error: return "error";
    }
    return "?";
}

json ToolContext::resolve(const std::string& value) const {
    auto ref = agent::parse_ref(value);
    if (!ref) return value;
    if (prior) {
        auto it = prior->find(*ref);
        if (it != prior->end()) return it->second;
    }
    throw Error(Errc::InvalidArgument, "dependency " + agent::to_string(*ref) + " produced no output");
}

void ToolRegistry::add(agent::ToolHint hint, Tool tool) { tools_[hint] = std::move(tool); }

const Tool* ToolRegistry::find(agent::ToolHint hint) const {
    auto it = tools_.find(hint);
    return it == tools_.end() ? nullptr : &it->second;
}

std::size_t ExecutionTrace::tool_calls() const {
    std::size_t n = 0;
    for (const auto& g : groups) {
        for (const auto& s : g.subtasks) n += s.cached ? 0 : 1;
    }
    return n;
}

json ExecutionTrace::to_json() const {
    json groups_j = json::array();
    for (const auto& g : groups) {
        json subs = json::array();
        for (const auto& s : g.subtasks) {
            subs.push_back({{"tool", agent::to_string(s.tool)}, {"status", exec::to_string(s.status)},
                            {"elapsed_ms", s.elapsed_ms}});
        }
        groups_j.push_back({{"subtasks", std::move(subs)}, {"wall_ms", g.wall_ms}});
    }
    return {{"groups", std::move(groups_j)}, {"total_ms", total_ms}, {"replans", replans}};
}

ToolStatus classify_payload(const json& payload) {
    if (payload.is_null()) return ToolStatus::Empty;
    if ((payload.is_array() || payload.is_object()) && payload.empty()) return ToolStatus::Empty;
    return ToolStatus::Ok;
}

ExecutionOutcome execute_plan(const agent::Plan& plan, const ToolRegistry& registry, const ToolContext& context,
                              const ExecuteOptions& options) {
    for (const auto& group : plan.groups) {
        for (const auto& st : group) {
            if (!registry.contains(st.tool)) {
                throw Error(Errc::ToolNotRegistered, std::string(agent::to_string(st.tool)));
            }
        }
    }

    ExecutionOutcome outcome;
    auto prior = std::make_shared<std::map<TaskIndex, json>>();
    if (context.prior) *prior = *context.prior;
    const auto start = Clock::now();

    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        const auto& group = plan.groups[g];
        ToolContext ctx = context;
        ctx.prior = std::make_shared<const std::map<TaskIndex, json>>(*prior);

        GroupTrace gtrace;
        const auto group_start = Clock::now();
        std::vector<ToolResult> results(group.size());
        std::vector<Clock::time_point> starts(group.size(), group_start);

        auto finish = [&](std::size_t p, CallOutcome out) {
            auto& r = results[p];
            r.index = {g, p};
            r.tool = group[p].tool;
            r.status = out.status;
            r.payload = std::move(out.payload);
            r.error = std::move(out.error);
            r.elapsed_ms = ms_between(starts[p], out.end);
            gtrace.subtasks.push_back({r.index, r.tool, r.status, ms_between(options.origin, starts[p]),
                                       ms_between(options.origin, out.end), r.elapsed_ms, false});
        };

        auto reused = [&](std::size_t p) {
            auto it = options.reuse.find({g, p});
            if (it == options.reuse.end()) return false;
            results[p] = it->second;
            results[p].index = {g, p};
            results[p].cached = true;
            const double at = ms_between(options.origin, Clock::now());
            gtrace.subtasks.push_back({{g, p}, results[p].tool, results[p].status, at, at, 0.0, true});
            return true;
        };

        if (options.mode == ExecutionMode::Sequential) {
            for (std::size_t p = 0; p < group.size(); ++p) {
                if (reused(p)) {
                    if (options.on_result) options.on_result(results[p]);
                    continue;
                }
                starts[p] = Clock::now();
                // Same deadline handling as the concurrent path, one task at a time.
                auto task = std::make_shared<std::packaged_task<CallOutcome()>>(
                    [tool = *registry.find(group[p].tool), args = group[p].args, ctx] {
                        return invoke(tool, args, ctx);
                    });
                auto fut = task->get_future();
                std::thread([task] { (*task)(); }).detach();
                if (fut.wait_for(options.timeout) == std::future_status::ready) {
                    finish(p, fut.get());
                } else {
                    finish(p, {json(), ToolStatus::Error, "timed out", Clock::now()});
                }
                if (options.on_result) options.on_result(results[p]);
            }
        } else {
            std::vector<std::future<CallOutcome>> futures(group.size());
            std::vector<bool> skip(group.size(), false);
            for (std::size_t p = 0; p < group.size(); ++p) {
                if (options.reuse.count({g, p})) {
                    skip[p] = true;
                    continue;
                }
                auto task = std::make_shared<std::packaged_task<CallOutcome()>>(
                    [tool = *registry.find(group[p].tool), args = group[p].args, ctx] {
                        return invoke(tool, args, ctx);
                    });
                futures[p] = task->get_future();
                starts[p] = Clock::now();
                std::thread([task] { (*task)(); }).detach();
            }
            const auto deadline = group_start + options.timeout;
            for (std::size_t p = 0; p < group.size(); ++p) {
                if (skip[p]) {
                    reused(p);
                } else if (futures[p].wait_until(deadline) == std::future_status::ready) {
                    finish(p, futures[p].get());
                } else {
                    finish(p, {json(), ToolStatus::Error, "timed out", Clock::now()});
                }
                if (options.on_result) options.on_result(results[p]);
            }
        }

        gtrace.wall_ms = ms_between(group_start, Clock::now());
        std::sort(gtrace.subtasks.begin(), gtrace.subtasks.end(),
                  [](const SubtaskTrace& a, const SubtaskTrace& b) { return a.index < b.index; });
        outcome.trace.groups.push_back(std::move(gtrace));
        for (auto& r : results) {
            if (r.status == ToolStatus::Ok) (*prior)[r.index] = r.payload;
            outcome.results.push_back(std::move(r));
        }
    }
    outcome.trace.total_ms = ms_between(start, Clock::now());
    return outcome;
}

agent::Feedback assess_sufficiency(const std::vector<ToolResult>& results, const agent::IntegratedQuery& integrated,
                                   const lm::LmBackend* backend) {
    agent::Feedback fb;
    for (const auto& r : results) {
        if (r.status == ToolStatus::Ok) continue;
        fb.failing.emplace_back(r.index, r.status == ToolStatus::Error ? "error: " + r.error : "empty result");
    }
    if (!fb.failing.empty() || results.empty()) {
        fb.verdict = agent::SufficiencyVerdict::Insufficient;
        return fb;
    }
    if (backend && backend->kind() == lm::BackendKind::Remote) {
        json summary = json::array();
        for (const auto& r : results) {
            summary.push_back({{"task", agent::to_string(r.index)}, {"tool", agent::to_string(r.tool)},
                               {"payload", r.payload}});
        }
        const auto reply = backend->complete(
            {lm::prompt_ids::kSufficiency, {{"query", integrated.text}, {"results", summary.dump()}}, 64});
        if (reply.text.find("INSUFFICIENT") != std::string::npos) {
            fb.verdict = agent::SufficiencyVerdict::Insufficient;
            // Without a named culprit, every sub-task is up for revision.
            for (const auto& r : results) fb.failing.emplace_back(r.index, "judged insufficient");
        }
    }
    return fb;
}

}  // namespace jobrec::exec
