#include "bp/planner.hpp"

#include "bp/errors.hpp"

#include <algorithm>

namespace bp {

InputSource InputSource::root_folder(std::string p) {
    InputSource s;
    s.kind = Kind::RootFolder;
    s.path = std::move(p);
    return s;
}

InputSource InputSource::upstream_task(TaskId t) {
    InputSource s;
    s.kind = Kind::UpstreamTask;
    s.task = std::move(t);
    return s;
}

std::optional<TaskId> ExecutionPlan::upstream_of(const TaskId& id) const {
    for (const auto& [up, down] : edges) {
        if (down == id) {
            return up;
        }
    }
    return std::nullopt;
}

std::vector<TaskId> ExecutionPlan::downstream_of(const TaskId& id) const {
    std::vector<TaskId> out;
    for (const auto& [up, down] : edges) {
        if (up == id) {
            out.push_back(down);
        }
    }
    return out;
}

ExecutionPlan build_plan(const JobConfig& cfg) {
    ExecutionPlan plan;
    for (const TaskSpec& task : cfg.tasks) {
        plan.nodes.push_back(task.id);
    }

    for (const TaskSpec& task : cfg.tasks) {
        if (!task.pipeline_taskid) {
            continue;
        }
        const TaskId& upstream = *task.pipeline_taskid;
        if (!cfg.find_task(upstream)) {
            throw DanglingReferenceError("task " + task.id.str() +
                                         " references unknown task " +
                                         upstream.str());
        }
        plan.edges.emplace_back(upstream, task.id);
    }

    // Kahn's algorithm; the ready set is kept ordered so ties break
    // lexicographically on the TaskId.
    std::map<TaskId, int> pending_upstreams;
    for (const TaskId& node : plan.nodes) {
        pending_upstreams[node] = 0;
    }
    for (const auto& [up, down] : plan.edges) {
        ++pending_upstreams[down];
    }
    std::set<TaskId> ready;
    for (const auto& [node, degree] : pending_upstreams) {
        if (degree == 0) {
            ready.insert(node);
        }
    }
    while (!ready.empty()) {
        const TaskId node = *ready.begin();
        ready.erase(ready.begin());
        plan.order.push_back(node);
        for (const auto& [up, down] : plan.edges) {
            if (up == node && --pending_upstreams[down] == 0) {
                ready.insert(down);
            }
        }
    }
    if (plan.order.size() != plan.nodes.size()) {
        std::string cycle;
        for (const auto& [node, degree] : pending_upstreams) {
            if (degree > 0) {
                cycle += cycle.empty() ? node.str() : ", " + node.str();
            }
        }
        throw CycleError("pipeline references form a cycle involving: " + cycle);
    }

    for (const TaskSpec& task : cfg.tasks) {
        if (task.pipeline_taskid) {
            plan.source_of[task.id] = InputSource::upstream_task(*task.pipeline_taskid);
        } else {
            plan.source_of[task.id] =
                InputSource::root_folder(cfg.effective_img_folder(task));
        }
    }
    return plan;
}

std::vector<TaskId> ready_tasks(const ExecutionPlan& plan,
                                const std::set<TaskId>& completed) {
    for (const TaskId& id : completed) {
        if (std::find(plan.nodes.begin(), plan.nodes.end(), id) == plan.nodes.end()) {
            throw DomainError("completed set contains " + id.str() +
                              " which is not in the plan");
        }
    }
    std::vector<TaskId> out;
    for (const TaskId& id : plan.order) {
        if (completed.contains(id)) {
            continue;
        }
        const auto upstream = plan.upstream_of(id);
        if (!upstream || completed.contains(*upstream)) {
            out.push_back(id);
        }
    }
    return out;
}

} // namespace bp
