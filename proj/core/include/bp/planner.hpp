#pragma once

#include "bp/config.hpp"
#include "bp/task_id.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace bp {

/// Where a task's input pictures come from: a directory on disk, or the
/// output directory of an upstream task.
struct InputSource {
    enum class Kind {
        RootFolder,
        UpstreamTask,
    };

    Kind kind = Kind::RootFolder;
    std::string path; // set when kind == RootFolder
    TaskId task;      // set when kind == UpstreamTask

    static InputSource root_folder(std::string p);
    static InputSource upstream_task(TaskId t);

    friend bool operator==(const InputSource&, const InputSource&) = default;
};

/// Acyclic task graph with a deterministic execution order and one resolved
/// input source per task. Immutable after construction.
struct ExecutionPlan {
    std::vector<TaskId> nodes;                    // config order
    std::vector<std::pair<TaskId, TaskId>> edges; // (upstream, downstream)
    std::vector<TaskId> order;                    // topological
    std::map<TaskId, InputSource> source_of;

    std::optional<TaskId> upstream_of(const TaskId& id) const;
    std::vector<TaskId> downstream_of(const TaskId& id) const;

    friend bool operator==(const ExecutionPlan&, const ExecutionPlan&) = default;
};

/// Builds the plan for a config that passed validation. The order is a
/// topological sort with lexicographic TaskId tie-breaking among ready
/// nodes. Throws CycleError (self-references included) and
/// DanglingReferenceError.
ExecutionPlan build_plan(const JobConfig& cfg);

/// All not-yet-completed tasks whose upstream (if any) is completed, in
/// plan order. Throws DomainError when completed is not a subset of the
/// plan's nodes.
std::vector<TaskId> ready_tasks(const ExecutionPlan& plan,
                                const std::set<TaskId>& completed);

} // namespace bp
