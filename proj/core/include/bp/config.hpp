#pragma once

#include "bp/task_id.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bp {

/// Default reaction to a critical issue, serialized as a single letter.
enum class IssueAction : char {
    Ask = 'A',
    SkipTask = 'S',
    AutoFix = 'F',
    Terminate = 'T',
};

/// Throws SchemaError for any letter outside {A, S, F, T}.
IssueAction issue_action_from_letter(char letter);
char issue_action_letter(IssueAction action);

struct IssuePolicy {
    IssueAction default_action = IssueAction::AutoFix;
    int max_fix_retries = 5;
    double fallback_wait_s = 1800.0;

    friend bool operator==(const IssuePolicy&, const IssuePolicy&) = default;
};

struct TaskSpec {
    TaskId id;
    std::optional<std::string> img_folder;
    std::optional<TaskId> pipeline_taskid;
    std::optional<int> pool_size;
    bool multi_pic = false;
    std::optional<IssuePolicy> issue_policy;

    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// Validated job configuration. Tasks keep document order; ids are unique.
struct JobConfig {
    std::vector<TaskSpec> tasks;
    std::string img_folder;
    std::optional<int> pool_size;
    bool debug = false;
    IssuePolicy issue_policy; // root default

    const TaskSpec* find_task(const TaskId& id) const;

    /// Task-level policy when present, else the root default. Total: every
    /// task resolves to exactly one policy.
    IssuePolicy effective_policy(const TaskId& id) const;

    /// Task img_folder when set, else the root img_folder. Meaningless for
    /// pipeline-fed tasks.
    std::string effective_img_folder(const TaskSpec& task) const;

    friend bool operator==(const JobConfig&, const JobConfig&) = default;
};

/// Parses and validates a JSON config document into a JobConfig with all
/// defaults applied. Throws SyntaxError on malformed JSON and SchemaError
/// on schema violations (missing "tasks"/"img_folder", wrong types,
/// malformed task ids, unknown default_action letter, pool_size < 1,
/// unknown keys).
JobConfig parse_config(std::string_view text);

/// Canonical JSON form; parse_config(serialize_config(cfg)) == cfg.
std::string serialize_config(const JobConfig& cfg);

enum class Severity {
    Warning,
    Error,
};

struct Finding {
    Severity severity = Severity::Error;
    std::optional<TaskId> task;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool ok() const; // no Error-severity findings
    std::size_t error_count() const;
    std::size_t warning_count() const;
};

/// Cross-checks a parsed config against the set of known platform codes.
/// Errors: unknown platform code, dangling pipeline_taskid, both input
/// sources set. Warning: multi_pic without any pool_size (worker default
/// applies).
ValidationReport validate_config(const JobConfig& cfg,
                                 const std::set<std::string>& platform_codes);

} // namespace bp
