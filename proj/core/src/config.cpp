#include "bp/config.hpp"

#include "bp/errors.hpp"

#include <json.hpp>

#include <algorithm>

namespace bp {

using ordered_json = nlohmann::ordered_json;

IssueAction issue_action_from_letter(char letter) {
    switch (letter) {
    case 'A': return IssueAction::Ask;
    case 'S': return IssueAction::SkipTask;
    case 'F': return IssueAction::AutoFix;
    case 'T': return IssueAction::Terminate;
    default:
        throw SchemaError(std::string("unknown default_action letter '") +
                          letter + "': expected one of A, S, F, T");
    }
}

char issue_action_letter(IssueAction action) {
    return static_cast<char>(action);
}

const TaskSpec* JobConfig::find_task(const TaskId& id) const {
    const auto it = std::find_if(tasks.begin(), tasks.end(),
                                 [&](const TaskSpec& t) { return t.id == id; });
    return it == tasks.end() ? nullptr : &*it;
}

IssuePolicy JobConfig::effective_policy(const TaskId& id) const {
    if (const TaskSpec* task = find_task(id); task && task->issue_policy) {
        return *task->issue_policy;
    }
    return issue_policy;
}

std::string JobConfig::effective_img_folder(const TaskSpec& task) const {
    return task.img_folder ? *task.img_folder : img_folder;
}

namespace {

void require_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw SchemaError("unknown key \"" + key + "\" in " + where);
        }
    }
}

std::optional<int> parse_pool_size(const ordered_json& obj, const std::string& where) {
    if (!obj.contains("pool_size") || obj.at("pool_size").is_null()) {
        return std::nullopt;
    }
    const auto& v = obj.at("pool_size");
    if (!v.is_number_integer()) {
        throw SchemaError("\"pool_size\" must be an integer in " + where);
    }
    const auto n = v.get<long long>();
    if (n < 1) {
        throw SchemaError("\"pool_size\" must be >= 1 in " + where +
                          " (got " + std::to_string(n) + ")");
    }
    return static_cast<int>(n);
}

std::optional<IssuePolicy> parse_issue_policy(const ordered_json& obj,
                                              const std::string& where) {
    if (!obj.contains("critical_issues_handling") ||
        obj.at("critical_issues_handling").is_null()) {
        return std::nullopt;
    }
    const auto& node = obj.at("critical_issues_handling");
    if (!node.is_object()) {
        throw SchemaError("\"critical_issues_handling\" must be an object in " + where);
    }
    require_keys(node, {"default_action", "max_fix_retries", "fallback_wait_s"},
                 "\"critical_issues_handling\" of " + where);
    if (!node.contains("default_action") || !node.at("default_action").is_string()) {
        throw SchemaError("\"default_action\" must be a one-letter string in " + where);
    }
    const auto letter = node.at("default_action").get<std::string>();
    if (letter.size() != 1) {
        throw SchemaError("\"default_action\" must be a one-letter string in " +
                          where + " (got \"" + letter + "\")");
    }
    IssuePolicy policy;
    policy.default_action = issue_action_from_letter(letter[0]);
    if (node.contains("max_fix_retries") && !node.at("max_fix_retries").is_null()) {
        if (!node.at("max_fix_retries").is_number_integer() ||
            node.at("max_fix_retries").get<long long>() < 1) {
            throw SchemaError("\"max_fix_retries\" must be a positive integer in " + where);
        }
        policy.max_fix_retries = node.at("max_fix_retries").get<int>();
    }
    if (node.contains("fallback_wait_s") && !node.at("fallback_wait_s").is_null()) {
        if (!node.at("fallback_wait_s").is_number() ||
            node.at("fallback_wait_s").get<double>() < 0) {
            throw SchemaError("\"fallback_wait_s\" must be a non-negative number in " + where);
        }
        policy.fallback_wait_s = node.at("fallback_wait_s").get<double>();
    }
    return policy;
}

std::optional<std::string> parse_optional_string(const ordered_json& obj,
                                                 const char* key,
                                                 const std::string& where) {
    if (!obj.contains(key) || obj.at(key).is_null()) {
        return std::nullopt;
    }
    if (!obj.at(key).is_string()) {
        throw SchemaError(std::string("\"") + key + "\" must be a string in " + where);
    }
    return obj.at(key).get<std::string>();
}

TaskSpec parse_task(const std::string& key, const ordered_json& node) {
    const std::string where = "task \"" + key + "\"";
    TaskSpec task;
    task.id = TaskId::parse(key);
    if (!node.is_object()) {
        throw SchemaError(where + " must be an object");
    }
    require_keys(node,
                 {"img_folder", "pipeline_taskid", "pool_size", "multi_pic",
                  "critical_issues_handling"},
                 where);
    task.img_folder = parse_optional_string(node, "img_folder", where);
    if (const auto ref = parse_optional_string(node, "pipeline_taskid", where)) {
        task.pipeline_taskid = TaskId::parse(*ref);
    }
    task.pool_size = parse_pool_size(node, where);
    if (node.contains("multi_pic") && !node.at("multi_pic").is_null()) {
        if (!node.at("multi_pic").is_boolean()) {
            throw SchemaError("\"multi_pic\" must be a boolean in " + where);
        }
        task.multi_pic = node.at("multi_pic").get<bool>();
    }
    task.issue_policy = parse_issue_policy(node, where);
    return task;
}

ordered_json policy_to_json(const IssuePolicy& policy) {
    ordered_json node;
    node["default_action"] = std::string(1, issue_action_letter(policy.default_action));
    const IssuePolicy defaults;
    if (policy.max_fix_retries != defaults.max_fix_retries) {
        node["max_fix_retries"] = policy.max_fix_retries;
    }
    if (policy.fallback_wait_s != defaults.fallback_wait_s) {
        node["fallback_wait_s"] = policy.fallback_wait_s;
    }
    return node;
}

} // namespace

JobConfig parse_config(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw SchemaError("config document must be a JSON object");
    }
    require_keys(doc,
                 {"tasks", "img_folder", "pool_size", "debug",
                  "critical_issues_handling"},
                 "config root");

    JobConfig cfg;
    if (!doc.contains("tasks") || !doc.at("tasks").is_object()) {
        throw SchemaError("missing or non-object \"tasks\"");
    }
    if (!doc.contains("img_folder") || !doc.at("img_folder").is_string()) {
        throw SchemaError("missing or non-string \"img_folder\"");
    }
    cfg.img_folder = doc.at("img_folder").get<std::string>();
    cfg.pool_size = parse_pool_size(doc, "config root");
    if (doc.contains("debug") && !doc.at("debug").is_null()) {
        if (!doc.at("debug").is_boolean()) {
            throw SchemaError("\"debug\" must be a boolean");
        }
        cfg.debug = doc.at("debug").get<bool>();
    }
    if (const auto root_policy = parse_issue_policy(doc, "config root")) {
        cfg.issue_policy = *root_policy;
    }

    for (const auto& [key, node] : doc.at("tasks").items()) {
        cfg.tasks.push_back(parse_task(key, node));
    }
    if (cfg.tasks.empty()) {
        throw SchemaError("\"tasks\" must contain at least one task");
    }
    return cfg;
}

std::string serialize_config(const JobConfig& cfg) {
    ordered_json doc;
    ordered_json tasks = ordered_json::object();
    for (const TaskSpec& task : cfg.tasks) {
        ordered_json node = ordered_json::object();
        if (task.img_folder) {
            node["img_folder"] = *task.img_folder;
        }
        if (task.pipeline_taskid) {
            node["pipeline_taskid"] = task.pipeline_taskid->str();
        }
        if (task.pool_size) {
            node["pool_size"] = *task.pool_size;
        }
        node["multi_pic"] = task.multi_pic;
        if (task.issue_policy) {
            node["critical_issues_handling"] = policy_to_json(*task.issue_policy);
        }
        tasks[task.id.str()] = std::move(node);
    }
    doc["tasks"] = std::move(tasks);
    doc["img_folder"] = cfg.img_folder;
    if (cfg.pool_size) {
        doc["pool_size"] = *cfg.pool_size;
    }
    doc["debug"] = cfg.debug;
    doc["critical_issues_handling"] = policy_to_json(cfg.issue_policy);
    return doc.dump(2);
}

bool ValidationReport::ok() const {
    return error_count() == 0;
}

std::size_t ValidationReport::error_count() const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
            return f.severity == Severity::Error;
        }));
}

std::size_t ValidationReport::warning_count() const {
    return findings.size() - error_count();
}

ValidationReport validate_config(const JobConfig& cfg,
                                 const std::set<std::string>& platform_codes) {
    ValidationReport report;
    for (const TaskSpec& task : cfg.tasks) {
        if (!platform_codes.contains(task.id.platform_code())) {
            report.findings.push_back(
                {Severity::Error, task.id,
                 "unknown platform \"" + task.id.platform_code() + "\""});
        }
        if (task.pipeline_taskid && !cfg.find_task(*task.pipeline_taskid)) {
            report.findings.push_back(
                {Severity::Error, task.id,
                 "dangling pipeline reference to \"" +
                     task.pipeline_taskid->str() + "\""});
        }
        if (task.pipeline_taskid && task.img_folder) {
            report.findings.push_back(
                {Severity::Error, task.id,
                 "both img_folder and pipeline_taskid set; a task takes "
                 "exactly one input source"});
        }
        if (task.multi_pic && !task.pool_size && !cfg.pool_size) {
            report.findings.push_back(
                {Severity::Warning, task.id,
                 "multi_pic without pool_size: the worker's default pool "
                 "size applies"});
        }
    }
    return report;
}

} // namespace bp
