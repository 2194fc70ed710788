#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bp {

/// Task identifier with canonical text form "<CODE>@<N>", e.g. "MASTD@0".
/// CODE is 2-8 uppercase alphanumerics, N a non-negative ordinal without
/// leading zeros. The canonical form doubles as the task directory name.
class TaskId {
public:
    TaskId() = default;

    /// Throws SchemaError when the code or ordinal is out of shape.
    TaskId(std::string platform_code, std::uint32_t ordinal);

    /// Parses the canonical form; throws SchemaError on any deviation.
    static TaskId parse(std::string_view text);
    static std::optional<TaskId> try_parse(std::string_view text) noexcept;

    const std::string& platform_code() const { return code_; }
    std::uint32_t ordinal() const { return ordinal_; }

    /// Canonical "<CODE>@<N>" form; parse(str()) round-trips exactly.
    std::string str() const;

    friend bool operator==(const TaskId&, const TaskId&) = default;
    friend auto operator<=>(const TaskId&, const TaskId&) = default;

private:
    std::string code_;
    std::uint32_t ordinal_ = 0;
};

/// True iff the string is a valid platform code: [A-Z0-9]{2,8}.
bool is_valid_platform_code(std::string_view code) noexcept;

} // namespace bp
