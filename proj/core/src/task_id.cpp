#include "bp/task_id.hpp"

#include "bp/errors.hpp"

#include <cctype>
#include <charconv>

namespace bp {

bool is_valid_platform_code(std::string_view code) noexcept {
    if (code.size() < 2 || code.size() > 8) {
        return false;
    }
    for (const char c : code) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
        if (!ok) {
            return false;
        }
    }
    return true;
}

TaskId::TaskId(std::string platform_code, std::uint32_t ordinal)
    : code_(std::move(platform_code)), ordinal_(ordinal) {
    if (!is_valid_platform_code(code_)) {
        throw SchemaError("invalid platform code '" + code_ +
                          "': expected [A-Z0-9]{2,8}");
    }
}

TaskId TaskId::parse(std::string_view text) {
    const auto at = text.find('@');
    if (at == std::string_view::npos) {
        throw SchemaError("invalid task id '" + std::string(text) +
                          "': expected '<CODE>@<N>'");
    }
    const std::string_view code = text.substr(0, at);
    const std::string_view num = text.substr(at + 1);
    if (!is_valid_platform_code(code)) {
        throw SchemaError("invalid task id '" + std::string(text) +
                          "': bad platform code");
    }
    if (num.empty() || (num.size() > 1 && num.front() == '0')) {
        throw SchemaError("invalid task id '" + std::string(text) +
                          "': ordinal must have no leading zeros");
    }
    std::uint32_t ordinal = 0;
    const auto [ptr, ec] =
        std::from_chars(num.data(), num.data() + num.size(), ordinal);
    if (ec != std::errc{} || ptr != num.data() + num.size()) {
        throw SchemaError("invalid task id '" + std::string(text) +
                          "': bad ordinal");
    }
    return TaskId(std::string(code), ordinal);
}

std::optional<TaskId> TaskId::try_parse(std::string_view text) noexcept {
    try {
        return parse(text);
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::string TaskId::str() const {
    return code_ + "@" + std::to_string(ordinal_);
}

} // namespace bp
