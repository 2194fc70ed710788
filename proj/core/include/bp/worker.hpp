#pragma once

#include "bp/errors.hpp"
#include "bp/platformsim.hpp" // Credentials

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bp {

struct WorkerDescriptor {
    std::string platform_code;
    int default_pool_size = 1; // >= 1
    bool supports_multi_pic = false;
};

/// Live platform session. Valid only between a successful connect() and
/// the matching disconnect(); the handle is opaque to callers.
struct WorkerSession {
    std::string platform_code;
    std::string handle;
    std::string connected_at; // RFC 3339 UTC
    bool live = false;
};

/// One receipt per uploaded picture, in batch order.
struct UploadReceipt {
    std::string media_id; // non-empty, platform-assigned
    std::filesystem::path source_path;
    std::string uploaded_at; // RFC 3339 UTC
};

/// Raised when a batch upload stopped partway: `receipts` covers the
/// succeeded prefix, `cause` says why the next picture failed.
class PartialUpload : public Error {
public:
    enum class Cause {
        RateLimit,
        Network,
        InvalidMedia, // the next picture itself was rejected
    };

    PartialUpload(const std::string& msg, std::vector<UploadReceipt> done,
                  Cause why, std::optional<int> retry_after = std::nullopt)
        : Error(msg), receipts(std::move(done)), cause(why),
          retry_after_s(retry_after) {}

    std::vector<UploadReceipt> receipts;
    Cause cause;
    std::optional<int> retry_after_s;
};

/// The four-method platform contract. One session is used by one task
/// execution at a time; distinct sessions may operate concurrently.
class Worker {
public:
    virtual ~Worker() = default;

    /// Throws AuthError on rejected credentials, NetworkIssue when the
    /// endpoint is unreachable. Reconnect after disconnect is allowed.
    virtual WorkerSession connect(const Credentials& credentials) = 0;

    /// Uploads the batch in order, one receipt per picture. Throws
    /// RateLimitIssue / NetworkIssue when the first picture already fails,
    /// PartialUpload when a prefix succeeded, ContractViolation on a dead
    /// session.
    virtual std::vector<UploadReceipt>
    upload_proc(WorkerSession& session,
                const std::vector<std::filesystem::path>& batch) = 0;

    /// Writes one `<media_id>.jpg` per receipt into dest_dir (atomically:
    /// temp name, then rename) and returns the paths in receipt order.
    /// Throws NotFoundError / NetworkIssue / ContractViolation.
    virtual std::vector<std::filesystem::path>
    download_proc(WorkerSession& session,
                  const std::vector<UploadReceipt>& receipts,
                  const std::filesystem::path& dest_dir) = 0;

    /// Best effort; idempotent. The session is invalid afterwards.
    virtual void disconnect(WorkerSession& session) = 0;
};

using WorkerFactory = std::function<std::unique_ptr<Worker>()>;

/// Platform catalogue keyed by code; enumeration is insertion-ordered.
class WorkerRegistry {
public:
    /// Throws DuplicateCode when the code is already present, SchemaError
    /// on a malformed descriptor.
    void register_worker(WorkerDescriptor descriptor, WorkerFactory factory);

    bool contains(const std::string& platform_code) const;
    const WorkerDescriptor* find(const std::string& platform_code) const;

    /// Throws DomainError for unregistered codes.
    const WorkerDescriptor& descriptor(const std::string& platform_code) const;
    std::unique_ptr<Worker> create(const std::string& platform_code) const;

    std::vector<std::string> codes() const; // insertion order
    std::set<std::string> code_set() const;
    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        WorkerDescriptor descriptor;
        WorkerFactory factory;
    };
    std::vector<Entry> entries_;
};

/// Atomic file write used by download implementations: temp name in the
/// same directory, then rename.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes);

} // namespace bp
