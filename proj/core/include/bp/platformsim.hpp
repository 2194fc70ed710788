#pragma once

#include "bp/jpegtools.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bp {

/// Monotonic time source in seconds. Injectable so rate-limit windows can
/// be driven by tests.
using ClockFn = std::function<double()>;

/// Steady-clock seconds since an arbitrary epoch.
double steady_now_s();

struct RateLimitSpec {
    int max_uploads = 0; // positive
    double window_s = 0; // positive

    friend bool operator==(const RateLimitSpec&, const RateLimitSpec&) = default;
};

/// A simulated platform's alteration recipe.
struct TransformProfile {
    std::string profile_code;
    int jpeg_quality = 80; // 1..100
    std::optional<int> max_dimension_px;
    bool strip_metadata = false;
    std::optional<RateLimitSpec> rate_limit;

    friend bool operator==(const TransformProfile&, const TransformProfile&) = default;
};

/// Throws SchemaError when a field is out of range.
void validate_profile(const TransformProfile& profile);

/// Parses/serializes the JSON profile file format used by `simserve` and
/// platform definition files.
TransformProfile profile_from_json_text(std::string_view text);
std::string profile_to_json_text(const TransformProfile& profile);

struct MediaRecord {
    std::string media_id;
    std::vector<std::uint8_t> transformed_bytes; // well-formed JPEG
    std::string original_filename;
    std::string stored_at; // RFC 3339 UTC
};

/// Re-encodes a JPEG according to the profile: quantization tables from
/// scale_quant_table(jpeg_quality) over the Annex-K bases, optional
/// downscale so max(w, h) == max_dimension_px, and metadata stripping
/// (every application segment except APP0 dropped). Deterministic within
/// one build. Throws DecodeError on undecodable input.
std::vector<std::uint8_t> apply_transform(const TransformProfile& profile,
                                          std::span<const std::uint8_t> jpeg);

/// Simple credentials pair; opaque to the engine.
struct Credentials {
    std::string user = "user";
    std::string pass = "pass";

    friend bool operator==(const Credentials&, const Credentials&) = default;
};

/// In-memory simulated media platform: login tokens, rate-limited uploads
/// that apply the profile transform, and media retrieval. Thread-safe.
class SimPlatform {
public:
    explicit SimPlatform(TransformProfile profile,
                         Credentials accepted = {},
                         ClockFn clock = {});

    /// Returns a bearer token, or nullopt when the credentials are wrong.
    std::optional<std::string> login(const std::string& user,
                                     const std::string& pass);

    bool token_valid(const std::string& token) const;

    /// Transforms and stores the upload, returning the new media id.
    /// Throws RateLimitIssue (with Retry-After seconds) when the fixed
    /// window is exhausted, DecodeError when the body is not a JPEG.
    std::string upload(const std::string& filename,
                       std::span<const std::uint8_t> body);

    std::optional<MediaRecord> fetch(const std::string& media_id) const;

    const TransformProfile& profile() const { return profile_; }
    const Credentials& accepted_credentials() const { return accepted_; }
    std::size_t media_count() const;

private:
    TransformProfile profile_;
    Credentials accepted_;
    ClockFn clock_;

    mutable std::mutex mutex_;
    std::map<std::string, MediaRecord> media_;
    std::vector<std::string> tokens_;
    std::uint64_t next_media_ = 1;
    std::uint64_t next_token_ = 1;
    double window_start_ = 0;
    int window_count_ = 0;
};

/// Loopback HTTP face of a SimPlatform:
///   POST /api/login  {"user","pass"}          -> 200 {"token"} | 401
///   POST /api/upload (Bearer, X-Filename)     -> 201 {"media_id"} | 429+Retry-After | 401 | 422
///   GET  /api/media/{id} (Bearer)             -> 200 image/jpeg | 404 | 401
///   GET  /api/health                          -> 200
class SimService {
public:
    explicit SimService(std::shared_ptr<SimPlatform> platform,
                        std::string host = "127.0.0.1");
    ~SimService();

    SimService(const SimService&) = delete;
    SimService& operator=(const SimService&) = delete;

    /// Binds and starts serving on a background thread. port == 0 picks an
    /// ephemeral port. Returns the bound port; throws BindError.
    int start(int port = 0);
    void stop();

    int port() const { return port_; }
    std::string base_url() const;
    SimPlatform& platform() { return *platform_; }

private:
    struct Impl;
    std::shared_ptr<SimPlatform> platform_;
    std::string host_;
    int port_ = 0;
    std::unique_ptr<Impl> impl_;
};

} // namespace bp
