#include "bp/platformsim.hpp"

#include "bp/errors.hpp"
#include "bp/jpeg_codec.hpp"
#include "bp/time_util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace bp {

using json = nlohmann::json;

double steady_now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void validate_profile(const TransformProfile& profile) {
    if (profile.profile_code.empty()) {
        throw SchemaError("profile_code must be non-empty");
    }
    if (profile.jpeg_quality < 1 || profile.jpeg_quality > 100) {
        throw SchemaError("jpeg_quality must be in [1, 100], got " +
                          std::to_string(profile.jpeg_quality));
    }
    if (profile.max_dimension_px && *profile.max_dimension_px < 1) {
        throw SchemaError("max_dimension_px must be positive");
    }
    if (profile.rate_limit) {
        if (profile.rate_limit->max_uploads < 1) {
            throw SchemaError("rate_limit.max_uploads must be positive");
        }
        if (profile.rate_limit->window_s <= 0) {
            throw SchemaError("rate_limit.window_s must be positive");
        }
    }
}

TransformProfile profile_from_json_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("malformed profile JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw SchemaError("profile document must be a JSON object");
    }
    TransformProfile profile;
    if (!doc.contains("profile_code") || !doc.at("profile_code").is_string()) {
        throw SchemaError("missing or non-string \"profile_code\"");
    }
    profile.profile_code = doc.at("profile_code").get<std::string>();
    if (doc.contains("jpeg_quality")) {
        if (!doc.at("jpeg_quality").is_number_integer()) {
            throw SchemaError("\"jpeg_quality\" must be an integer");
        }
        profile.jpeg_quality = doc.at("jpeg_quality").get<int>();
    }
    if (doc.contains("max_dimension_px") && !doc.at("max_dimension_px").is_null()) {
        if (!doc.at("max_dimension_px").is_number_integer()) {
            throw SchemaError("\"max_dimension_px\" must be an integer or null");
        }
        profile.max_dimension_px = doc.at("max_dimension_px").get<int>();
    }
    if (doc.contains("strip_metadata")) {
        if (!doc.at("strip_metadata").is_boolean()) {
            throw SchemaError("\"strip_metadata\" must be a boolean");
        }
        profile.strip_metadata = doc.at("strip_metadata").get<bool>();
    }
    if (doc.contains("rate_limit") && !doc.at("rate_limit").is_null()) {
        const auto& rl = doc.at("rate_limit");
        if (!rl.is_object() || !rl.contains("max_uploads") ||
            !rl.contains("window_s") || !rl.at("max_uploads").is_number_integer() ||
            !rl.at("window_s").is_number()) {
            throw SchemaError("\"rate_limit\" must be {max_uploads, window_s}");
        }
        profile.rate_limit = RateLimitSpec{rl.at("max_uploads").get<int>(),
                                           rl.at("window_s").get<double>()};
    }
    validate_profile(profile);
    return profile;
}

std::string profile_to_json_text(const TransformProfile& profile) {
    json doc;
    doc["profile_code"] = profile.profile_code;
    doc["jpeg_quality"] = profile.jpeg_quality;
    doc["max_dimension_px"] =
        profile.max_dimension_px ? json(*profile.max_dimension_px) : json(nullptr);
    doc["strip_metadata"] = profile.strip_metadata;
    if (profile.rate_limit) {
        doc["rate_limit"] = {{"max_uploads", profile.rate_limit->max_uploads},
                             {"window_s", profile.rate_limit->window_s}};
    } else {
        doc["rate_limit"] = nullptr;
    }
    return doc.dump(2);
}

std::vector<std::uint8_t> apply_transform(const TransformProfile& profile,
                                          std::span<const std::uint8_t> jpeg) {
    DecodedJpeg decoded = decode_jpeg(jpeg);
    RawImage image = std::move(decoded.image);
    if (profile.max_dimension_px) {
        image = resize_to_max_dimension(image, *profile.max_dimension_px);
    }
    const QuantValues luminance =
        scale_quant_table(annex_k_luminance(), profile.jpeg_quality);
    const QuantValues chrominance =
        scale_quant_table(annex_k_chrominance(), profile.jpeg_quality);
    const std::vector<MarkerSegment> markers =
        profile.strip_metadata ? std::vector<MarkerSegment>{}
                               : std::move(decoded.app_markers);
    return encode_jpeg(image, luminance, chrominance, markers);
}

SimPlatform::SimPlatform(TransformProfile profile, Credentials accepted,
                         ClockFn clock)
    : profile_(std::move(profile)), accepted_(std::move(accepted)),
      clock_(clock ? std::move(clock) : ClockFn(steady_now_s)) {
    validate_profile(profile_);
    window_start_ = clock_();
}

std::optional<std::string> SimPlatform::login(const std::string& user,
                                              const std::string& pass) {
    std::lock_guard lock(mutex_);
    if (user != accepted_.user || pass != accepted_.pass) {
        return std::nullopt;
    }
    std::string token = "tok" + std::to_string(next_token_++) + "_" +
                        profile_.profile_code;
    tokens_.push_back(token);
    return token;
}

bool SimPlatform::token_valid(const std::string& token) const {
    std::lock_guard lock(mutex_);
    return std::find(tokens_.begin(), tokens_.end(), token) != tokens_.end();
}

std::string SimPlatform::upload(const std::string& filename,
                                std::span<const std::uint8_t> body) {
    {
        std::lock_guard lock(mutex_);
        if (profile_.rate_limit) {
            const double now = clock_();
            if (now - window_start_ >= profile_.rate_limit->window_s) {
                window_start_ = now;
                window_count_ = 0;
            }
            if (window_count_ >= profile_.rate_limit->max_uploads) {
                const double remaining =
                    profile_.rate_limit->window_s - (now - window_start_);
                const int retry_after =
                    std::max(1, static_cast<int>(std::ceil(remaining)));
                throw RateLimitIssue("rate limit reached on " +
                                         profile_.profile_code,
                                     retry_after);
            }
            ++window_count_;
        }
    }

    // Transform outside the lock; decode failures do not consume quota
    // adjustments beyond the count already taken (mirrors a real platform
    // accepting the request before inspecting the body).
    std::vector<std::uint8_t> transformed = apply_transform(profile_, body);

    std::lock_guard lock(mutex_);
    MediaRecord record;
    record.media_id = "m" + std::to_string(100000 + next_media_++);
    record.transformed_bytes = std::move(transformed);
    record.original_filename = filename;
    record.stored_at = rfc3339_utc_now();
    const std::string id = record.media_id;
    media_[id] = std::move(record);
    return id;
}

std::optional<MediaRecord> SimPlatform::fetch(const std::string& media_id) const {
    std::lock_guard lock(mutex_);
    const auto it = media_.find(media_id);
    if (it == media_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t SimPlatform::media_count() const {
    std::lock_guard lock(mutex_);
    return media_.size();
}

// --- HTTP face ------------------------------------------------------------

struct SimService::Impl {
    httplib::Server server;
    std::thread thread;
};

namespace {

std::optional<std::string> bearer_token(const httplib::Request& req) {
    const std::string auth = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (auth.size() <= prefix.size() || auth.substr(0, prefix.size()) != prefix) {
        return std::nullopt;
    }
    return auth.substr(prefix.size());
}

} // namespace

SimService::SimService(std::shared_ptr<SimPlatform> platform, std::string host)
    : platform_(std::move(platform)), host_(std::move(host)),
      impl_(std::make_unique<Impl>()) {
    auto& server = impl_->server;
    auto platform_ptr = platform_;

    server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"status\":\"ok\"}", "application/json");
    });

    server.Post("/api/login", [platform_ptr](const httplib::Request& req,
                                             httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error&) {
            res.status = 400;
            res.set_content("{\"error\":\"malformed body\"}", "application/json");
            return;
        }
        if (!body.is_object() || !body.contains("user") || !body.contains("pass") ||
            !body.at("user").is_string() || !body.at("pass").is_string()) {
            res.status = 400;
            res.set_content("{\"error\":\"expected user and pass\"}",
                            "application/json");
            return;
        }
        const auto token = platform_ptr->login(body.at("user").get<std::string>(),
                                               body.at("pass").get<std::string>());
        if (!token) {
            res.status = 401;
            res.set_content("{\"error\":\"bad credentials\"}", "application/json");
            return;
        }
        res.set_content(json{{"token", *token}}.dump(), "application/json");
    });

    server.Post("/api/upload", [platform_ptr](const httplib::Request& req,
                                              httplib::Response& res) {
        const auto token = bearer_token(req);
        if (!token || !platform_ptr->token_valid(*token)) {
            res.status = 401;
            res.set_content("{\"error\":\"unauthenticated\"}", "application/json");
            return;
        }
        std::string filename = req.get_header_value("X-Filename");
        if (filename.empty()) {
            filename = "upload.jpg";
        }
        try {
            const auto* data = reinterpret_cast<const std::uint8_t*>(req.body.data());
            const std::string media_id = platform_ptr->upload(
                filename, std::span<const std::uint8_t>(data, req.body.size()));
            res.status = 201;
            res.set_content(json{{"media_id", media_id}}.dump(), "application/json");
        } catch (const RateLimitIssue& e) {
            res.status = 429;
            res.set_header("Retry-After",
                           std::to_string(e.retry_after_s.value_or(1)));
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        } catch (const DecodeError& e) {
            res.status = 422;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    });

    server.Get("/api/media/:id", [platform_ptr](const httplib::Request& req,
                                                httplib::Response& res) {
        const auto token = bearer_token(req);
        if (!token || !platform_ptr->token_valid(*token)) {
            res.status = 401;
            res.set_content("{\"error\":\"unauthenticated\"}", "application/json");
            return;
        }
        const auto record = platform_ptr->fetch(req.path_params.at("id"));
        if (!record) {
            res.status = 404;
            res.set_content("{\"error\":\"unknown media id\"}", "application/json");
            return;
        }
        res.set_content(reinterpret_cast<const char*>(
                            record->transformed_bytes.data()),
                        record->transformed_bytes.size(), "image/jpeg");
    });
}

SimService::~SimService() {
    stop();
}

int SimService::start(int port) {
    auto& server = impl_->server;
    if (port == 0) {
        port_ = server.bind_to_any_port(host_);
        if (port_ <= 0) {
            throw BindError("cannot bind an ephemeral port on " + host_);
        }
    } else {
        if (!server.bind_to_port(host_, port)) {
            throw BindError("cannot bind " + host_ + ":" + std::to_string(port));
        }
        port_ = port;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    server.wait_until_ready();
    return port_;
}

void SimService::stop() {
    if (impl_ && impl_->server.is_running()) {
        impl_->server.stop();
    }
    if (impl_ && impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

std::string SimService::base_url() const {
    return "http://" + host_ + ":" + std::to_string(port_);
}

} // namespace bp
