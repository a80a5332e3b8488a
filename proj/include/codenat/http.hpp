#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "codenat/errors.hpp"
#include "codenat/judge.hpp"
#include "codenat/victim.hpp"

namespace codenat {

namespace detail {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // /route, defaults to "/"
};

inline SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("url needs a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

// bounded in-flight requests
class Gate {
public:
    explicit Gate(int limit) : limit_(limit > 0 ? limit : 1) {}

    void enter() {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return active_ < limit_; });
        ++active_;
    }

    void leave() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            --active_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int limit_;
    int active_ = 0;
};

struct GateGuard {
    Gate& gate;
    explicit GateGuard(Gate& g) : gate(g) { gate.enter(); }
    ~GateGuard() { gate.leave(); }
};

inline std::string body_excerpt(const std::string& body) {
    return body.size() <= 160 ? body : body.substr(0, 160) + "...";
}

// POST json, retry transport failures and 5xx with linear backoff
inline nlohmann::json post_json(httplib::Client& client, const std::string& path,
                                const nlohmann::json& request,
                                const httplib::Headers& headers, int max_retries) {
    std::string last_error;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
        auto res = client.Post(path, headers, request.dump(), "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw TransportError("status " + std::to_string(res->status) + ": " +
                                 body_excerpt(res->body));
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception&) {
            throw MalformedResponse("non-JSON response body: " +
                                    body_excerpt(res->body));
        }
    }
    throw TransportError(last_error);
}

inline httplib::Headers auth_headers(const std::string& token_env) {
    httplib::Headers headers;
    if (!token_env.empty()) {
        if (const char* token = std::getenv(token_env.c_str()); token && *token)
            headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    return headers;
}

}  // namespace detail

struct RemoteVictimConfig {
    std::string url;
    VictimTask task;
    int timeout_ms = 15000;
    int max_retries = 2;
    int max_concurrency = 4;
    std::string token_env = "CODENAT_VICTIM_TOKEN";
};

// HTTP adapter for hosted code models. Wire format:
//   request  {"code": "..."} or {"code1": "...", "code2": "..."}
//   response {"label": int, "probs": [..]} for classifiers, {"text": "..."}
//   for generators.
class RemoteVictim : public Victim {
public:
    explicit RemoteVictim(RemoteVictimConfig config) : config_(std::move(config)),
                                                       gate_(config_.max_concurrency) {
        if (config_.url.empty()) throw ConfigError("victim url is empty");
        config_.task.validate();
        auto split = detail::split_url(config_.url);
        path_ = split.path;
        client_ = std::make_unique<httplib::Client>(split.base);
        client_->set_connection_timeout(0, config_.timeout_ms * 1000);
        client_->set_read_timeout(config_.timeout_ms / 1000,
                                  (config_.timeout_ms % 1000) * 1000);
    }

    VictimTask task() const override { return config_.task; }

protected:
    VictimOutput do_query(const CodeSnippet& code) override {
        nlohmann::json request;
        request["code"] = code.source();
        return roundtrip(request);
    }

    VictimOutput do_query_pair(const CodeSnippet& a, const CodeSnippet& b) override {
        nlohmann::json request;
        request["code1"] = a.source();
        request["code2"] = b.source();
        return roundtrip(request);
    }

private:
    VictimOutput roundtrip(const nlohmann::json& request) {
        detail::GateGuard guard(gate_);
        auto body = detail::post_json(*client_, path_, request,
                                      detail::auth_headers(config_.token_env),
                                      config_.max_retries);
        VictimOutput out;
        out.kind = config_.task.kind;
        if (config_.task.kind == TaskKind::Generation) {
            if (!body.contains("text") || !body["text"].is_string())
                throw MalformedResponse("generation response lacks text: " +
                                        detail::body_excerpt(body.dump()));
            out.text = body["text"].get<std::string>();
            return out;
        }
        if (!body.contains("label") || !body.contains("probs"))
            throw MalformedResponse("classification response lacks label/probs: " +
                                    detail::body_excerpt(body.dump()));
        out.label = body["label"].get<int>();
        out.probs = body["probs"].get<std::vector<double>>();
        double sum = 0.0;
        for (double p : out.probs) {
            if (p < 0.0) throw MalformedResponse("negative probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw MalformedResponse("probabilities sum to " + std::to_string(sum));
        return out;
    }

    RemoteVictimConfig config_;
    detail::Gate gate_;
    std::string path_;
    std::unique_ptr<httplib::Client> client_;
};

// Chat-completions transport: POST {model, messages, temperature, top_p},
// bearer token from the environment. Accepts OpenAI-style responses
// (choices[0].message.content) or a bare {"content": ...}.
class HttpChatClient : public ChatClient {
public:
    HttpChatClient(const JudgeConfig& config,
                   std::string token_env = "CODENAT_JUDGE_TOKEN")
        : config_(config), token_env_(std::move(token_env)),
          gate_(config.max_concurrency) {
        if (config_.endpoint.empty()) throw ConfigError("judge endpoint is empty");
        config_.validate();
        auto split = detail::split_url(config_.endpoint);
        path_ = split.path;
        client_ = std::make_unique<httplib::Client>(split.base);
        client_->set_connection_timeout(0, config_.timeout_ms * 1000);
        client_->set_read_timeout(config_.timeout_ms / 1000,
                                  (config_.timeout_ms % 1000) * 1000);
    }

    std::string complete(const std::string& system_prompt,
                         const std::string& user_content) override {
        nlohmann::ordered_json request;
        request["model"] = config_.model;
        request["messages"] = nlohmann::ordered_json::array(
            {{{"role", "system"}, {"content", system_prompt}},
             {{"role", "user"}, {"content", user_content}}});
        request["temperature"] = config_.temperature;
        request["top_p"] = config_.top_p;

        detail::GateGuard guard(gate_);
        auto body = detail::post_json(*client_, path_, request,
                                      detail::auth_headers(token_env_),
                                      config_.max_retries);
        if (body.contains("choices") && body["choices"].is_array() &&
            !body["choices"].empty()) {
            const auto& first = body["choices"][0];
            if (first.contains("message") && first["message"].contains("content"))
                return first["message"]["content"].get<std::string>();
            if (first.contains("text")) return first["text"].get<std::string>();
        }
        if (body.contains("content") && body["content"].is_string())
            return body["content"].get<std::string>();
        throw MalformedResponse("no completion content in response: " +
                                detail::body_excerpt(body.dump()));
    }

private:
    JudgeConfig config_;
    std::string token_env_;
    detail::Gate gate_;
    std::string path_;
    std::unique_ptr<httplib::Client> client_;
};

}  // namespace codenat
