#pragma once

#include <atomic>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "taskui/core/error.hpp"

namespace taskui {

enum class RequestKind {
    GenSchema,
    GenDependencies,
    GenAnnotations,
    GenData,
    ParseFollowUp,
    AutoComplete,
    NLDependencyExec,
    SemanticCluster,
};

std::string to_string(RequestKind k);
std::optional<RequestKind> request_kind_from_string(std::string_view s);

struct ProviderRequest {
    RequestKind kind = RequestKind::GenSchema;
    Json context = Json::object();  // earlier prompts and a summary of the session
    Json payload = Json::object();

    // {kind, payload, context: <digest>}, keys sorted.
    Json canonical() const;
    std::string hash() const;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

// The only place network I/O happens.
class Transport {
public:
    virtual ~Transport() = default;
    // Errors: provider-unavailable.
    virtual HttpResponse post(const std::string& base_url, const std::string& path, const std::string& body,
                              const std::map<std::string, std::string>& headers) = 0;
};

class HttpTransport : public Transport {
public:
    explicit HttpTransport(int timeout_seconds = 120) : timeout_(timeout_seconds) {}
    HttpResponse post(const std::string& base_url, const std::string& path, const std::string& body,
                      const std::map<std::string, std::string>& headers) override;

private:
    int timeout_;
};

// Test double: counts calls and answers from a queue (or fails when empty).
class CountingTransport : public Transport {
public:
    HttpResponse post(const std::string& base_url, const std::string& path, const std::string& body,
                      const std::map<std::string, std::string>& headers) override;
    void enqueue(HttpResponse r);
    std::size_t calls() const { return calls_; }
    std::string last_body() const;

private:
    mutable std::mutex mu_;
    std::atomic<std::size_t> calls_{0};
    std::deque<HttpResponse> queue_;
    std::string last_body_;
};

class Provider {
public:
    virtual ~Provider() = default;
    // Raw response text. Errors: provider-unavailable, fixture-miss.
    virtual std::string complete(const ProviderRequest& r) = 0;
    virtual std::string name() const = 0;
    // Live providers may be asked again after a bad answer.
    virtual bool live() const { return false; }
};

// {hash: {request, response}}
class FixtureStore {
public:
    FixtureStore() = default;
    FixtureStore(FixtureStore&& o) noexcept : entries_(std::move(o.entries_)) {}
    // Errors: fixture-syntax.
    static FixtureStore load(const std::string& path);
    static FixtureStore from_json(const Json& j);
    void save(const std::string& path) const;
    Json to_json() const;

    std::optional<std::string> find(const std::string& hash) const;
    void put(const ProviderRequest& r, const std::string& response);
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, Json> entries_;
};

class ReplayProvider : public Provider {
public:
    explicit ReplayProvider(std::shared_ptr<const FixtureStore> fixtures) : fixtures_(std::move(fixtures)) {}
    std::string complete(const ProviderRequest& r) override;
    std::string name() const override { return "replay"; }

private:
    std::shared_ptr<const FixtureStore> fixtures_;
};

// Answers each kind from its own queue of canned responses: {kind: [text or json, ...]}.
class ScriptedProvider : public Provider {
public:
    explicit ScriptedProvider(const Json& responses);
    std::string complete(const ProviderRequest& r) override;
    std::string name() const override { return "scripted"; }

private:
    std::mutex mu_;
    std::map<std::string, std::deque<std::string>> queues_;
};

// Passes through to `inner` and keeps every exchange.
class RecordingProvider : public Provider {
public:
    RecordingProvider(std::shared_ptr<Provider> inner, std::shared_ptr<FixtureStore> sink)
        : inner_(std::move(inner)), sink_(std::move(sink)) {}
    std::string complete(const ProviderRequest& r) override;
    std::string name() const override { return "record:" + inner_->name(); }
    bool live() const override { return inner_->live(); }

private:
    std::shared_ptr<Provider> inner_;
    std::shared_ptr<FixtureStore> sink_;
};

// OpenAI-compatible chat completions endpoint.
struct LiveConfig {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4o";
    std::map<std::string, std::string> model_by_kind;  // per-kind routing
    std::string api_key;
    double temperature = 0;

    // TASKUI_LLM_BASE_URL, TASKUI_LLM_PATH, TASKUI_LLM_MODEL, TASKUI_LLM_API_KEY
    // (falls back to OPENAI_API_KEY), TASKUI_LLM_MODEL_<KIND> with KIND like GEN_SCHEMA.
    static LiveConfig from_environment();
};

class LiveProvider : public Provider {
public:
    LiveProvider(LiveConfig config, std::shared_ptr<Transport> transport)
        : config_(std::move(config)), transport_(std::move(transport)) {}
    std::string complete(const ProviderRequest& r) override;
    std::string name() const override { return "live"; }
    bool live() const override { return true; }

private:
    LiveConfig config_;
    std::shared_ptr<Transport> transport_;
};

}  // namespace taskui
