#include "taskui/llm/provider.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "taskui/core/hash.hpp"
#include "taskui/llm/prompts.hpp"

namespace taskui {

namespace {

const std::pair<RequestKind, const char*> kKinds[] = {
    {RequestKind::GenSchema, "gen-schema"},
    {RequestKind::GenDependencies, "gen-dependencies"},
    {RequestKind::GenAnnotations, "gen-annotations"},
    {RequestKind::GenData, "gen-data"},
    {RequestKind::ParseFollowUp, "parse-followup"},
    {RequestKind::AutoComplete, "autocomplete"},
    {RequestKind::NLDependencyExec, "nl-dependency-exec"},
    {RequestKind::SemanticCluster, "semantic-cluster"},
};

std::string env(const char* name, const std::string& fallback = {}) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

}  // namespace

std::string to_string(RequestKind k) {
    for (const auto& [kind, name] : kKinds)
        if (kind == k) return name;
    return "gen-schema";
}

std::optional<RequestKind> request_kind_from_string(std::string_view s) {
    for (const auto& [kind, name] : kKinds)
        if (s == name) return kind;
    return std::nullopt;
}

Json ProviderRequest::canonical() const {
    return {{"kind", to_string(kind)}, {"payload", payload}, {"context", fnv1a64_hex(context.dump())}};
}

std::string ProviderRequest::hash() const { return fnv1a64_hex(canonical().dump()); }

HttpResponse HttpTransport::post(const std::string& base_url, const std::string& path, const std::string& body,
                                 const std::map<std::string, std::string>& headers) {
    try {
        httplib::Client client(base_url);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);
        auto res = client.Post(path, h, body, "application/json");
        if (!res) throw Error("provider-unavailable", "request to " + base_url + " failed: " + httplib::to_string(res.error()));
        return {res->status, res->body};
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("provider-unavailable", std::string("request to ") + base_url + " failed: " + e.what());
    }
}

HttpResponse CountingTransport::post(const std::string&, const std::string&, const std::string& body,
                                     const std::map<std::string, std::string>&) {
    ++calls_;
    std::lock_guard lock(mu_);
    last_body_ = body;
    if (queue_.empty()) throw Error("provider-unavailable", "no response queued");
    auto r = queue_.front();
    queue_.pop_front();
    return r;
}

void CountingTransport::enqueue(HttpResponse r) {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(r));
}

std::string CountingTransport::last_body() const {
    std::lock_guard lock(mu_);
    return last_body_;
}

FixtureStore FixtureStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("fixture-syntax", "cannot read fixtures '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    Json j = Json::parse(ss.str(), nullptr, false);
    if (j.is_discarded()) throw Error("fixture-syntax", "fixtures '" + path + "' are not JSON");
    return from_json(j);
}

FixtureStore FixtureStore::from_json(const Json& j) {
    if (!j.is_object()) throw Error("fixture-syntax", "fixtures must be an object keyed by request hash");
    FixtureStore f;
    for (const auto& [hash, entry] : j.items()) {
        if (!entry.is_object() || !entry.contains("response") || !entry["response"].is_string())
            throw Error("fixture-syntax", "fixture '" + hash + "' needs a 'response' string");
        f.entries_[hash] = entry;
    }
    return f;
}

Json FixtureStore::to_json() const {
    std::lock_guard lock(mu_);
    Json j = Json::object();
    for (const auto& [k, v] : entries_) j[k] = v;
    return j;
}

void FixtureStore::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("fixture-syntax", "cannot write fixtures '" + path + "'");
    out << to_json().dump(2) << "\n";
}

std::optional<std::string> FixtureStore::find(const std::string& hash) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(hash);
    if (it == entries_.end()) return std::nullopt;
    return it->second["response"].get<std::string>();
}

void FixtureStore::put(const ProviderRequest& r, const std::string& response) {
    std::lock_guard lock(mu_);
    entries_[r.hash()] = {{"request", r.canonical()}, {"response", response}};
}

std::size_t FixtureStore::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

std::string ReplayProvider::complete(const ProviderRequest& r) {
    auto hash = r.hash();
    if (auto hit = fixtures_->find(hash)) return *hit;
    throw Error("fixture-miss", "no recorded response for " + to_string(r.kind) + " request " + hash,
                {{"hash", hash}, {"kind", to_string(r.kind)}});
}

ScriptedProvider::ScriptedProvider(const Json& responses) {
    if (!responses.is_object()) throw Error("fixture-syntax", "scripted responses must be an object keyed by kind");
    for (const auto& [kind, list] : responses.items()) {
        if (!request_kind_from_string(kind)) throw Error("fixture-syntax", "unknown request kind '" + kind + "'");
        if (!list.is_array()) throw Error("fixture-syntax", "responses for '" + kind + "' must be an array");
        for (const auto& r : list) queues_[kind].push_back(r.is_string() ? r.get<std::string>() : r.dump());
    }
}

std::string ScriptedProvider::complete(const ProviderRequest& r) {
    std::lock_guard lock(mu_);
    auto& q = queues_[to_string(r.kind)];
    if (q.empty()) throw Error("fixture-miss", "no scripted response left for " + to_string(r.kind), {{"kind", to_string(r.kind)}});
    auto out = q.front();
    q.pop_front();
    return out;
}

std::string RecordingProvider::complete(const ProviderRequest& r) {
    auto out = inner_->complete(r);
    sink_->put(r, out);
    return out;
}

LiveConfig LiveConfig::from_environment() {
    LiveConfig c;
    c.base_url = env("TASKUI_LLM_BASE_URL", c.base_url);
    c.path = env("TASKUI_LLM_PATH", c.path);
    c.model = env("TASKUI_LLM_MODEL", c.model);
    c.api_key = env("TASKUI_LLM_API_KEY", env("OPENAI_API_KEY"));
    for (const auto& [kind, name] : kKinds) {
        std::string var = "TASKUI_LLM_MODEL_";
        for (char ch : std::string(name)) var += ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (auto m = env(var.c_str()); !m.empty()) c.model_by_kind[name] = m;
    }
    return c;
}

std::string LiveProvider::complete(const ProviderRequest& r) {
    auto kind = to_string(r.kind);
    auto it = config_.model_by_kind.find(kind);
    Json body = {{"model", it == config_.model_by_kind.end() ? config_.model : it->second},
                 {"temperature", config_.temperature},
                 {"response_format", {{"type", "json_object"}}},
                 {"messages",
                  {{{"role", "system"}, {"content", system_prompt(r.kind)}}, {{"role", "user"}, {"content", user_message(r)}}}}};
    std::map<std::string, std::string> headers;
    if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;
    auto res = transport_->post(config_.base_url, config_.path, body.dump(), headers);
    if (res.status < 200 || res.status >= 300)
        throw Error("provider-unavailable", "provider answered HTTP " + std::to_string(res.status),
                    {{"status", res.status}, {"body", res.body.substr(0, 500)}});
    Json j = Json::parse(res.body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
        throw Error("provider-unavailable", "provider reply has no choices");
    const auto& msg = j["choices"][0]["message"];
    if (!msg.is_object() || !msg.contains("content") || !msg["content"].is_string())
        throw Error("provider-unavailable", "provider reply has no message content");
    return msg["content"].get<std::string>();
}

}  // namespace taskui
