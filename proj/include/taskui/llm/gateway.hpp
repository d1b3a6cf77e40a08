#pragma once

#include <memory>
#include <string>
#include <vector>

#include "taskui/llm/provider.hpp"
#include "taskui/session/updater.hpp"

namespace taskui {

struct GeneratedModel {
    Schema schema;
    AnnotationSet annotations;
    std::vector<Dependency> dependencies;
    DataSet data;
    std::vector<std::string> notes;  // repairs and dropped pieces, for the chat transcript
};

Session to_session(const GeneratedModel& m, const std::string& prompt);

struct FollowUp {
    std::vector<Updater> updaters;
    std::string message;
    bool no_op = false;
};

struct GatewayOptions {
    int max_reasks = 1;  // live providers only
    ExecutionBudget budget;
};

// All generative steps. Everything returned has passed the owning module's validators.
// Errors: provider-unavailable, irreparable-response, fixture-miss.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<Provider> provider, GatewayOptions options = {})
        : provider_(std::move(provider)), options_(options) {}

    // Schema first, then dependencies, annotations and data concurrently.
    GeneratedModel generate_model(const std::string& prompt, const Json& context = Json::object());

    // Updaters with every pending marker already resolved. An empty list sets no_op.
    FollowUp parse_followup(const std::string& prompt, const Session& s);

    // Missing attributes of `partial` filled in; given values kept as they are.
    // The returned instance has no id yet.
    Instance autocomplete_instance(const Session& s, const std::string& entity, const Value::Dict& partial,
                                   const std::string& preference = {});

    // Replaces generate / autocomplete / cluster markers with concrete specifications.
    std::vector<Updater> resolve_pending(const Session& s, std::vector<Updater> updaters);

    // Executor for natural-language dependency edges over `schema`.
    NlExecutor nl_executor(const Schema& schema);

    Provider& provider() { return *provider_; }
    NlCache& nl_cache() { return nl_cache_; }

private:
    // Sends the request and parses the answer, asking again (live only) when
    // `accept` throws. Errors: irreparable-response.
    template <class T, class F>
    T request(RequestKind kind, Json payload, const Json& context, const std::string& shape, F&& accept,
              std::vector<std::string>* notes = nullptr);

    std::shared_ptr<Provider> provider_;
    GatewayOptions options_;
    NlCache nl_cache_;
};

// Gives every instance an ENTITY-n id (rewriting pointers to match) and
// fills values.id. Accepts {root?, instances: {id: {entity, values}}}.
Json normalize_generated_data(const Schema& schema, const Json& raw);

// Compact description of a session for request contexts.
Json session_context(const Session& s);

}  // namespace taskui
