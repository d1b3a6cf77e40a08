#pragma once

#include <memory>
#include <string>

#include "taskui/service/store.hpp"

namespace taskui {

struct HttpReply {
    int status = 200;
    Json body = Json::object();
};

struct ServerOptions {
    std::string address = "127.0.0.1";
    unsigned short port = 8080;  // 0 picks a free port
    int io_threads = 2;
    int worker_threads = 4;
};

// Routes:
//   GET  /sessions                         ids
//   POST /sessions                         {id}; body {prompt?} also runs the first prompt
//   POST /sessions/{id}/prompt             body {prompt}
//   POST /sessions/{id}/events             body DirectManipulationEvent
//   GET  /sessions/{id}/ui                 UIDocument
//   GET  /sessions/{id}/ui/panels/{E}      entity panel; ?representation=list|table|map
//   GET  /sessions/{id}/ui/cards/{object}  card
//   GET  /sessions/{id}/schema             {schema, annotations, combined, dependencies}
//   GET  /sessions/{id}/data               DataSet
//   GET  /sessions/{id}/history            manifest
//   POST /sessions/{id}/restore/{ckpt}
//   WS   /sessions/{id}/stream             ui-delta, violation, checkpoint-added, provider-status
class Api {
public:
    Api(SessionStore& store, Gateway& gateway, Clock clock) : store_(store), gateway_(gateway), clock_(std::move(clock)) {}
    HttpReply handle(const std::string& method, const std::string& target, const std::string& body);
    SessionStore& store() { return store_; }

private:
    HttpReply outcome_reply(const std::string& id, const Outcome& o);

    SessionStore& store_;
    Gateway& gateway_;
    Clock clock_;
};

// HTTP status for an error code.
int status_for(const std::string& code);

class Server {
public:
    Server(Api& api, ServerOptions options);
    ~Server();
    // Binds and starts serving; returns the bound port.
    unsigned short start();
    void stop();

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

}  // namespace taskui
