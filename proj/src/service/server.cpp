#include "taskui/service/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <deque>
#include <thread>

#include "taskui/core/combined.hpp"

namespace taskui {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

std::vector<std::string> split_path(const std::string& target) {
    std::string path = target.substr(0, target.find('?'));
    std::vector<std::string> parts;
    std::string cur;
    for (char c : path) {
        if (c == '/') {
            if (!cur.empty()) parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
}

std::string query_param(const std::string& target, const std::string& key) {
    auto q = target.find('?');
    if (q == std::string::npos) return {};
    std::string rest = target.substr(q + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        auto amp = rest.find('&', pos);
        std::string pair = rest.substr(pos, amp == std::string::npos ? std::string::npos : amp - pos);
        auto eq = pair.find('=');
        if (pair.substr(0, eq) == key) return eq == std::string::npos ? "" : pair.substr(eq + 1);
        if (amp == std::string::npos) break;
        pos = amp + 1;
    }
    return {};
}

HttpReply error_reply(const Error& e) { return {status_for(e.code()), {{"error", e.to_json()}}}; }

Json parse_body(const std::string& body) {
    if (body.empty()) return Json::object();
    Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded()) throw Error("bad-request", "request body is not JSON");
    return j;
}

}  // namespace

int status_for(const std::string& code) {
    static const std::map<std::string, int> table = {
        {"bad-request", 400},          {"unsupported-event", 400},   {"session-syntax", 400},
        {"path-syntax", 400},          {"not-editable", 403},        {"unknown-session", 404},
        {"unknown-target", 404},       {"unknown-checkpoint", 404},  {"unknown-entity", 404},
        {"unknown-id", 404},           {"not-found", 404},           {"method-not-allowed", 405},
        {"validation-rejection", 409}, {"no-model", 409},            {"payload-mismatch", 422},
        {"representation-unsupported", 422},
        {"provider-unavailable", 502}, {"irreparable-response", 502}, {"fixture-miss", 502},
    };
    auto it = table.find(code);
    return it == table.end() ? 500 : it->second;
}

HttpReply Api::outcome_reply(const std::string& id, const Outcome& o) {
    Json body = {{"session", id},
                 {"ok", o.ok},
                 {"checkpoint", o.checkpoint ? Json(*o.checkpoint) : Json(nullptr)},
                 {"message", o.message},
                 {"delta", to_json(o.delta)},
                 {"events", o.events}};
    if (o.error) {
        body["error"] = o.error->to_json();
        return {status_for(o.error->code()), body};
    }
    return {200, body};
}

HttpReply Api::handle(const std::string& method, const std::string& target, const std::string& body) {
    try {
        auto parts = split_path(target);
        if (parts.empty() || parts[0] != "sessions") throw Error("not-found", "no route " + target);
        if (parts.size() == 1) {
            if (method == "GET") return {200, {{"sessions", store_.ids()}}};
            if (method != "POST") throw Error("method-not-allowed", method + " " + target);
            Json req = parse_body(body);
            auto id = store_.create();
            if (req.contains("prompt") && req["prompt"].is_string()) {
                Controller c(gateway_, clock_);
                auto text = req["prompt"].get<std::string>();
                auto o = store_.mutate(id, [&](Workspace& w) { return c.prompt(w, text); });
                auto reply = outcome_reply(id, o);
                reply.status = o.ok ? 201 : reply.status;
                return reply;
            }
            return {201, {{"session", id}}};
        }
        const std::string id = parts[1];
        if (!store_.exists(id)) throw Error("unknown-session", "no session '" + id + "'", {{"session", id}});
        const std::string what = parts.size() > 2 ? parts[2] : "";
        auto need = [&](const char* m) {
            if (method != m) throw Error("method-not-allowed", method + " " + target);
        };
        if (what == "prompt") {
            need("POST");
            Json req = parse_body(body);
            if (!req.contains("prompt") || !req["prompt"].is_string()) throw Error("bad-request", "body needs a 'prompt' string");
            Controller c(gateway_, clock_);
            auto text = req["prompt"].get<std::string>();
            return outcome_reply(id, store_.mutate(id, [&](Workspace& w) { return c.prompt(w, text); }));
        }
        if (what == "events") {
            need("POST");
            auto event = event_from_json(parse_body(body));
            Controller c(gateway_, clock_);
            return outcome_reply(id, store_.mutate(id, [&](Workspace& w) { return c.event(w, event); }));
        }
        if (what == "restore") {
            need("POST");
            if (parts.size() != 4) throw Error("not-found", "restore needs a checkpoint id");
            Controller c(gateway_, clock_);
            return outcome_reply(id, store_.mutate(id, [&](Workspace& w) { return c.restore(w, parts[3]); }));
        }
        need("GET");
        auto w = store_.snapshot(id);
        if (what == "ui") {
            if (!w.started) return {200, to_json(UIDocument{})};
            if (parts.size() == 3) return {200, to_json(compile_session(w.session))};
            if (parts.size() == 5 && parts[3] == "panels") {
                const auto* pv = w.session.view.find_panel(parts[4]);
                std::string rep = query_param(target, "representation");
                if (rep.empty())
                    rep = pv ? pv->representation
                             : choose_representation(w.session.schema, w.session.annotations, parts[4], "");
                return {200, to_json(compile_entity_panel(w.session.schema, w.session.annotations, w.session.data, parts[4],
                                                          rep, w.session.view))};
            }
            if (parts.size() == 5 && parts[3] == "cards")
                return {200, to_json(compile_card(w.session.schema, w.session.annotations, w.session.data, parts[4]))};
            throw Error("not-found", "no route " + target);
        }
        if (parts.size() != 3) throw Error("not-found", "no route " + target);
        if (what == "schema")
            return {200,
                    {{"schema", to_json(w.session.schema)},
                     {"annotations", to_json(w.session.annotations)},
                     {"combined", Json::parse(to_combined_json(w.session.schema, w.session.annotations).dump())},
                     {"dependencies", to_json(w.session.dependencies)}}};
        if (what == "data") return {200, to_json(w.session.data)};
        if (what == "history") return {200, manifest(w.history)};
        throw Error("not-found", "no route " + target);
    } catch (const Error& e) {
        return error_reply(e);
    } catch (const std::exception& e) {
        return {500, {{"error", {{"code", "internal"}, {"message", e.what()}}}}};
    }
}

struct Server::Impl {
    Api& api;
    ServerOptions options;
    net::io_context ioc;
    net::thread_pool workers;
    tcp::acceptor acceptor;
    std::vector<std::thread> threads;
    bool running = false;

    Impl(Api& a, ServerOptions o)
        : api(a), options(std::move(o)), ioc(std::max(1, options.io_threads)), workers(std::max(1, options.worker_threads)),
          acceptor(net::make_strand(ioc)) {}

    void accept();
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket&& socket, SessionStore& store, std::string id)
        : ws_(std::move(socket)), store_(store), id_(std::move(id)) {}

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) return;
        std::weak_ptr<WsSession> weak = shared_from_this();
        auto exec = ws_.get_executor();
        token_ = store_.subscribe(id_, [weak, exec](const Json& event) {
            auto text = event.dump();
            net::post(exec, [weak, text] {
                if (auto self = weak.lock()) self->send(text);
            });
        });
        subscribed_ = true;
        read();
    }

    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->close();
                return;
            }
            self->buffer_.consume(self->buffer_.size());
            self->read();
        });
    }

    void send(const std::string& text) {
        if (closed_) return;
        queue_.push_back(text);
        if (queue_.size() == 1) write();
    }

    void write() {
        ws_.text(true);
        ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->close();
                return;
            }
            self->queue_.pop_front();
            if (!self->queue_.empty()) self->write();
        });
    }

    void close() {
        closed_ = true;
        if (subscribed_) store_.unsubscribe(id_, token_);
        subscribed_ = false;
    }

    websocket::stream<beast::tcp_stream> ws_;
    SessionStore& store_;
    std::string id_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    std::size_t token_ = 0;
    bool subscribed_ = false;
    bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket&& socket, Server::Impl& impl) : stream_(std::move(socket)), impl_(impl) {}

    void run() {
        net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->read(); });
    }

private:
    void read() {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(300));
        http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->on_read(ec);
        });
    }

    void on_read(beast::error_code ec) {
        if (ec) {
            beast::error_code ignored;
            stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
            return;
        }
        std::string target(req_.target());
        if (websocket::is_upgrade(req_)) {
            auto parts = split_path(target);
            if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "stream" && impl_.api.store().exists(parts[1])) {
                stream_.expires_never();
                std::make_shared<WsSession>(stream_.release_socket(), impl_.api.store(), parts[1])->run(std::move(req_));
                return;
            }
            reply(HttpReply{404, {{"error", {{"code", "not-found"}, {"message", "no stream at " + target}}}}});
            return;
        }
        std::string method(req_.method_string());
        std::string body = req_.body();
        net::post(impl_.workers, [self = shared_from_this(), method, target, body] {
            auto r = self->impl_.api.handle(method, target, body);
            net::post(self->stream_.get_executor(), [self, r] { self->reply(r); });
        });
    }

    void reply(const HttpReply& r) {
        auto res = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(r.status), req_.version());
        res->set(http::field::server, "taskui");
        res->set(http::field::content_type, "application/json");
        res->set(http::field::access_control_allow_origin, "*");
        res->keep_alive(req_.keep_alive());
        res->body() = r.body.dump();
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
            if (ec || !res->keep_alive()) {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                return;
            }
            self->read();
        });
    }

    beast::tcp_stream stream_;
    Server::Impl& impl_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
};

}  // namespace

void Server::Impl::accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
        if (!ec) std::make_shared<HttpSession>(std::move(socket), *this)->run();
        if (acceptor.is_open()) accept();
    });
}

Server::Server(Api& api, ServerOptions options) : impl_(std::make_unique<Impl>(api, std::move(options))) {}

Server::~Server() { stop(); }

unsigned short Server::start() {
    auto& i = *impl_;
    tcp::endpoint ep(net::ip::make_address(i.options.address), i.options.port);
    i.acceptor.open(ep.protocol());
    i.acceptor.set_option(net::socket_base::reuse_address(true));
    i.acceptor.bind(ep);
    i.acceptor.listen(net::socket_base::max_listen_connections);
    i.accept();
    i.running = true;
    for (int t = 0; t < std::max(1, i.options.io_threads); ++t) i.threads.emplace_back([&i] { i.ioc.run(); });
    return i.acceptor.local_endpoint().port();
}

void Server::stop() {
    auto& i = *impl_;
    if (!i.running) return;
    i.running = false;
    net::post(i.acceptor.get_executor(), [&i] {
        beast::error_code ignored;
        i.acceptor.close(ignored);
    });
    i.ioc.stop();
    for (auto& t : i.threads) t.join();
    i.threads.clear();
    i.workers.join();
}

}  // namespace taskui
