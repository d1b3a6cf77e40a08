#include "taskui/service/store.hpp"

#include <fstream>
#include <sstream>

namespace taskui {

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (dir_.empty()) return;
    std::filesystem::create_directories(dir_);
    for (const auto& f : std::filesystem::directory_iterator(dir_)) {
        if (f.path().extension() != ".json") continue;
        std::ifstream in(f.path());
        std::stringstream ss;
        ss << in.rdbuf();
        auto w = workspace_from_json(Json::parse(ss.str()));
        auto e = std::make_shared<Entry>();
        e->current = std::make_shared<const Workspace>(std::move(w));
        entries_[e->current->id] = e;
        const auto& id = e->current->id;
        if (id.rfind("s", 0) == 0) {
            try {
                next_id_ = std::max(next_id_, std::stoul(id.substr(1)) + 1);
            } catch (const std::exception&) {
            }
        }
    }
}

std::string SessionStore::create() {
    std::lock_guard lock(mu_);
    std::string id;
    do {
        id = "s" + std::to_string(next_id_++);
    } while (entries_.count(id));
    auto e = std::make_shared<Entry>();
    Workspace w;
    w.id = id;
    persist(w);
    e->current = std::make_shared<const Workspace>(std::move(w));
    entries_[id] = e;
    return id;
}

bool SessionStore::exists(const std::string& id) const {
    std::lock_guard lock(mu_);
    return entries_.count(id) > 0;
}

std::vector<std::string> SessionStore::ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, _] : entries_) out.push_back(id);
    return out;
}

std::shared_ptr<SessionStore::Entry> SessionStore::entry(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(id);
    if (it == entries_.end()) throw Error("unknown-session", "no session '" + id + "'", {{"session", id}});
    return it->second;
}

Workspace SessionStore::snapshot(const std::string& id) const {
    auto e = entry(id);
    std::shared_lock lock(e->state);
    return *e->current;
}

Outcome SessionStore::mutate(const std::string& id, const std::function<Outcome(Workspace&)>& fn) {
    auto e = entry(id);
    std::lock_guard writer(e->writer);
    Workspace work;
    {
        std::shared_lock lock(e->state);
        work = *e->current;
    }
    Outcome o = fn(work);
    if (o.ok) {
        persist(work);
        std::unique_lock lock(e->state);
        e->current = std::make_shared<const Workspace>(std::move(work));
    }
    std::lock_guard ll(e->listeners_mu);
    for (const auto& ev : o.events)
        for (const auto& [_, l] : e->listeners) l(ev);
    return o;
}

std::size_t SessionStore::subscribe(const std::string& id, Listener l) {
    auto e = entry(id);
    std::size_t token;
    {
        std::lock_guard lock(mu_);
        token = next_token_++;
    }
    std::lock_guard ll(e->listeners_mu);
    e->listeners[token] = std::move(l);
    return token;
}

void SessionStore::unsubscribe(const std::string& id, std::size_t token) {
    std::shared_ptr<Entry> e;
    try {
        e = entry(id);
    } catch (const Error&) {
        return;
    }
    std::lock_guard ll(e->listeners_mu);
    e->listeners.erase(token);
}

void SessionStore::persist(const Workspace& w) const {
    if (dir_.empty()) return;
    auto path = dir_ / (w.id + ".json");
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("store-io", "cannot write " + tmp.string());
        out << to_json(w).dump() << "\n";
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace taskui
