#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "taskui/service/controller.hpp"

namespace taskui {

// Workspaces by id, persisted as one canonical JSON file each. Mutations of
// one session are serialized; readers always see a whole snapshot.
class SessionStore {
public:
    using Listener = std::function<void(const Json& event)>;

    // Loads every <id>.json under `dir` (created when missing). An empty dir keeps everything in memory.
    explicit SessionStore(std::filesystem::path dir = {});

    std::string create();
    bool exists(const std::string& id) const;
    std::vector<std::string> ids() const;
    // Errors: unknown-session.
    Workspace snapshot(const std::string& id) const;

    // Runs `fn` on a copy under the session's writer lock, then persists and
    // publishes the outcome's events before the lock is released.
    Outcome mutate(const std::string& id, const std::function<Outcome(Workspace&)>& fn);

    std::size_t subscribe(const std::string& id, Listener l);
    void unsubscribe(const std::string& id, std::size_t token);

private:
    struct Entry {
        std::mutex writer;
        mutable std::shared_mutex state;
        std::shared_ptr<const Workspace> current;
        std::mutex listeners_mu;
        std::map<std::size_t, Listener> listeners;
    };

    std::shared_ptr<Entry> entry(const std::string& id) const;
    void persist(const Workspace& w) const;

    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Entry>> entries_;
    std::size_t next_token_ = 1;
    std::size_t next_id_ = 1;
};

}  // namespace taskui
