#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "taskui/core/combined.hpp"
#include "taskui/core/schema_ops.hpp"
#include "taskui/deps/engine.hpp"
#include "taskui/llm/provider.hpp"
#include "taskui/service/script.hpp"
#include "taskui/service/server.hpp"
#include "taskui/service/store.hpp"

using namespace taskui;
namespace fs = std::filesystem;

namespace {

// Exit codes, one per failure class.
enum Exit {
    kOk = 0,
    kInvalid = 1,      // validate found violations
    kUsage = 2,        // bad command line
    kIo = 3,           // unreadable input or unwritable output
    kSyntax = 4,       // input is not a well-formed session, schema or script
    kFindings = 5,     // lint-deps reported findings
    kProvider = 6,     // provider unavailable, fixture miss, irreparable response
    kStepFailed = 7,   // a replayed or recorded step failed
    kServer = 8,       // the server could not start
};

struct Failure {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kIo, "cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Failure{kIo, "cannot write " + path.string()};
}

Json read_json(const std::string& path) {
    Json j = Json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw Failure{kSyntax, path + ": not valid JSON"};
    return j;
}

bool is_workspace(const Json& j) { return j.is_object() && j.contains("session") && j.contains("history"); }

Session load_session(const std::string& path) {
    Json j = read_json(path);
    if (is_workspace(j)) return workspace_from_json(j).session;
    return session_from_json(j);
}

int exit_for(const Error& e) {
    const auto& c = e.code();
    if (c == "provider-unavailable" || c == "fixture-miss" || c == "irreparable-response") return kProvider;
    return kSyntax;
}

// A session or workspace file is checked as a whole; anything else is read as
// a combined schema + annotations document.
ValidationReport validate_file(const std::string& path) {
    Json j = read_json(path);
    if (is_workspace(j)) return validate_session(workspace_from_json(j).session);
    if (j.is_object() && j.contains("schema")) return validate_session(session_from_json(j));
    auto spec = combined_from_json(OrderedJson::parse(read_file(path)));
    auto report = validate_schema(spec.schema);
    if (report.ok()) report.merge(validate_annotations(spec.schema, spec.annotations));
    return report;
}

std::shared_ptr<Provider> live_provider() {
    return std::make_shared<LiveProvider>(LiveConfig::from_environment(), std::make_shared<HttpTransport>());
}

int cmd_validate(const std::vector<std::string>& files) {
    int rc = kOk;
    for (const auto& f : files) {
        try {
            auto report = validate_file(f);
            if (report.ok()) {
                std::cout << f << ": ok\n";
                continue;
            }
            for (const auto& i : report.issues())
                std::cout << f << ": " << i.rule << " at " << i.path << ": " << i.message << "\n";
            rc = std::max(rc, int(kInvalid));
        } catch (const Error& e) {
            // a document that cannot even be decoded into a model is invalid too
            std::cout << f << ": " << e.code() << ": " << e.what() << "\n";
            rc = std::max(rc, int(kInvalid));
        } catch (const Failure& e) {
            std::cout << f << ": " << e.message << "\n";
            rc = std::max(rc, e.code);
        }
    }
    return rc;
}

int cmd_compile(const std::string& in, const std::string& out) {
    auto text = canonical(compile_session(load_session(in)));
    if (out.empty() || out == "-") std::cout << text << "\n";
    else write_file(out, text + "\n");
    return kOk;
}

int cmd_lint(const std::string& in) {
    auto s = load_session(in);
    auto findings = lint_dependencies(s.schema, s.dependencies);
    for (const auto& f : findings) std::cout << f.to_json().dump() << "\n";
    return findings.empty() ? kOk : kFindings;
}

int write_result(const ScriptResult& r, const fs::path& dir) {
    write_file(dir / "session.json", to_json(r.workspace.session).dump() + "\n");
    write_file(dir / "workspace.json", to_json(r.workspace).dump() + "\n");
    write_file(dir / "ui.json", canonical(r.document) + "\n");
    std::string events;
    for (const auto& e : r.events) events += e.dump() + "\n";
    write_file(dir / "events.jsonl", events);
    for (const auto& s : r.steps) std::cout << s.dump() << "\n";
    return r.ok ? kOk : kStepFailed;
}

int cmd_replay(const std::string& script, const std::string& fixtures, const std::string& out) {
    auto store = std::make_shared<const FixtureStore>(FixtureStore::load(fixtures));
    Gateway gateway(std::make_shared<ReplayProvider>(store));
    return write_result(run_script(read_json(script), gateway), out);
}

int cmd_record(const std::string& script, const std::string& provider, const std::string& responses,
               const std::string& fixtures, const std::string& out) {
    std::shared_ptr<Provider> inner;
    if (provider == "live") inner = live_provider();
    else inner = std::make_shared<ScriptedProvider>(read_json(responses));
    auto sink = std::make_shared<FixtureStore>();
    Gateway gateway(std::make_shared<RecordingProvider>(inner, sink));
    auto result = run_script(read_json(script), gateway);
    sink->save(fixtures);
    return out.empty() ? (result.ok ? kOk : kStepFailed) : write_result(result, out);
}

int cmd_serve(const std::string& address, int port, const std::string& store_dir, const std::string& provider,
              const std::string& fixtures, int threads) {
    std::shared_ptr<Provider> p;
    if (provider == "replay") {
        if (fixtures.empty()) throw Failure{kUsage, "--provider replay needs --fixtures"};
        p = std::make_shared<ReplayProvider>(std::make_shared<const FixtureStore>(FixtureStore::load(fixtures)));
    } else {
        p = live_provider();
    }
    Gateway gateway(p);
    SessionStore store(store_dir);
    Api api(store, gateway, utc_now);

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    ServerOptions options;
    options.address = address;
    options.port = static_cast<unsigned short>(port);
    options.worker_threads = threads;
    Server server(api, options);
    unsigned short bound = 0;
    try {
        bound = server.start();
    } catch (const std::exception& e) {
        throw Failure{kServer, std::string("cannot listen: ") + e.what()};
    }
    std::cout << "listening on " << address << ":" << bound << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"taskui: task-driven interface generation service"};
    app.require_subcommand(1);

    auto* serve = app.add_subcommand("serve", "Run the HTTP/WebSocket service");
    std::string address = "127.0.0.1", store_dir = "sessions", provider = "live", fixtures;
    int port = 8080, threads = 4;
    serve->add_option("--address", address, "Listen address");
    serve->add_option("--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve->add_option("--store-dir", store_dir, "Directory for session files");
    serve->add_option("--provider", provider, "Model provider")->check(CLI::IsMember({"live", "replay"}));
    serve->add_option("--fixtures", fixtures, "Fixture file for --provider replay");
    serve->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Check session, workspace or combined schema files");
    std::vector<std::string> files;
    validate->add_option("files", files, "Files to check")->required();

    auto* compile = app.add_subcommand("compile", "Compile a session into its canonical UI document");
    std::string input, output;
    compile->add_option("session", input, "Session or workspace file")->required();
    compile->add_option("-o,--output", output, "Output file (stdout when omitted)");

    auto* lint = app.add_subcommand("lint-deps", "Report dependency findings as JSON lines");
    lint->add_option("session", input, "Session or workspace file")->required();

    auto* replay = app.add_subcommand("replay", "Run a prompt/event script against recorded fixtures");
    std::string script, out_dir = ".";
    replay->add_option("script", script, "Script file")->required();
    replay->add_option("--fixtures", fixtures, "Fixture file")->required();
    replay->add_option("-o,--out-dir", out_dir, "Directory for session.json, workspace.json, ui.json, events.jsonl");

    auto* record = app.add_subcommand("record", "Run a script and save every provider exchange as fixtures");
    std::string responses, rec_provider = "scripted", rec_out;
    record->add_option("script", script, "Script file")->required();
    record->add_option("--provider", rec_provider, "Answer source")->check(CLI::IsMember({"live", "scripted"}));
    record->add_option("--responses", responses, "Canned responses by request kind (scripted)");
    record->add_option("-o,--output", fixtures, "Fixture file to write")->required();
    record->add_option("--out-dir", rec_out, "Also write the run's results here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kOk : kUsage;
    }

    try {
        if (*serve) return cmd_serve(address, port, store_dir, provider, fixtures, threads);
        if (*validate) return cmd_validate(files);
        if (*compile) return cmd_compile(input, output);
        if (*lint) return cmd_lint(input);
        if (*replay) return cmd_replay(script, fixtures, out_dir);
        if (*record) {
            if (rec_provider == "scripted" && responses.empty()) throw Failure{kUsage, "--provider scripted needs --responses"};
            return cmd_record(script, rec_provider, responses, fixtures, rec_out);
        }
    } catch (const Failure& f) {
        std::cerr << "taskui: " << f.message << "\n";
        return f.code;
    } catch (const Error& e) {
        std::cerr << "taskui: " << e.code() << ": " << e.what() << "\n";
        return exit_for(e);
    } catch (const std::exception& e) {
        std::cerr << "taskui: " << e.what() << "\n";
        return kIo;
    }
    return kUsage;
}
