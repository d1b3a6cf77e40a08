#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "taskui/core/combined.hpp"
#include "taskui/core/schema_ops.hpp"
#include "taskui/deps/engine.hpp"
#include "taskui/service/script.hpp"
#include "taskui/session/history.hpp"
#include "taskui/session/updater.hpp"

using namespace taskui;

namespace {

// Limits, in seconds, and tolerances for each criterion.
constexpr double kGoldenLimit = 1.0;
constexpr int kGoldenRuns = 3;
constexpr double kSummaryLimit = 5.0;
constexpr int kSummaryLists = 1000;
constexpr double kAvgRelTol = 1e-9;
constexpr double kPropagationLimit = 30.0;
constexpr int kPropagationGraphs = 200;
constexpr std::size_t kMaxEdges = 20;
constexpr std::size_t kMaxInstances = 50;
constexpr int kValidateTrials = 100;
constexpr int kRoundTripSeeds = 100;
constexpr int kScriptSteps = 10;
constexpr double kReplayLimit = 10.0;

const std::string kFixtures = TASKUI_FIXTURES;

std::string read_text(const std::string& name) {
    std::ifstream in(kFixtures + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Criterion {
    std::string name;
    std::function<std::string(std::vector<std::string>& failures)> run;  // returns a summary
    double limit = 0;                                                     // 0: untimed
};

template <class F>
std::string code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

void walk(const UINode& n, const std::function<void(const UINode&)>& f) {
    f(n);
    for (const auto& c : n.children) walk(c, f);
}

Session dinner_session() {
    auto spec = combined_from_json(OrderedJson::parse(read_text("dinner_model.json")));
    Session s;
    s.schema = spec.schema;
    s.annotations = spec.annotations;
    s.data = dataset_from_json(s.schema, Json::parse(read_text("dinner_data.json")));
    return s;
}

Dependency dep(const std::string& s, const std::string& t, Mechanism m, const std::string& code) {
    return {Path::parse(s), Path::parse(t), m, Relationship::of_code(code)};
}

// --- golden compile -------------------------------------------------------

std::string golden_compile(std::vector<std::string>& failures) {
    auto s = dinner_session();
    s.view.panels.push_back({"DISH", "table"});
    std::set<std::string> outputs;
    UIDocument doc;
    for (int i = 0; i < kGoldenRuns; ++i) {
        doc = compile_session(s);
        outputs.insert(canonical(doc));
    }
    if (outputs.size() != 1) failures.push_back("output differs between runs");

    const UINode* home = doc.find("home");
    if (!home) {
        failures.push_back("no home panel");
        return "";
    }
    const auto* guests = home->find("home/guest_list");
    if (!guests || guests->props.value("mode", "") != "expanded") failures.push_back("guest_list is not expanded");
    else
        for (const auto& item : guests->children) {
            std::vector<std::string> attrs;
            for (const auto& c : item.children) attrs.push_back(c.props.value("attribute", ""));
            if (attrs != std::vector<std::string>{"name", "phone"}) failures.push_back("guest thumbnail is not [name, phone]");
        }
    const auto* menu = home->find("home/menu");
    if (!menu || menu->props.value("mode", "") != "summary" || menu->children.size() != 1 ||
        menu->children[0].type != "summary")
        failures.push_back("menu is not a summary button");

    const Json cuisines = {"American", "Italian", "Chinese", "Japanese", "French"};
    std::size_t chips = 0, ids = 0;
    for (const auto& p : doc.panels)
        walk(p, [&](const UINode& n) {
            if (n.props.value("attribute", "") == "id") ++ids;
            if (n.props.value("attribute", "") == "cuisine_type" && n.props.value("widget", "") == "category" &&
                n.props.value("categories", Json()) == cuisines)
                ++chips;
        });
    if (chips == 0) failures.push_back("no cuisine category chip with the five cuisines");
    if (ids != 0) failures.push_back(std::to_string(ids) + " id fields rendered");

    UIDocument home_only;
    home_only.panels.push_back(*home);
    if (canonical(home_only) != Json::parse(read_text("golden/home_dinner.json")).dump())
        failures.push_back("home panel differs from golden/home_dinner.json");
    return std::to_string(kGoldenRuns) + " runs, " + std::to_string(chips) + " category chips";
}

// --- summary correctness -------------------------------------------------

std::string summary_correctness(std::vector<std::string>& failures) {
    std::mt19937 rng(2024);
    Schema schema;
    schema.root = "DISH";
    schema.entities["DISH"].attributes = {AttributeDef::text("id"), AttributeDef::number("calories")};
    DataSet none = empty_dataset(schema);
    std::size_t checked = 0;
    for (int list = 0; list < kSummaryLists; ++list) {
        std::size_t n = rng() % 60;
        std::vector<Instance> items(n);
        long long sum = 0;
        long double fsum = 0;
        std::vector<double> floats;
        for (std::size_t i = 0; i < n; ++i) {
            long long v = static_cast<long long>(rng() % 2000000) - 500000;
            sum += v;
            items[i] = {"DISH", "DISH-" + std::to_string(i + 1), {{"calories", Value(static_cast<double>(v))}}};
        }
        std::vector<const Instance*> ptrs;
        for (const auto& it : items) ptrs.push_back(&it);
        auto s = compute_summary({"total", "calories", SummaryOp::Sum, std::nullopt}, ptrs, none);
        if (!s.is_number() || s.as_number() != static_cast<double>(sum)) failures.push_back("SUM mismatch in list " + std::to_string(list));

        // fractional values for AVG
        std::vector<Instance> fitems(n);
        for (std::size_t i = 0; i < n; ++i) {
            double v = std::ldexp(static_cast<double>(rng() % 1000000), -7) * ((rng() & 1) ? 1 : -1);
            fsum += v;
            fitems[i] = {"DISH", "DISH-" + std::to_string(i + 1), {{"calories", Value(v)}}};
        }
        std::vector<const Instance*> fptrs;
        for (const auto& it : fitems) fptrs.push_back(&it);
        auto avg = compute_summary({"mean", "calories", SummaryOp::Avg, std::nullopt}, fptrs, none);
        if (n == 0) {
            if (avg.is_number()) failures.push_back("AVG of an empty list is a number");
        } else {
            double expect = static_cast<double>(fsum / static_cast<long double>(n));
            double got = avg.is_number() ? avg.as_number() : NAN;
            double scale = std::max(std::fabs(expect), 1e-300);
            if (!(std::fabs(got - expect) / scale <= kAvgRelTol) && !(expect == 0 && got == 0))
                failures.push_back("AVG off in list " + std::to_string(list));
        }
        ++checked;
    }
    return std::to_string(checked) + " lists";
}

// --- propagation oracle --------------------------------------------------

constexpr int kX = 12, kA = 6;

struct Node {
    bool item;
    int k;
};
struct State {
    std::array<double, kX> x{};
    std::vector<std::array<double, kA>> a;
    bool operator==(const State&) const = default;
};
struct OEdge {
    Node from, to;
    int mul, add;
    int extra = -1;
};

bool eval_edge(const OEdge& e, State& st) {
    bool changed = false;
    auto put = [&](double& slot, double v) {
        if (slot != v) changed = true;
        slot = v;
    };
    auto xi = [](int k) { return static_cast<std::size_t>(k); };
    if (!e.from.item && !e.to.item) {
        put(st.x[xi(e.to.k)], st.x[xi(e.from.k)] * e.mul + e.add + (e.extra >= 0 ? st.x[xi(e.extra)] : 0));
    } else if (e.from.item && e.to.item) {
        for (auto& row : st.a) put(row[xi(e.to.k)], row[xi(e.from.k)] * e.mul + e.add);
    } else if (e.from.item) {
        double sum = 0;
        for (auto& row : st.a) sum += row[xi(e.from.k)];
        put(st.x[xi(e.to.k)], sum + e.add);
    } else {
        for (auto& row : st.a) put(row[xi(e.to.k)], st.x[xi(e.from.k)] + e.add);
    }
    return changed;
}

State fixpoint(const std::vector<OEdge>& es, State st) {
    for (int pass = 0; pass < 1000; ++pass) {
        bool any = false;
        for (const auto& e : es) any |= eval_edge(e, st);
        if (!any) break;
    }
    return st;
}

std::string propagation_oracle(std::vector<std::string>& failures) {
    Schema s;
    s.root = "R";
    auto& r = s.entities["R"].attributes;
    r.push_back(AttributeDef::text("id"));
    for (int i = 0; i < kX; ++i) r.push_back(AttributeDef::number("x" + std::to_string(i)));
    r.push_back(AttributeDef::array_of("items", ItemSpec{AttrKind::Pntr, std::nullopt, "ITEM"}));
    auto& it = s.entities["ITEM"].attributes;
    it.push_back(AttributeDef::text("id"));
    for (int j = 0; j < kA; ++j) it.push_back(AttributeDef::number("a" + std::to_string(j)));

    auto name = [](Node n) { return (n.item ? "a" : "x") + std::to_string(n.k); };
    auto to_data = [&](const State& st) {
        Json inst = Json::object(), ids = Json::array();
        for (std::size_t i = 0; i < st.a.size(); ++i) {
            std::string id = "ITEM-" + std::to_string(i + 1);
            Json v = {{"id", id}};
            for (int j = 0; j < kA; ++j) v["a" + std::to_string(j)] = st.a[i][static_cast<std::size_t>(j)];
            inst[id] = {{"entity", "ITEM"}, {"values", v}};
            ids.push_back(id);
        }
        Json v = {{"id", "R-1"}, {"items", ids}};
        for (int i = 0; i < kX; ++i) v["x" + std::to_string(i)] = st.x[static_cast<std::size_t>(i)];
        inst["R-1"] = {{"entity", "R"}, {"values", v}};
        return dataset_from_json(s, {{"root", "R-1"}, {"instances", inst}});
    };
    auto from_data = [&](const DataSet& d) {
        State st;
        const auto* root = d.find("R-1");
        for (int i = 0; i < kX; ++i) st.x[static_cast<std::size_t>(i)] = root->find("x" + std::to_string(i))->as_number();
        for (const auto* inst : d.of_entity("ITEM")) {
            std::array<double, kA> row{};
            for (int j = 0; j < kA; ++j) row[static_cast<std::size_t>(j)] = inst->find("a" + std::to_string(j))->as_number();
            st.a.push_back(row);
        }
        return st;
    };

    std::mt19937 rng(77);
    std::size_t max_edges = 0, max_instances = 0, propagations = 0;
    for (int trial = 0; trial < kPropagationGraphs; ++trial) {
        std::vector<Node> nodes;
        for (int i = 0; i < kX; ++i) nodes.push_back({false, i});
        for (int j = 0; j < kA; ++j) nodes.push_back({true, j});
        std::shuffle(nodes.begin(), nodes.end(), rng);
        std::vector<OEdge> es;
        std::vector<bool> is_target(kX + kA, false);
        for (std::size_t v = 1; v < nodes.size() && es.size() < kMaxEdges; ++v) {
            if (rng() % 10 < 3) continue;
            Node from = nodes[rng() % v], to = nodes[v];
            OEdge e{from, to, 1 + static_cast<int>(rng() % 3), static_cast<int>(rng() % 5)};
            if (!from.item && !to.item && rng() % 2) {
                Node other = nodes[rng() % v];
                if (!other.item) e.extra = other.k;
            }
            es.push_back(e);
            is_target[static_cast<std::size_t>((to.item ? kX : 0) + to.k)] = true;
        }
        std::shuffle(es.begin(), es.end(), rng);
        std::vector<Dependency> deps;
        for (const auto& e : es) {
            std::string src = "source." + name(e.from);
            std::string mul = " * " + std::to_string(e.mul), add = " + " + std::to_string(e.add);
            if (!e.from.item && !e.to.item) {
                std::string code = src + mul + add;
                if (e.extra >= 0) code += " + source.x" + std::to_string(e.extra);
                deps.push_back(dep("R." + name(e.from), "R." + name(e.to), Mechanism::Update, code));
            } else if (e.from.item && e.to.item) {
                deps.push_back(dep("ITEM." + name(e.from), "ITEM." + name(e.to), Mechanism::Update, src + mul + add));
            } else if (e.from.item) {
                deps.push_back(dep("R.items", "R." + name(e.to), Mechanism::Update, "sum(source.items[*]." + name(e.from) + ")" + add));
            } else {
                deps.push_back(dep("R." + name(e.from), "ITEM." + name(e.to), Mechanism::Update, src + add));
            }
        }
        max_edges = std::max(max_edges, deps.size());
        DependencyGraph g;
        try {
            g = build_graph(s, deps);
        } catch (const Error& e) {
            failures.push_back("graph " + std::to_string(trial) + " rejected: " + e.code());
            continue;
        }

        State st;
        for (auto& x : st.x) x = static_cast<double>(rng() % 10);
        st.a.resize(rng() % kMaxInstances);  // plus the root
        for (auto& row : st.a)
            for (auto& v : row) v = static_cast<double>(rng() % 10);
        auto data = to_data(st);
        max_instances = std::max(max_instances, data.instances.size());

        auto full = recompute_all(g, s, data);
        State expect = fixpoint(es, st);
        if (!(from_data(full.data) == expect)) {
            failures.push_back("recompute differs on graph " + std::to_string(trial));
            continue;
        }

        for (int change = 0; change < 3; ++change) {
            std::vector<int> free;
            for (int n = 0; n < kX + kA; ++n)
                if (!is_target[static_cast<std::size_t>(n)]) free.push_back(n);
            int n = free[rng() % free.size()];
            State changed = expect;
            double nv = static_cast<double>(100 + rng() % 50);
            Path p;
            if (n < kX) {
                p = Path::parse("R.x" + std::to_string(n));
                changed.x[static_cast<std::size_t>(n)] = nv;
            } else {
                if (changed.a.empty()) continue;
                std::size_t row = rng() % changed.a.size();
                p = Path::parse("ITEM[id=ITEM-" + std::to_string(row + 1) + "].a" + std::to_string(n - kX));
                changed.a[row][static_cast<std::size_t>(n - kX)] = nv;
            }
            auto w = set_unchecked(s, full.data, p, Value(nv));
            auto res = propagate(g, s, w.data, w.changed);
            ++propagations;
            if (!(from_data(res.data) == fixpoint(es, changed)))
                failures.push_back("propagate differs on graph " + std::to_string(trial));
        }
    }
    if (max_edges > kMaxEdges || max_instances > kMaxInstances) failures.push_back("generator exceeded its bounds");
    return std::to_string(kPropagationGraphs) + " graphs, " + std::to_string(propagations) + " propagations, max " +
           std::to_string(max_edges) + " edges / " + std::to_string(max_instances) + " instances";
}

// --- validate semantics --------------------------------------------------

Workspace hotel_workspace() {
    Workspace w;
    w.id = "hotel";
    w.started = true;
    auto& s = w.session;
    s.schema.root = "HOTEL_BOOKING";
    s.schema.entities["HOTEL_BOOKING"].attributes = {AttributeDef::text("id"), AttributeDef::text("checkin_date"),
                                                     AttributeDef::text("checkout_date")};
    s.annotations = default_annotations(s.schema);
    s.data = dataset_from_json(s.schema, Json::parse(R"({"root": "HOTEL_BOOKING-1", "instances": {"HOTEL_BOOKING-1":
        {"entity": "HOTEL_BOOKING", "values": {"id": "HOTEL_BOOKING-1",
         "checkin_date": "2025-03-10", "checkout_date": "2025-03-14"}}}})"));
    s.dependencies = {dep("HOTEL_BOOKING.checkin_date", "HOTEL_BOOKING.checkout_date", Mechanism::Validate,
                          "target.checkout_date > source.checkin_date")};
    return w;
}

std::string validate_semantics(std::vector<std::string>& failures) {
    Gateway gateway(std::make_shared<ScriptedProvider>(Json::object()));
    Controller controller(gateway, fixed_clock());
    std::mt19937 rng(5);
    int rejected = 0;
    for (int trial = 0; trial < kValidateTrials; ++trial) {
        // any date on or before check-in
        int year = 2020 + static_cast<int>(rng() % 6);
        int month = 1 + static_cast<int>(rng() % 12), day = 1 + static_cast<int>(rng() % 28);
        if (year == 2025 && (month > 3 || (month == 3 && day > 10))) year = 2024;
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
        auto w = hotel_workspace();
        const auto before = w;
        DirectManipulationEvent e;
        e.type = "edit-value";
        e.path = "HOTEL_BOOKING[id=HOTEL_BOOKING-1].checkout_date";
        e.value = buf;
        auto o = controller.event(w, e);
        bool ok = !o.ok && o.error && o.error->code() == "validation-rejection" && w == before &&
                  w.session.data == before.session.data && o.events.size() == 1 && o.events[0]["type"] == "violation" &&
                  o.events[0]["violations"].size() == 1;
        if (ok) ++rejected;
        else failures.push_back(std::string("checkout ") + buf + " not rejected cleanly");
    }
    return std::to_string(rejected) + "/" + std::to_string(kValidateTrials) + " rejected with one violation";
}

// --- cycle and syntax gates ----------------------------------------------

std::string gates(std::vector<std::string>& failures) {
    std::mt19937 rng(13);
    Schema s;
    s.root = "R";
    auto& r = s.entities["R"].attributes;
    r.push_back(AttributeDef::text("id"));
    for (int i = 0; i < 10; ++i) r.push_back(AttributeDef::number("v" + std::to_string(i)));
    r.push_back(AttributeDef::array_of("items", ItemSpec{AttrKind::Pntr, std::nullopt, "ITEM"}));
    s.entities["ITEM"].attributes = {AttributeDef::text("id"), AttributeDef::number("w")};

    std::size_t cycles = 0, cycle_accepts = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> perm(10);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::size_t len = 1 + rng() % 6;
        std::vector<Dependency> deps;
        for (std::size_t i = 0; i < len; ++i) {
            auto a = "R.v" + std::to_string(perm[i]), b = "R.v" + std::to_string(perm[(i + 1) % len]);
            deps.push_back(dep(a, b, Mechanism::Update, "source.v" + std::to_string(perm[i]) + " + 1"));
        }
        // acyclic decoys around the cycle
        for (std::size_t i = len; i + 1 < 10; ++i)
            if (rng() % 2)
                deps.push_back(dep("R.v" + std::to_string(perm[i]), "R.v" + std::to_string(perm[i + 1]), Mechanism::Update,
                                   "source.v" + std::to_string(perm[i])));
        if (rng() % 2) deps.push_back(dep("R.items", "R.v" + std::to_string(perm[0]), Mechanism::Update, "count(source.items)"));
        std::shuffle(deps.begin(), deps.end(), rng);
        ++cycles;
        // a one-edge loop is refused as a self-dependency before cycle search
        auto code = code_of([&] { (void)build_graph(s, deps); });
        if (code != (len == 1 ? "invalid-dependency" : "cycle-detected")) ++cycle_accepts;
    }
    if (cycle_accepts) failures.push_back(std::to_string(cycle_accepts) + " cycles accepted");

    // every attribute position of the reference schemas, turned into an array of dicts
    std::size_t mutants = 0, dict_accepts = 0;
    for (const auto* file : {"dinner_model.json", "dinner_stores.json"}) {
        auto base = combined_from_json(OrderedJson::parse(read_text(file))).schema;
        for (const auto& [entity, def] : base.entities) {
            for (std::size_t i = 0; i <= def.attributes.size(); ++i) {
                Schema m = base;
                auto& attrs = m.entities[entity].attributes;
                auto bad = AttributeDef::array_of("rows", ItemSpec{AttrKind::Dict, std::nullopt, std::nullopt});
                if (i < attrs.size() && attrs[i].name != "id") {
                    bad.name = attrs[i].name;
                    attrs[i] = bad;
                } else {
                    attrs.push_back(bad);
                }
                ++mutants;
                auto report = validate_schema(m);
                if (!report.has("no-array-of-dict")) ++dict_accepts;
            }
        }
    }
    if (dict_accepts) failures.push_back(std::to_string(dict_accepts) + " array-of-dict schemas accepted");
    if (!validate_schema(combined_from_json(OrderedJson::parse(read_text("dinner_model.json"))).schema).ok())
        failures.push_back("reference schema rejected");
    return std::to_string(cycles) + " cycles, " + std::to_string(mutants) + " array-of-dict mutants, " +
           std::to_string(cycle_accepts + dict_accepts) + " false accepts";
}

// --- updater round trips -------------------------------------------------

Updater up(const std::string& target, Action a, Json spec = Json::object()) { return {Path::parse(target), a, std::move(spec)}; }

std::string round_trips(std::vector<std::string>& failures) {
    const auto s0 = dinner_session();
    std::mt19937 rng(99);
    const std::vector<Json> kinds = {
        {{"type", "string"}},
        {{"type", "number"}},
        {{"type", "array"}, {"item", {{"type", "number"}}}},
        {{"type", "array"}, {"item", {{"type", "__DISH__"}}}},
        {{"type", "__USER__"}},
        {{"type", "object"}, {"fields", {{"street", {{"type", "string"}}}, {"floor", {{"type", "number"}}}}}},
    };
    const std::vector<std::string> entities = {"DINNER_PLAN", "USER", "DISH"};
    std::size_t add_remove = 0;
    for (int seed = 0; seed < kRoundTripSeeds; ++seed) {
        std::string entity = entities[rng() % entities.size()];
        std::string name = "added_" + std::to_string(rng() % 10000);
        Json attr = kinds[rng() % kinds.size()];
        attr["name"] = name;
        try {
            auto added = apply_updater(s0, up(entity, Action::AddSchema, {{"attributes", {attr}}}));
            auto removed = apply_updater(added.session, up(entity + "." + name, Action::RemoveSchema));
            if (!(removed.session == s0)) failures.push_back("add/remove of " + attr.dump() + " on " + entity + " not restored");
            ++add_remove;
        } catch (const Error& e) {
            failures.push_back("add/remove raised " + e.code());
        }
    }

    std::size_t restores = 0;
    for (int seed = 0; seed < kRoundTripSeeds; ++seed) {
        std::mt19937 g(static_cast<unsigned>(seed));
        Session cur = s0;
        auto [h, first] = checkpoint(History{}, cur, "start", Origin::System, "2026-01-01T00:00:00Z");
        std::vector<std::pair<std::string, Session>> saved = {{first, cur}};
        int extra = 0;
        for (int step = 0; step < kScriptSteps; ++step) {
            auto dishes = cur.data.of_entity("DISH");
            auto users = cur.data.of_entity("USER");
            std::vector<Updater> options;
            if (!dishes.empty()) {
                const auto& d = dishes[g() % dishes.size()]->id;
                options.push_back(up("DISH[id=" + d + "].calories", Action::UpdateData, {{"value", int(g() % 1500)}}));
                options.push_back(up("DISH[id=" + d + "]", Action::RemoveData));
            }
            if (!users.empty())
                options.push_back(up("USER[id=" + users[g() % users.size()]->id + "].email", Action::UpdateData,
                                     {{"value", "guest" + std::to_string(g() % 100) + "@example.org"}}));
            options.push_back(up("DINNER_PLAN.menu", Action::AddData, {{"values", {{"name", "course " + std::to_string(step)}}}}));
            options.push_back(up("DINNER_PLAN.guest_list", Action::AddData, {{"values", {{"name", "guest " + std::to_string(step)}}}}));
            options.push_back(up("USER", Action::AddSchema, {{"attributes", {{{"name", "memo_" + std::to_string(extra++)}, {"type", "string"}}}}}));
            options.push_back(up("DINNER_PLAN.menu", Action::Sort, {{"field", "calories"}, {"direction", g() % 2 ? "asc" : "desc"}}));
            options.push_back(up("DISH", Action::Cluster, {{"field", "cuisine_type"}}));
            auto u = options[g() % options.size()];
            try {
                cur = apply_updater(cur, u).session;
            } catch (const Error& e) {
                failures.push_back("seed " + std::to_string(seed) + ": " + to_json(u).dump() + " raised " + e.code());
                break;
            }
            auto [next, id] = checkpoint(h, cur, to_string(u.action), Origin::Action, "2026-01-01T00:00:00Z", Json::array({to_json(u)}));
            h = next;
            saved.emplace_back(id, cur);
        }
        std::shuffle(saved.begin(), saved.end(), g);
        for (const auto& [id, expect] : saved) {
            auto [h2, restored] = restore(h, id);
            if (!(restored == expect)) failures.push_back("seed " + std::to_string(seed) + ": restore " + id + " differs");
            if (!(history_from_json(to_json(h2)) == h2)) failures.push_back("history does not round-trip");
            ++restores;
        }
    }
    return std::to_string(add_remove) + " add/remove pairs, " + std::to_string(restores) + " restores";
}

// --- end-to-end replay ---------------------------------------------------

// Replays fixtures; anything missing would fall through to a network transport.
class GuardedProvider : public Provider {
public:
    GuardedProvider(std::shared_ptr<Provider> replay, std::shared_ptr<Provider> network)
        : replay_(std::move(replay)), network_(std::move(network)) {}
    std::string complete(const ProviderRequest& r) override {
        try {
            return replay_->complete(r);
        } catch (const Error& e) {
            if (e.code() != "fixture-miss") throw;
            return network_->complete(r);
        }
    }
    std::string name() const override { return "guarded"; }

private:
    std::shared_ptr<Provider> replay_, network_;
};

std::string e2e_replay(std::vector<std::string>& failures) {
    auto script = Json::parse(read_text("e2e/script.json"));
    auto fixtures = std::make_shared<const FixtureStore>(FixtureStore::from_json(Json::parse(read_text("e2e/fixtures.json"))));
    auto transport = std::make_shared<CountingTransport>();
    std::set<std::string> sessions, documents;
    for (int run = 0; run < 2; ++run) {
        auto provider = std::make_shared<GuardedProvider>(std::make_shared<ReplayProvider>(fixtures),
                                                          std::make_shared<LiveProvider>(LiveConfig{}, transport));
        Gateway gateway(provider);
        auto r = run_script(script, gateway);
        if (!r.ok) failures.push_back("a step failed in run " + std::to_string(run));
        sessions.insert(to_json(r.workspace.session).dump() + "\n");
        documents.insert(canonical(r.document) + "\n");
    }
    if (sessions.size() != 1 || documents.size() != 1) failures.push_back("runs differ");
    if (*sessions.begin() != read_text("e2e/golden_session.json")) failures.push_back("session differs from golden");
    if (*documents.begin() != read_text("e2e/golden_ui.json")) failures.push_back("document differs from golden");
    if (transport->calls() != 0) failures.push_back(std::to_string(transport->calls()) + " network calls");
    return std::to_string(script["steps"].size()) + " steps, 2 runs, " + std::to_string(transport->calls()) + " network calls";
}

// --- lint taxonomy -------------------------------------------------------

std::string lint_taxonomy(std::vector<std::string>& failures) {
    auto base = dinner_session().schema;
    base.entities["DINNER_PLAN"].attributes.push_back(AttributeDef::number("total_calories"));
    base.entities["DINNER_PLAN"].attributes.push_back(AttributeDef::number("guest_count"));
    base.entities["DISH"].attributes.push_back(AttributeDef::number("portion_grams"));
    Schema hotel = hotel_workspace().session.schema;

    struct Case {
        const Schema* schema;
        std::vector<Dependency> deps;
        std::string expect;  // empty: clean
    };
    std::vector<Case> cases = {
        {&base, {dep("DINNER_PLAN.menu", "DINNER_PLAN.total_calories", Mechanism::Update, "target.total_calories * 2")}, "reversed"},
        {&base, {dep("DINNER_PLAN.guest_list", "DINNER_PLAN.guest_count", Mechanism::Update, "target.guest_count")}, "reversed"},
        {&base, {dep("DISH.calories", "DISH.portion_grams", Mechanism::Update, "target.portion_grams + 1")}, "reversed"},
        {&base, {dep("DINNER_PLAN.menu", "DISH", Mechanism::Validate, "source.menu")}, "redundant"},
        {&base, {dep("DINNER_PLAN.guest_list", "USER", Mechanism::Validate, "source.guest_list")}, "redundant"},
        {&base, {dep("DINNER_PLAN.host", "USER", Mechanism::Validate, "source.host")}, "redundant"},
        {&base, {dep("DINNER_PLAN.menu", "DINNER_PLAN.total_calories", Mechanism::Update, "sum(source.menu[*].calories)")}, ""},
        {&base, {dep("DINNER_PLAN.guest_list", "DINNER_PLAN.guest_count", Mechanism::Update, "count(source.guest_list)")}, ""},
        {&base,
         {dep("DISH.calories", "DISH.portion_grams", Mechanism::Update, "source.calories / 2"),
          dep("DINNER_PLAN.menu", "DINNER_PLAN.total_calories", Mechanism::Update, "sum(source.menu[*].calories)")},
         ""},
        {&hotel, {dep("HOTEL_BOOKING.checkin_date", "HOTEL_BOOKING.checkout_date", Mechanism::Validate, "target.checkout_date > source.checkin_date")}, ""},
        {&base, {}, ""},
    };
    std::size_t flagged = 0, clean = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        auto findings = lint_dependencies(*cases[i].schema, cases[i].deps);
        if (cases[i].expect.empty()) {
            if (!findings.empty()) failures.push_back("clean case " + std::to_string(i) + " flagged " + findings[0].rule);
            else ++clean;
        } else {
            bool hit = false;
            for (const auto& f : findings) hit |= f.rule == cases[i].expect;
            if (!hit) failures.push_back("case " + std::to_string(i) + " not flagged " + cases[i].expect);
            else ++flagged;
        }
    }
    return std::to_string(flagged) + " faulty flagged, " + std::to_string(clean) + " clean silent";
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"golden-compile", golden_compile, kGoldenLimit},
        {"summary-correctness", summary_correctness, kSummaryLimit},
        {"propagation-oracle", propagation_oracle, kPropagationLimit},
        {"validate-semantics", validate_semantics, 0},
        {"cycle-and-syntax-gates", gates, 0},
        {"updater-round-trips", round_trips, 0},
        {"end-to-end-replay", e2e_replay, kReplayLimit},
        {"lint-taxonomy", lint_taxonomy, 0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        std::vector<std::string> failures;
        std::string summary;
        auto start = std::chrono::steady_clock::now();
        try {
            summary = c.run(failures);
        } catch (const std::exception& e) {
            failures.push_back(std::string("threw: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit > 0 && secs >= c.limit) failures.push_back("took " + std::to_string(secs) + " s");
        bool ok = failures.empty();
        failed += !ok;
        char timing[64];
        if (c.limit > 0) std::snprintf(timing, sizeof timing, "%.3f s < %.0f s", secs, c.limit);
        else std::snprintf(timing, sizeof timing, "%.3f s", secs);
        std::cout << (ok ? "PASS " : "FAIL ") << c.name << ": " << summary << " (" << timing << ")";
        for (std::size_t i = 0; i < failures.size() && i < 5; ++i) std::cout << "\n    " << failures[i];
        if (failures.size() > 5) std::cout << "\n    ... " << failures.size() - 5 << " more";
        std::cout << "\n";
    }
    return failed == 0 ? 0 : 1;
}
