#include "taskui/deps/engine.hpp"

#include <algorithm>
#include <future>
#include <queue>

#include "taskui/core/hash.hpp"

namespace taskui {

namespace {

[[noreturn]] void invalid(std::size_t index, const std::string& what) {
    throw Error("invalid-dependency", "dependency " + std::to_string(index) + ": " + what, {{"dependency", index}});
}

// Steps after the leading entity-level selectors.
std::vector<PathStep> attribute_steps(const Path& p) {
    const auto& s = p.steps();
    auto it = std::find_if(s.begin(), s.end(), [](const PathStep& st) { return st.kind == PathStep::Kind::Attr; });
    return {it, s.end()};
}

std::optional<std::string> leading_id(const Path& p) {
    for (const auto& st : p.steps()) {
        if (st.kind == PathStep::Kind::Attr) break;
        if (st.kind == PathStep::Kind::Id) return st.name;
    }
    return std::nullopt;
}

Path extend(Path base, const std::vector<PathStep>& steps) {
    for (const auto& st : steps) {
        switch (st.kind) {
            case PathStep::Kind::Attr: base = base.attr(st.name); break;
            case PathStep::Kind::Index: base = base.at(st.index); break;
            case PathStep::Kind::All: base = base.all(); break;
            case PathStep::Kind::Id: base = base.id(st.name); break;
        }
    }
    return base;
}

// Schema addresses an access chain reads. Arrays are mapped over implicitly,
// so `menu.calories` reads like `menu[*].calories`.
std::vector<std::string> chain_addresses(const Schema& schema, const std::string& anchor,
                                         const std::vector<PathStep>& chain, std::size_t index) {
    Path p(anchor);
    bool at_entity = true;
    for (const auto& st : chain) {
        if (at_entity && st.kind == PathStep::Kind::Index) {
            p = p.all();
            continue;
        }
        if (st.kind == PathStep::Kind::Attr) {
            at_entity = false;
            auto r = resolve_path(schema, p);
            if (r.kind == ResolvedKind::Arry && !r.element) p = p.all();
        }
        p = extend(p, {st});
    }
    try {
        auto r = resolve_path(schema, p);
        if (r.footprint.empty()) return {anchor};
        return r.footprint;
    } catch (const Error& e) {
        invalid(index, "expression reads '" + p.str() + "': " + e.what());
    }
}

struct OwnerContext {
    ObjectId owner;
    Bindings bindings;
    Path target;   // concrete
    Path source;   // concrete where it can be
};

std::vector<OwnerContext> owners(const GraphEdge& e, const Schema& schema, const DataSet& data) {
    std::vector<OwnerContext> out;
    const auto& anchor = e.dep.target.entity();
    std::vector<const Instance*> insts;
    if (anchor == schema.root) {
        if (const auto* r = data.find(data.root)) insts.push_back(r);
    } else {
        insts = data.of_entity(anchor);
    }
    auto only = leading_id(e.dep.target);
    Value source_all;
    const auto& sanchor = e.dep.source.entity();
    bool same = sanchor == anchor;
    if (!same && sanchor != schema.root) {
        Value::List l;
        auto sid = leading_id(e.dep.source);
        for (const auto* s : data.of_entity(sanchor))
            if (!sid || *sid == s->id) l.push_back(Value(Ref{s->id}));
        source_all = Value(std::move(l));
    }
    for (const auto* inst : insts) {
        if (only && *only != inst->id) continue;
        OwnerContext c;
        c.owner = inst->id;
        Path ip = instance_path(data, *inst);
        c.target = extend(ip, attribute_steps(e.dep.target));
        c.bindings["target"] = Value(Ref{inst->id});
        if (same) {
            c.bindings["source"] = Value(Ref{inst->id});
            c.source = extend(ip, attribute_steps(e.dep.source));
        } else if (sanchor == schema.root) {
            c.bindings["source"] = data.root.empty() ? Value() : Value(Ref{data.root});
            c.source = extend(Path(sanchor), attribute_steps(e.dep.source));
        } else {
            c.bindings["source"] = source_all;
            c.source = e.dep.source;
        }
        out.push_back(std::move(c));
    }
    return out;
}

ObjectLookup lookup_in(const DataSet& data) {
    return [&data](const ObjectId& id) -> const Value::Dict* {
        const auto* inst = data.find(id);
        return inst ? &inst->values : nullptr;
    };
}

Json values_at(const Schema& schema, const DataSet& data, const Path& p) {
    try {
        auto vs = get(schema, data, p);
        if (vs.size() == 1) return to_json(vs.front());
        Json arr = Json::array();
        for (const auto& v : vs) arr.push_back(to_json(v));
        return arr;
    } catch (const Error&) {
        return nullptr;
    }
}

Value coerce(const AttributeDef& def, Value v) {
    if (def.kind == AttrKind::Sval && def.hint == ScalarHint::Text) {
        if (v.is_empty()) return Value(std::string());
        if (v.is_number() || v.is_bool()) return Value(to_display(v));
    }
    if (def.kind == AttrKind::Sval && def.hint == ScalarHint::Number && v.is_text()) {
        try {
            std::size_t used = 0;
            double d = std::stod(v.as_text(), &used);
            if (used == v.as_text().size()) return Value(d);
        } catch (const std::logic_error&) {
        }
    }
    if (def.kind == AttrKind::Pntr && v.is_text()) return Value(Ref{v.as_text()});
    if (def.kind == AttrKind::Pntr && v.is_empty()) return Value(Ref::null());
    if (def.is_entity_array() && v.is_list()) {
        Value::List l;
        for (const auto& e : v.as_list()) l.push_back(e.is_text() ? Value(Ref{e.as_text()}) : e);
        return Value(std::move(l));
    }
    return v;
}

NlRequest nl_request(const GraphEdge& e, const Schema& schema, const DataSet& data, const OwnerContext& c) {
    NlRequest r;
    r.dependency = e.index;
    r.mechanism = e.dep.mechanism;
    r.relationship = e.dep.relationship.natural.value_or("");
    r.source = e.dep.source.str();
    r.target = e.dep.target.str();
    r.owner = c.owner;
    r.source_value = values_at(schema, data, c.source);
    r.target_value = values_at(schema, data, c.target);
    Json ov = Json::object();
    if (const auto* inst = data.find(c.owner))
        for (const auto& [k, v] : inst->values) ov[k] = to_json(v);
    r.owner_values = ov;
    return r;
}

Value run_nl(const NlExecutor& nl, NlCache* cache, const NlRequest& req) {
    std::string key;
    if (cache) {
        key = NlCache::key_for(req);
        if (auto hit = cache->find(key)) return *hit;
    }
    Value v = nl(req);
    if (cache) cache->put(key, v);
    return v;
}

struct PlannedWrite {
    Path path;
    Value value;
};

struct EdgeOutcome {
    std::vector<PlannedWrite> writes;
    bool failed = false;
};

EdgeOutcome compute_update(const GraphEdge& e, const Schema& schema, const DataSet& data, const ExecutionBudget& budget,
                           const NlExecutor& nl, NlCache* cache) {
    EdgeOutcome out;
    auto tres = resolve_path(schema, e.dep.target);
    const AttributeDef& tdef = *tres.attribute;
    auto lookup = lookup_in(data);
    for (const auto& c : owners(e, schema, data)) {
        try {
            Value v;
            if (e.expr) {
                EvalBudget b{budget.max_expression_steps, 0};
                v = evaluate(*e.expr, c.bindings, b, lookup);
            } else if (nl) {
                v = run_nl(nl, cache, nl_request(e, schema, data, c));
            } else {
                out.failed = true;
                continue;
            }
            out.writes.push_back({c.target, coerce(tdef, std::move(v))});
        } catch (const Error&) {
            out.failed = true;
        } catch (const std::exception&) {
            out.failed = true;
        }
    }
    return out;
}

// Result of one Validate edge for one owner: nullopt passes.
std::optional<Violation> check_owner(const GraphEdge& e, const Schema& schema, const DataSet& data,
                                     const OwnerContext& c, const ExecutionBudget& budget, const NlExecutor& nl,
                                     NlCache* cache) {
    Violation v;
    v.dependency = e.index;
    v.owner = c.owner;
    v.path = c.target.str();
    v.attempted = values_at(schema, data, c.target);
    try {
        Value r;
        if (e.expr) {
            EvalBudget b{budget.max_expression_steps, 0};
            r = evaluate(*e.expr, c.bindings, b, lookup_in(data));
        } else if (nl) {
            r = run_nl(nl, cache, nl_request(e, schema, data, c));
        } else {
            return std::nullopt;
        }
        if (r.is_empty() || (r.is_bool() && r.as_bool())) return std::nullopt;
        if (r.is_bool()) {
            v.kind = "violated";
            v.message = e.dep.relationship.code ? "constraint not met: " + *e.dep.relationship.code
                                                : "constraint not met: " + e.dep.relationship.natural.value_or("");
            return v;
        }
        v.kind = "evaluation-failed";
        v.message = "constraint produced " + r.type_name() + " instead of a boolean";
        return v;
    } catch (const Error& err) {
        v.kind = "evaluation-failed";
        v.message = err.code() + ": " + err.what();
        return v;
    } catch (const std::exception& err) {
        v.kind = "evaluation-failed";
        v.message = err.what();
        return v;
    }
}

bool reads_any(const GraphEdge& e, const std::vector<std::string>& dirty) {
    for (const auto& r : e.reads)
        for (const auto& d : dirty)
            if (addresses_overlap(r, d)) return true;
    return false;
}

std::vector<std::size_t> find_cycle(const std::vector<std::vector<std::size_t>>& succ, const std::vector<bool>& left) {
    std::vector<int> state(succ.size(), 0);
    std::vector<std::size_t> stack;
    std::vector<std::size_t> cycle;
    std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
        state[u] = 1;
        stack.push_back(u);
        for (auto v : succ[u]) {
            if (!left[v]) continue;
            if (state[v] == 1) {
                auto it = std::find(stack.begin(), stack.end(), v);
                cycle.assign(it, stack.end());
                return true;
            }
            if (state[v] == 0 && dfs(v)) return true;
        }
        stack.pop_back();
        state[u] = 2;
        return false;
    };
    for (std::size_t u = 0; u < succ.size(); ++u)
        if (left[u] && state[u] == 0 && dfs(u)) break;
    return cycle;
}

PropagateResult run(const DependencyGraph& graph, const Schema& schema, const DataSet& data,
                    std::vector<std::string> dirty, bool everything, const ExecutionBudget& budget,
                    const NlExecutor& nl, NlCache* cache) {
    PropagateResult res{data, {}, {}, {}, {}, 0};
    if (dirty.empty() && !everything) return res;
    std::vector<std::string> all_dirty = dirty;
    std::vector<std::string> pending = dirty;
    std::set<std::size_t> stale;
    bool first = true;
    while (first || !pending.empty()) {
        if (++res.rounds > budget.max_rounds)
            throw Error("budget-exceeded", "propagation did not settle within " + std::to_string(budget.max_rounds) + " rounds");
        std::vector<std::string> round_dirty = std::move(pending);
        pending.clear();
        std::vector<std::size_t> fired_round;
        for (const auto& level : graph.levels) {
            std::vector<std::size_t> firing;
            for (auto i : level)
                if ((everything && first) || reads_any(graph.edges[i], round_dirty)) firing.push_back(i);
            if (firing.empty()) continue;
            std::vector<EdgeOutcome> outcomes(firing.size());
            std::vector<std::pair<std::size_t, std::future<EdgeOutcome>>> async;
            for (std::size_t k = 0; k < firing.size(); ++k) {
                const auto& e = graph.edges[firing[k]];
                if (!e.expr && nl && firing.size() > 1) {
                    const DataSet& snapshot = res.data;
                    async.emplace_back(k, std::async(std::launch::async, [&e, &schema, &snapshot, &budget, &nl, cache] {
                        return compute_update(e, schema, snapshot, budget, nl, cache);
                    }));
                } else {
                    outcomes[k] = compute_update(e, schema, res.data, budget, nl, cache);
                }
            }
            for (auto& [k, f] : async) outcomes[k] = f.get();
            for (std::size_t k = 0; k < firing.size(); ++k) {
                const auto& e = graph.edges[firing[k]];
                res.fired.push_back(e.index);
                if (outcomes[k].failed) stale.insert(e.index);
                bool changed = false;
                for (const auto& w : outcomes[k].writes) {
                    try {
                        for (const auto& slot : locate(schema, res.data, w.path)) {
                            auto wr = write_slot(schema, res.data, slot, w.value);
                            if (wr.changed.empty()) continue;
                            res.data = std::move(wr.data);
                            res.updated.insert(res.updated.end(), wr.changed.begin(), wr.changed.end());
                            changed = true;
                        }
                    } catch (const Error&) {
                        stale.insert(e.index);
                    }
                }
                if (changed) {
                    round_dirty.push_back(e.writes);
                    all_dirty.push_back(e.writes);
                    for (auto f : fired_round)
                        if (f != e.index && graph.edges[f].reads.size() && reads_any(graph.edges[f], {e.writes})) {
                            pending.push_back(e.writes);
                            break;
                        }
                }
                fired_round.push_back(e.index);
            }
        }
        first = false;
    }
    for (const auto& e : graph.edges) {
        if (e.dep.mechanism != Mechanism::Validate) continue;
        if (!everything && !reads_any(e, all_dirty)) continue;
        for (const auto& c : owners(e, schema, res.data))
            if (auto v = check_owner(e, schema, res.data, c, budget, nl, cache)) res.violations.push_back(*v);
    }
    res.stale.assign(stale.begin(), stale.end());
    return res;
}

}  // namespace

bool addresses_overlap(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    if (b.substr(0, a.size()) != a) return false;
    return b.size() == a.size() || b[a.size()] == '.';
}

std::string address_of(const Schema& schema, const Path& path) {
    auto r = resolve_path(schema, path);
    return r.address();
}

std::optional<Value> NlCache::find(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void NlCache::put(const std::string& key, const Value& v) {
    std::lock_guard lock(mu_);
    entries_[key] = v;
}

std::size_t NlCache::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

std::string NlCache::key_for(const NlRequest& r) {
    return std::to_string(r.dependency) + "|" + fnv1a64_hex(r.relationship + "\n" + r.target) + "|" + r.owner + "|" +
           fnv1a64_hex(r.source_value.dump());
}

Json Violation::to_json() const {
    return {{"dependency", dependency}, {"kind", kind}, {"message", message}, {"path", path},
            {"owner", owner}, {"attempted", attempted}};
}

Json LintFinding::to_json() const { return {{"dependency", dependency}, {"rule", rule}, {"message", message}}; }

DependencyGraph build_graph(const Schema& schema, const std::vector<Dependency>& deps) {
    DependencyGraph g;
    for (std::size_t i = 0; i < deps.size(); ++i) {
        const auto& d = deps[i];
        GraphEdge e;
        e.index = i;
        e.dep = d;
        if (d.source == d.target) invalid(i, "source and target are the same path");
        PathResolution sres, tres;
        for (const auto* p : {&d.source, &d.target}) {
            try {
                (p == &d.source ? sres : tres) = resolve_path(schema, *p);
            } catch (const Error& err) {
                throw Error("unresolved-endpoint", "dependency " + std::to_string(i) + ": " + err.what(),
                            {{"dependency", i}, {"path", p->str()}, {"reason", err.code()}});
            }
        }
        if (!tres.attribute) {
            if (d.mechanism == Mechanism::Update) invalid(i, "an Update target must be an attribute");
            e.writes = tres.entity;
        } else {
            e.writes = tres.address();
        }
        if (tres.many && leading_id(d.target) == std::nullopt && tres.element && d.mechanism == Mechanism::Update)
            invalid(i, "an Update target cannot select several array elements");
        if (d.relationship.code.has_value() == d.relationship.natural.has_value())
            invalid(i, "relationship needs exactly one of code or natural");
        auto add_reads = [&](const PathResolution& r) {
            if (r.footprint.empty()) e.reads.insert(r.entity);
            e.reads.insert(r.footprint.begin(), r.footprint.end());
        };
        add_reads(sres);
        if (d.mechanism == Mechanism::Validate) add_reads(tres);
        if (d.relationship.code) {
            try {
                e.expr = Expression::parse(*d.relationship.code);
            } catch (const Error& err) {
                throw Error("parse-error", "dependency " + std::to_string(i) + ": " + err.what(),
                            {{"dependency", i}, {"code", *d.relationship.code}});
            }
            for (const auto& n : e.expr->free_names())
                if (n != "source" && n != "target") invalid(i, "expression reads unknown name '" + n + "'");
            for (const auto& chain : e.expr->access_chains("source"))
                for (auto& a : chain_addresses(schema, d.source.entity(), chain, i)) e.reads.insert(a);
            for (const auto& chain : e.expr->access_chains("target"))
                for (auto& a : chain_addresses(schema, d.target.entity(), chain, i)) e.reads.insert(a);
        }
        g.edges.push_back(std::move(e));
    }

    // Update edges only. u -> v when v must fire after u.
    std::vector<std::size_t> upd;
    for (const auto& e : g.edges)
        if (e.dep.mechanism == Mechanism::Update) upd.push_back(e.index);
    const std::size_t n = g.edges.size();
    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<std::size_t> indeg(n, 0);
    for (auto u : upd) {
        const auto& eu = g.edges[u];
        for (const auto& r : eu.reads) {
            // Reading inside (or exactly) one's own target never settles.
            if (r.size() >= eu.writes.size() && addresses_overlap(r, eu.writes))
                throw Error("cycle-detected", "update cycle: " + eu.dep.target.str() + " reads itself",
                            {{"cycle", Json::array({eu.dep.target.str()})}, {"dependencies", Json::array({u})}});
        }
        for (auto v : upd) {
            if (u == v) continue;
            const auto& ev = g.edges[v];
            bool feeds = reads_any(ev, {eu.writes});
            bool shared = u < v && addresses_overlap(eu.writes, ev.writes);
            if (feeds || shared) {
                succ[u].push_back(v);
                ++indeg[v];
            }
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (auto u : upd)
        if (indeg[u] == 0) ready.push(u);
    std::vector<std::size_t> depth(n, 0);
    while (!ready.empty()) {
        auto u = ready.top();
        ready.pop();
        g.order.push_back(u);
        for (auto v : succ[u]) {
            depth[v] = std::max(depth[v], depth[u] + 1);
            if (--indeg[v] == 0) ready.push(v);
        }
    }
    if (g.order.size() != upd.size()) {
        std::vector<bool> left(n, false);
        for (auto u : upd) left[u] = true;
        for (auto u : g.order) left[u] = false;
        auto cycle = find_cycle(succ, left);
        Json paths = Json::array(), ids = Json::array();
        std::string text;
        for (auto u : cycle) {
            paths.push_back(g.edges[u].dep.target.str());
            ids.push_back(u);
            text += g.edges[u].dep.target.str() + " -> ";
        }
        if (!cycle.empty()) text += g.edges[cycle.front()].dep.target.str();
        throw Error("cycle-detected", "update cycle: " + text, {{"cycle", paths}, {"dependencies", ids}});
    }
    for (auto u : g.order) {
        if (g.levels.size() <= depth[u]) g.levels.resize(depth[u] + 1);
        g.levels[depth[u]].push_back(u);
    }
    return g;
}

CheckResult check_state(const DependencyGraph& graph, const Schema& schema, const DataSet& before,
                        const DataSet& after, const std::vector<Path>& changed, const ExecutionBudget& budget) {
    CheckResult res;
    std::vector<std::string> dirty;
    std::set<ObjectId> written;
    for (const auto& p : changed) {
        try {
            dirty.push_back(address_of(schema, p));
        } catch (const Error&) {
            dirty.push_back(p.entity());
        }
        if (auto id = leading_id(p)) written.insert(*id);
        else if (p.entity() == schema.root) written.insert(after.root);
    }
    for (const auto& e : graph.edges) {
        if (e.dep.mechanism != Mechanism::Validate || !reads_any(e, dirty)) continue;
        auto old_owners = owners(e, schema, before);
        for (const auto& c : owners(e, schema, after)) {
            auto v = check_owner(e, schema, after, c, budget, {}, nullptr);
            if (!v) continue;
            if (!written.count(c.owner)) {
                auto it = std::find_if(old_owners.begin(), old_owners.end(), [&](const OwnerContext& o) { return o.owner == c.owner; });
                if (it != old_owners.end() && check_owner(e, schema, before, *it, budget, {}, nullptr)) continue;
            }
            res.violations.push_back(*v);
        }
    }
    res.accepted = res.violations.empty();
    return res;
}

CheckResult check_write(const DependencyGraph& graph, const Schema& schema, const DataSet& data, const Write& write,
                        const ExecutionBudget& budget) {
    auto wr = set_unchecked(schema, data, write.path, write.value);
    if (wr.changed.empty()) return {};
    auto res = check_state(graph, schema, data, wr.data, wr.changed, budget);
    for (auto& v : res.violations) {
        v.path = write.path.str();
        v.attempted = to_json(write.value);
    }
    return res;
}

PropagateResult propagate(const DependencyGraph& graph, const Schema& schema, const DataSet& data,
                          const std::vector<Path>& changed, const ExecutionBudget& budget, const NlExecutor& nl,
                          NlCache* cache) {
    std::vector<std::string> dirty;
    for (const auto& p : changed) {
        try {
            dirty.push_back(address_of(schema, p));
        } catch (const Error&) {
            dirty.push_back(p.entity());
        }
    }
    return run(graph, schema, data, std::move(dirty), false, budget, nl, cache);
}

PropagateResult recompute_all(const DependencyGraph& graph, const Schema& schema, const DataSet& data,
                              const ExecutionBudget& budget, const NlExecutor& nl, NlCache* cache) {
    return run(graph, schema, data, {}, true, budget, nl, cache);
}

std::vector<LintFinding> lint_dependencies(const Schema& schema, const std::vector<Dependency>& deps) {
    std::vector<LintFinding> out;
    std::map<std::string, std::size_t> writers;
    for (std::size_t i = 0; i < deps.size(); ++i) {
        const auto& d = deps[i];
        PathResolution s, t;
        try {
            s = resolve_path(schema, d.source);
            t = resolve_path(schema, d.target);
        } catch (const Error& e) {
            out.push_back({i, "unresolved-endpoint", e.what()});
            continue;
        }
        std::optional<Expression> expr;
        if (d.relationship.code) {
            try {
                expr = Expression::parse(*d.relationship.code);
            } catch (const Error& e) {
                out.push_back({i, "parse-error", e.what()});
                continue;
            }
        }
        if (expr && d.mechanism == Mechanism::Update) {
            auto names = expr->free_names();
            if (names.count("target") && !names.count("source"))
                out.push_back({i, "reversed", "Update relationship reads only the target side; source and target look swapped"});
        }
        bool transforms = expr && !expr->is_access_chain();
        if (!transforms) {
            auto refers = [&](const PathResolution& ref, const PathResolution& other) {
                auto te = ref.target_entity();
                bool is_reference = ref.kind == ResolvedKind::Pntr || (ref.kind == ResolvedKind::Arry && ref.attribute && ref.attribute->is_entity_array());
                return is_reference && te && (other.entity == *te) &&
                       (other.kind == ResolvedKind::Entity || other.kind == ResolvedKind::EntityRoot);
            };
            if (refers(s, t) || refers(t, s))
                out.push_back({i, "redundant", "relationship restates the reference " +
                                                   (refers(s, t) ? d.source.str() : d.target.str()) + " declared in the schema"});
        }
        if (d.mechanism == Mechanism::Update && t.attribute) {
            auto addr = t.address();
            auto [it, fresh] = writers.emplace(addr, i);
            if (!fresh)
                out.push_back({i, "shared-target", "also written by dependency " + std::to_string(it->second) +
                                                       "; the later edge in list order wins"});
        }
    }
    return out;
}

}  // namespace taskui
