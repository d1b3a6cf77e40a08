#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taskui/core/schema.hpp"
#include "taskui/core/schema_ops.hpp"
#include "taskui/data/dataset.hpp"
#include "taskui/deps/dependency.hpp"
#include "taskui/expr/expression.hpp"

namespace taskui {

struct GraphEdge {
    std::size_t index = 0;  // position in the dependency list
    Dependency dep;
    std::optional<Expression> expr;
    std::set<std::string> reads;  // schema addresses, e.g. "DISH.calories"
    std::string writes;           // address of the target
};

struct DependencyGraph {
    std::vector<GraphEdge> edges;
    std::vector<std::size_t> order;                // Update edges, topological
    std::vector<std::vector<std::size_t>> levels;  // same edges grouped by depth

    bool empty() const { return edges.empty(); }
};

// Errors: unresolved-endpoint, cycle-detected (detail.cycle lists the paths),
// invalid-dependency, parse-error.
DependencyGraph build_graph(const Schema& schema, const std::vector<Dependency>& deps);

struct Violation {
    std::size_t dependency = 0;
    std::string kind;  // "violated" or "evaluation-failed"
    std::string message;
    std::string path;  // offending path
    ObjectId owner;
    Json attempted;

    Json to_json() const;
};

struct Write {
    Path path;
    Value value;
};

struct CheckResult {
    bool accepted = true;
    std::vector<Violation> violations;
};

struct ExecutionBudget {
    std::size_t max_expression_steps = 100000;
    std::size_t max_rounds = 8;
};

// Evaluates every Validate edge touching the write against the state after it.
CheckResult check_write(const DependencyGraph& graph, const Schema& schema, const DataSet& data, const Write& write,
                        const ExecutionBudget& budget = {});
// Same, for a hypothetical state already computed by the caller.
CheckResult check_state(const DependencyGraph& graph, const Schema& schema, const DataSet& before,
                        const DataSet& after, const std::vector<Path>& changed, const ExecutionBudget& budget = {});

struct NlRequest {
    std::size_t dependency = 0;
    Mechanism mechanism = Mechanism::Update;
    std::string relationship;
    std::string source;  // path text
    std::string target;
    ObjectId owner;
    Json source_value;   // value(s) at the source path for this owner
    Json target_value;
    Json owner_values;
};

// Returns the new target value (Update) or a bool (Validate). Throws on failure.
using NlExecutor = std::function<Value(const NlRequest&)>;

// Results of natural-language edges keyed by edge, owner and source value.
class NlCache {
public:
    std::optional<Value> find(const std::string& key) const;
    void put(const std::string& key, const Value& v);
    std::size_t size() const;
    static std::string key_for(const NlRequest& r);

private:
    mutable std::mutex mu_;
    std::map<std::string, Value> entries_;
};

struct PropagateResult {
    DataSet data;
    std::vector<Path> updated;
    std::vector<Violation> violations;
    std::vector<std::size_t> stale;  // edges whose executor or expression failed
    std::vector<std::size_t> fired;  // in firing order
    std::size_t rounds = 0;
};

// Errors: budget-exceeded (no result is produced, so the input stays as it was).
PropagateResult propagate(const DependencyGraph& graph, const Schema& schema, const DataSet& data,
                          const std::vector<Path>& changed, const ExecutionBudget& budget = {},
                          const NlExecutor& nl = {}, NlCache* cache = nullptr);

// Fires every Update edge once in order; used after bulk generation.
PropagateResult recompute_all(const DependencyGraph& graph, const Schema& schema, const DataSet& data,
                              const ExecutionBudget& budget = {}, const NlExecutor& nl = {}, NlCache* cache = nullptr);

struct LintFinding {
    std::size_t dependency = 0;
    std::string rule;  // reversed, redundant, shared-target, unresolved-endpoint, parse-error
    std::string message;

    Json to_json() const;
};

std::vector<LintFinding> lint_dependencies(const Schema& schema, const std::vector<Dependency>& deps);

// Addresses overlap when equal or when one is a dotted prefix of the other.
bool addresses_overlap(std::string_view a, std::string_view b);
// Schema address a concrete data path touches.
std::string address_of(const Schema& schema, const Path& path);

}  // namespace taskui
