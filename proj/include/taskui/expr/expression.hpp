#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "taskui/core/path.hpp"
#include "taskui/core/value.hpp"

namespace taskui {

// Restricted relationship language. Grammar (lowest precedence first):
//
//   or      := and (("or" | "||") and)*
//   and     := not (("and" | "&&") not)*
//   not     := ("not" | "!") not | compare
//   compare := sum (("==" | "!=" | "<" | "<=" | ">" | ">=") sum)?
//   sum     := product (("+" | "-") product)*
//   product := unary (("*" | "/") unary)*
//   unary   := "-" unary | postfix
//   postfix := primary ("." ident | "[" "*" "]" | "[" or "]")*
//   primary := number | string | true | false | null | ident "(" args ")" | ident | "(" or ")"
//
// Functions: sum, avg, min, max, count, filter. count/filter take an optional
// predicate evaluated with `item` bound to each element. Ordering comparisons
// on text are only defined for ISO-8601 dates. An empty operand makes a
// comparison empty, and and/or/not treat empty as unknown.
enum class NodeKind { Literal, Name, Member, Index, Spread, Neg, Not, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct ExprNode {
    NodeKind kind = NodeKind::Literal;
    Value literal;
    std::string name;  // Name, Member field, Call function
    BinaryOp op = BinaryOp::Add;
    std::vector<std::shared_ptr<const ExprNode>> children;
    std::size_t position = 0;
};

class Expression {
public:
    // Throws Error("parse-error").
    static Expression parse(std::string_view source);

    const ExprNode& root() const { return *root_; }
    const std::string& source() const { return source_; }

    // Names read from the bindings (predicate-local `item` excluded).
    std::set<std::string> free_names() const;
    // Access chains rooted at a binding, e.g. source.menu[*].calories yields
    // {attr menu, all, attr calories}. Dynamic indices are reported as [*].
    std::vector<std::vector<PathStep>> access_chains(std::string_view binding) const;
    // True when the whole expression is a bare name/field/index chain.
    bool is_access_chain() const;

private:
    std::shared_ptr<const ExprNode> root_;
    std::string source_;
};

struct EvalBudget {
    std::size_t max_steps = 100000;
    std::size_t used = 0;
};

using Bindings = std::map<std::string, Value, std::less<>>;

// Looks up instance values when member access meets a Ref.
using ObjectLookup = std::function<const Value::Dict*(const ObjectId&)>;

// Errors: unbound-name, type-error, budget-exceeded (each distinct code).
Value evaluate(const Expression& expr, const Bindings& bindings, EvalBudget& budget,
               const ObjectLookup& lookup = {});

// Parses YYYY-MM-DD with optional Thh:mm[:ss[.fff]] and zone suffix.
bool parse_iso8601(std::string_view text, std::array<int, 6>& out);

}  // namespace taskui
