#include "taskui/expr/expression.hpp"

#include <cctype>
#include <cmath>
#include <optional>

namespace taskui {

namespace {

enum class Tok { Number, String, Ident, Op, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0;
    std::size_t pos = 0;
};

[[noreturn]] void parse_fail(std::size_t pos, const std::string& what, std::string_view src) {
    throw Error("parse-error", what + " at offset " + std::to_string(pos),
                {{"offset", pos}, {"source", std::string(src)}});
}

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        Token t;
        t.pos = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            std::size_t j = i;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                    j = k;
                    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                }
            }
            t.kind = Tok::Number;
            t.text = std::string(s.substr(i, j - i));
            try {
                std::size_t used = 0;
                t.number = std::stod(t.text, &used);
                if (used != t.text.size()) parse_fail(i, "malformed number '" + t.text + "'", s);
            } catch (const std::logic_error&) {
                parse_fail(i, "malformed number '" + t.text + "'", s);
            }
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            t.kind = Tok::Ident;
            t.text = std::string(s.substr(i, j - i));
            i = j;
        } else if (c == '"' || c == '\'') {
            std::size_t j = i + 1;
            std::string text;
            while (j < s.size() && s[j] != c) {
                if (s[j] == '\\' && j + 1 < s.size()) {
                    char e = s[++j];
                    text += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                } else {
                    text += s[j];
                }
                ++j;
            }
            if (j >= s.size()) parse_fail(i, "unterminated string", s);
            t.kind = Tok::String;
            t.text = std::move(text);
            i = j + 1;
        } else {
            static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||"};
            t.kind = Tok::Op;
            for (const char* op : two)
                if (s.substr(i, 2) == op) t.text = op;
            if (t.text.empty()) {
                if (std::string_view("+-*/<>!().[],").find(c) == std::string_view::npos)
                    parse_fail(i, std::string("unexpected character '") + c + "'", s);
                t.text = std::string(1, c);
            }
            i += t.text.size();
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.pos = s.size();
    out.push_back(end);
    return out;
}

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(NodeKind kind, std::size_t pos, std::vector<NodePtr> children = {}) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->position = pos;
    n->children = std::move(children);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src), toks_(tokenize(src)) {}

    NodePtr parse_all() {
        auto n = parse_or();
        if (peek().kind != Tok::End) parse_fail(peek().pos, "unexpected '" + peek().text + "'", src_);
        return n;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    bool is_op(const char* op) const { return peek().kind == Tok::Op && peek().text == op; }
    bool is_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }
    void expect(const char* op) {
        if (!is_op(op)) parse_fail(peek().pos, std::string("expected '") + op + "'", src_);
        ++i_;
    }

    NodePtr binary(BinaryOp op, std::size_t pos, NodePtr l, NodePtr r) {
        auto n = std::make_shared<ExprNode>();
        n->kind = NodeKind::Binary;
        n->op = op;
        n->position = pos;
        n->children = {std::move(l), std::move(r)};
        return n;
    }

    NodePtr parse_or() {
        auto l = parse_and();
        while (is_word("or") || is_op("||")) {
            auto pos = toks_[i_++].pos;
            l = binary(BinaryOp::Or, pos, l, parse_and());
        }
        return l;
    }
    NodePtr parse_and() {
        auto l = parse_not();
        while (is_word("and") || is_op("&&")) {
            auto pos = toks_[i_++].pos;
            l = binary(BinaryOp::And, pos, l, parse_not());
        }
        return l;
    }
    NodePtr parse_not() {
        if (is_word("not") || is_op("!")) {
            auto pos = toks_[i_++].pos;
            return make(NodeKind::Not, pos, {parse_not()});
        }
        return parse_compare();
    }
    NodePtr parse_compare() {
        auto l = parse_sum();
        static const std::pair<const char*, BinaryOp> ops[] = {{"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne},
                                                              {"<=", BinaryOp::Le}, {">=", BinaryOp::Ge},
                                                              {"<", BinaryOp::Lt},  {">", BinaryOp::Gt}};
        for (const auto& [text, op] : ops) {
            if (is_op(text)) {
                auto pos = toks_[i_++].pos;
                return binary(op, pos, l, parse_sum());
            }
        }
        return l;
    }
    NodePtr parse_sum() {
        auto l = parse_product();
        while (is_op("+") || is_op("-")) {
            bool add = peek().text == "+";
            auto pos = toks_[i_++].pos;
            l = binary(add ? BinaryOp::Add : BinaryOp::Sub, pos, l, parse_product());
        }
        return l;
    }
    NodePtr parse_product() {
        auto l = parse_unary();
        while (is_op("*") || is_op("/")) {
            bool mul = peek().text == "*";
            auto pos = toks_[i_++].pos;
            l = binary(mul ? BinaryOp::Mul : BinaryOp::Div, pos, l, parse_unary());
        }
        return l;
    }
    NodePtr parse_unary() {
        if (is_op("-")) {
            auto pos = toks_[i_++].pos;
            return make(NodeKind::Neg, pos, {parse_unary()});
        }
        return parse_postfix();
    }
    NodePtr parse_postfix() {
        auto n = parse_primary();
        for (;;) {
            if (is_op(".")) {
                auto pos = toks_[i_++].pos;
                if (peek().kind != Tok::Ident) parse_fail(peek().pos, "expected field name after '.'", src_);
                auto m = std::make_shared<ExprNode>();
                m->kind = NodeKind::Member;
                m->position = pos;
                m->name = toks_[i_++].text;
                m->children = {n};
                n = m;
            } else if (is_op("[")) {
                auto pos = toks_[i_++].pos;
                if (is_op("*")) {
                    ++i_;
                    expect("]");
                    n = make(NodeKind::Spread, pos, {n});
                } else {
                    auto idx = parse_or();
                    expect("]");
                    n = make(NodeKind::Index, pos, {n, idx});
                }
            } else {
                return n;
            }
        }
    }
    NodePtr parse_primary() {
        const Token& t = peek();
        auto lit = [&](Value v) {
            auto n = std::make_shared<ExprNode>();
            n->kind = NodeKind::Literal;
            n->literal = std::move(v);
            n->position = t.pos;
            ++i_;
            return n;
        };
        switch (t.kind) {
            case Tok::Number: return lit(Value(t.number));
            case Tok::String: return lit(Value(t.text));
            case Tok::Ident: {
                if (t.text == "true") return lit(Value(true));
                if (t.text == "false") return lit(Value(false));
                if (t.text == "null") return lit(Value());
                if (t.text == "and" || t.text == "or" || t.text == "not")
                    parse_fail(t.pos, "unexpected keyword '" + t.text + "'", src_);
                auto n = std::make_shared<ExprNode>();
                n->name = t.text;
                n->position = t.pos;
                ++i_;
                if (is_op("(")) {
                    ++i_;
                    n->kind = NodeKind::Call;
                    if (!is_op(")")) {
                        n->children.push_back(parse_or());
                        while (is_op(",")) {
                            ++i_;
                            n->children.push_back(parse_or());
                        }
                    }
                    expect(")");
                } else {
                    n->kind = NodeKind::Name;
                }
                return n;
            }
            case Tok::Op:
                if (t.text == "(") {
                    ++i_;
                    auto n = parse_or();
                    expect(")");
                    return n;
                }
                parse_fail(t.pos, "unexpected '" + t.text + "'", src_);
            case Tok::End: parse_fail(t.pos, "unexpected end of expression", src_);
        }
        parse_fail(t.pos, "unexpected token", src_);
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

const std::set<std::string, std::less<>> kPredicateFunctions = {"count", "filter", "any", "all"};
const std::set<std::string, std::less<>> kFunctions = {"sum", "avg", "min", "max", "count", "filter",
                                                      "any", "all", "if", "contains", "len", "lower", "round"};

void check_calls(const ExprNode& n, std::string_view src) {
    if (n.kind == NodeKind::Call) {
        if (!kFunctions.count(n.name)) parse_fail(n.position, "unknown function '" + n.name + "'", src);
        auto argc = n.children.size();
        bool ok = true;
        if (n.name == "if") ok = argc == 3;
        else if (n.name == "contains") ok = argc == 2;
        else if (kPredicateFunctions.count(n.name)) ok = argc == 1 || argc == 2;
        else if (n.name == "round") ok = argc == 1 || argc == 2;
        else ok = argc == 1;
        if (!ok) parse_fail(n.position, "wrong number of arguments to '" + n.name + "'", src);
    }
    for (const auto& c : n.children) check_calls(*c, src);
}

// A chain: the bound root name plus field / selector steps.
struct Chain {
    std::string root;
    std::vector<PathStep> steps;
};

std::optional<Chain> chain_of(const ExprNode& n) {
    switch (n.kind) {
        case NodeKind::Name: return Chain{n.name, {}};
        case NodeKind::Member: {
            auto c = chain_of(*n.children[0]);
            if (c) c->steps.push_back(PathStep::attr(n.name));
            return c;
        }
        case NodeKind::Spread: {
            auto c = chain_of(*n.children[0]);
            if (c) c->steps.push_back(PathStep::all());
            return c;
        }
        case NodeKind::Index: {
            auto c = chain_of(*n.children[0]);
            if (!c) return c;
            const auto& idx = *n.children[1];
            if (idx.kind == NodeKind::Literal && idx.literal.is_number() && idx.literal.as_number() >= 0 &&
                std::floor(idx.literal.as_number()) == idx.literal.as_number())
                c->steps.push_back(PathStep::at(static_cast<std::size_t>(idx.literal.as_number())));
            else if (idx.kind == NodeKind::Literal && idx.literal.is_text())
                c->steps.push_back(PathStep::attr(idx.literal.as_text()));
            else
                c->steps.push_back(PathStep::all());
            return c;
        }
        default: return std::nullopt;
    }
}

// Collects chains rooted at `binding`. `item_prefix` is the chain the local
// `item` stands for inside a predicate (unset when it is not derived from the binding).
void collect_chains(const ExprNode& n, std::string_view binding, const std::optional<std::vector<PathStep>>& item_prefix,
                    bool item_local, std::vector<std::vector<PathStep>>& out) {
    if (auto c = chain_of(n)) {
        if (item_local && c->root == "item") {
            if (item_prefix) {
                auto steps = *item_prefix;
                steps.insert(steps.end(), c->steps.begin(), c->steps.end());
                out.push_back(std::move(steps));
            }
        } else if (c->root == binding) {
            out.push_back(c->steps);
        }
        // Dynamic index expressions may themselves read bindings.
        const ExprNode* cur = &n;
        while (cur->kind != NodeKind::Name) {
            if (cur->kind == NodeKind::Index) collect_chains(*cur->children[1], binding, item_prefix, item_local, out);
            cur = cur->children[0].get();
        }
        return;
    }
    if (n.kind == NodeKind::Call && kPredicateFunctions.count(n.name) && n.children.size() == 2) {
        collect_chains(*n.children[0], binding, item_prefix, item_local, out);
        std::optional<std::vector<PathStep>> prefix;
        if (auto c = chain_of(*n.children[0])) {
            if (item_local && c->root == "item" && item_prefix) {
                prefix = *item_prefix;
                prefix->insert(prefix->end(), c->steps.begin(), c->steps.end());
            } else if (c->root == binding && !(item_local && c->root == "item")) {
                prefix = c->steps;
            }
            if (prefix) prefix->push_back(PathStep::all());
        }
        collect_chains(*n.children[1], binding, prefix, true, out);
        return;
    }
    for (const auto& ch : n.children) collect_chains(*ch, binding, item_prefix, item_local, out);
}

void collect_names(const ExprNode& n, bool item_local, std::set<std::string>& out) {
    if (n.kind == NodeKind::Name) {
        if (!(item_local && n.name == "item")) out.insert(n.name);
        return;
    }
    if (n.kind == NodeKind::Call && kPredicateFunctions.count(n.name) && n.children.size() == 2) {
        collect_names(*n.children[0], item_local, out);
        collect_names(*n.children[1], true, out);
        return;
    }
    for (const auto& c : n.children) collect_names(*c, item_local, out);
}

// --- evaluation ---

struct Env {
    const Bindings& bindings;
    const Value* item = nullptr;
    EvalBudget& budget;
    const ObjectLookup& lookup;
};

[[noreturn]] void type_error(const ExprNode& n, const std::string& what) {
    throw Error("type-error", what + " at offset " + std::to_string(n.position), {{"offset", n.position}});
}

bool truthy(const ExprNode& n, const Value& v) {
    if (v.is_empty()) return false;
    if (v.is_bool()) return v.as_bool();
    type_error(n, "expected a boolean, got " + v.type_name());
}

void charge(const Env& env) {
    if (env.budget.used >= env.budget.max_steps)
        throw Error("budget-exceeded", "evaluation exceeded " + std::to_string(env.budget.max_steps) + " steps");
    ++env.budget.used;
}

Value member(const ExprNode& n, const Value& base, const std::string& field, const Env& env) {
    if (base.is_empty()) return Value();
    if (base.is_list()) {
        Value::List out;
        for (const auto& e : base.as_list()) {
            charge(env);
            Value v = member(n, e, field, env);
            if (v.is_list()) {
                const auto& inner = v.as_list();
                out.insert(out.end(), inner.begin(), inner.end());
            } else {
                out.push_back(std::move(v));
            }
        }
        return Value(std::move(out));
    }
    if (base.is_ref()) {
        if (base.as_ref().is_null()) return Value();
        const Value::Dict* d = env.lookup ? env.lookup(base.as_ref().id) : nullptr;
        if (!d) type_error(n, "dangling reference '" + base.as_ref().id + "'");
        auto it = d->find(field);
        if (it == d->end()) type_error(n, "no field '" + field + "' on " + base.as_ref().id);
        return it->second;
    }
    if (base.is_dict()) {
        const Value* v = base.find(field);
        if (!v) type_error(n, "no field '" + field + "'");
        return *v;
    }
    type_error(n, "cannot read '" + field + "' of " + base.type_name());
}

std::optional<std::array<int, 6>> as_date(const Value& v) {
    std::array<int, 6> d{};
    if (v.is_text() && parse_iso8601(v.as_text(), d)) return d;
    return std::nullopt;
}

std::vector<double> numbers_of(const ExprNode& n, const Value& v) {
    if (!v.is_list()) type_error(n, n.name + " expects a list, got " + v.type_name());
    std::vector<double> out;
    for (const auto& e : v.as_list()) {
        if (e.is_empty()) continue;
        if (!e.is_number()) type_error(n, n.name + " expects numbers, got " + e.type_name());
        out.push_back(e.as_number());
    }
    return out;
}

Value eval(const ExprNode& n, const Env& env);

Value call(const ExprNode& n, const Env& env) {
    const auto& f = n.name;
    if (f == "if") return truthy(n, eval(*n.children[0], env)) ? eval(*n.children[1], env) : eval(*n.children[2], env);

    Value a = eval(*n.children[0], env);
    if (kPredicateFunctions.count(f)) {
        if (a.is_empty()) a = Value(Value::List{});
        if (!a.is_list()) type_error(n, f + " expects a list, got " + a.type_name());
        Value::List kept;
        for (const auto& e : a.as_list()) {
            bool keep = !e.is_empty();
            if (n.children.size() == 2) {
                Env inner{env.bindings, &e, env.budget, env.lookup};
                keep = truthy(*n.children[1], eval(*n.children[1], inner));
            } else if (f == "any" || f == "all") {
                keep = truthy(n, e);
            }
            if (keep) kept.push_back(e);
        }
        if (f == "count") return Value(static_cast<double>(kept.size()));
        if (f == "any") return Value(!kept.empty());
        if (f == "all") return Value(kept.size() == a.as_list().size());
        return Value(std::move(kept));
    }
    if (f == "contains") {
        Value b = eval(*n.children[1], env);
        if (a.is_empty()) return Value(false);
        if (a.is_list()) {
            for (const auto& e : a.as_list())
                if (e == b) return Value(true);
            return Value(false);
        }
        if (a.is_text() && b.is_text()) return Value(a.as_text().find(b.as_text()) != std::string::npos);
        type_error(n, "contains expects a list or text");
    }
    if (f == "len") {
        if (a.is_empty()) return Value(0.0);
        if (a.is_list()) return Value(static_cast<double>(a.as_list().size()));
        if (a.is_text()) return Value(static_cast<double>(a.as_text().size()));
        type_error(n, "len expects a list or text");
    }
    if (f == "lower") {
        if (a.is_empty()) return a;
        if (!a.is_text()) type_error(n, "lower expects text");
        std::string s = a.as_text();
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return Value(s);
    }
    if (f == "round") {
        if (a.is_empty()) return a;
        if (!a.is_number()) type_error(n, "round expects a number");
        double digits = 0;
        if (n.children.size() == 2) {
            Value d = eval(*n.children[1], env);
            if (!d.is_number()) type_error(n, "round digits must be a number");
            digits = d.as_number();
        }
        double scale = std::pow(10.0, digits);
        return Value(std::round(a.as_number() * scale) / scale);
    }
    if (a.is_empty()) a = Value(Value::List{});
    auto xs = numbers_of(n, a);
    if (f == "sum") {
        double s = 0;
        for (double x : xs) s += x;
        return Value(s);
    }
    if (xs.empty()) return Value();
    if (f == "avg") {
        double s = 0;
        for (double x : xs) s += x;
        return Value(s / static_cast<double>(xs.size()));
    }
    double best = xs[0];
    for (double x : xs) best = f == "min" ? std::min(best, x) : std::max(best, x);
    return Value(best);
}

Value arith(const ExprNode& n, BinaryOp op, const Value& l, const Value& r) {
    if (op == BinaryOp::Add && (l.is_text() || r.is_text()) && !l.is_list() && !r.is_list())
        return Value(to_display(l) + to_display(r));
    if (l.is_empty() || r.is_empty()) return Value();
    if (!l.is_number() || !r.is_number())
        type_error(n, "arithmetic on " + l.type_name() + " and " + r.type_name());
    double a = l.as_number(), b = r.as_number();
    switch (op) {
        case BinaryOp::Add: return Value(a + b);
        case BinaryOp::Sub: return Value(a - b);
        case BinaryOp::Mul: return Value(a * b);
        default:
            if (b == 0) type_error(n, "division by zero");
            return Value(a / b);
    }
}

Value compare(const ExprNode& n, BinaryOp op, const Value& l, const Value& r) {
    if (op == BinaryOp::Eq) return Value(l == r);
    if (op == BinaryOp::Ne) return Value(l != r);
    if (l.is_empty() || r.is_empty()) return Value();
    int c = 0;
    if (l.is_number() && r.is_number()) {
        c = l.as_number() < r.as_number() ? -1 : l.as_number() > r.as_number() ? 1 : 0;
    } else {
        auto dl = as_date(l), dr = as_date(r);
        if (!dl || !dr) type_error(n, "cannot order " + l.type_name() + " and " + r.type_name());
        c = *dl < *dr ? -1 : *dl > *dr ? 1 : 0;
    }
    switch (op) {
        case BinaryOp::Lt: return Value(c < 0);
        case BinaryOp::Le: return Value(c <= 0);
        case BinaryOp::Gt: return Value(c > 0);
        default: return Value(c >= 0);
    }
}

Value eval(const ExprNode& n, const Env& env) {
    charge(env);
    switch (n.kind) {
        case NodeKind::Literal: return n.literal;
        case NodeKind::Name: {
            if (n.name == "item" && env.item) return *env.item;
            auto it = env.bindings.find(n.name);
            if (it == env.bindings.end())
                throw Error("unbound-name", "unbound name '" + n.name + "'", {{"name", n.name}});
            return it->second;
        }
        case NodeKind::Member: return member(n, eval(*n.children[0], env), n.name, env);
        case NodeKind::Spread: {
            Value v = eval(*n.children[0], env);
            if (v.is_empty()) return Value(Value::List{});
            if (!v.is_list()) type_error(n, "[*] on " + v.type_name());
            return v;
        }
        case NodeKind::Index: {
            Value base = eval(*n.children[0], env);
            Value idx = eval(*n.children[1], env);
            if (base.is_empty()) return base;
            if (base.is_list() && idx.is_number()) {
                double d = idx.as_number();
                const auto& l = base.as_list();
                if (d < 0 || std::floor(d) != d || d >= static_cast<double>(l.size())) return Value();
                return l[static_cast<std::size_t>(d)];
            }
            if (idx.is_text()) return member(n, base, idx.as_text(), env);
            type_error(n, "cannot index " + base.type_name() + " with " + idx.type_name());
        }
        case NodeKind::Neg: {
            Value v = eval(*n.children[0], env);
            if (v.is_empty()) return v;
            if (!v.is_number()) type_error(n, "negating " + v.type_name());
            return Value(-v.as_number());
        }
        case NodeKind::Not: {
            Value v = eval(*n.children[0], env);
            if (v.is_empty()) return v;
            return Value(!truthy(n, v));
        }
        case NodeKind::Binary: {
            // Kleene logic: empty is unknown.
            if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
                const bool dominant = n.op == BinaryOp::Or;
                Value l = eval(*n.children[0], env);
                if (!l.is_empty() && truthy(*n.children[0], l) == dominant) return Value(dominant);
                Value r = eval(*n.children[1], env);
                if (!r.is_empty() && truthy(*n.children[1], r) == dominant) return Value(dominant);
                if (l.is_empty() || r.is_empty()) return Value();
                return Value(!dominant);
            }
            Value l = eval(*n.children[0], env);
            Value r = eval(*n.children[1], env);
            switch (n.op) {
                case BinaryOp::Add: case BinaryOp::Sub: case BinaryOp::Mul: case BinaryOp::Div:
                    return arith(n, n.op, l, r);
                default: return compare(n, n.op, l, r);
            }
        }
        case NodeKind::Call: return call(n, env);
    }
    type_error(n, "bad node");
}

bool digits(std::string_view s, std::size_t at, std::size_t count, int& out) {
    if (at + count > s.size()) return false;
    out = 0;
    for (std::size_t i = at; i < at + count; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        out = out * 10 + (s[i] - '0');
    }
    return true;
}

}  // namespace

Expression Expression::parse(std::string_view source) {
    Expression e;
    e.source_ = std::string(source);
    Parser p(e.source_);
    e.root_ = p.parse_all();
    check_calls(*e.root_, e.source_);
    return e;
}

std::set<std::string> Expression::free_names() const {
    std::set<std::string> out;
    collect_names(*root_, false, out);
    return out;
}

std::vector<std::vector<PathStep>> Expression::access_chains(std::string_view binding) const {
    std::vector<std::vector<PathStep>> out;
    collect_chains(*root_, binding, std::nullopt, false, out);
    return out;
}

bool Expression::is_access_chain() const { return chain_of(*root_).has_value(); }

Value evaluate(const Expression& expr, const Bindings& bindings, EvalBudget& budget, const ObjectLookup& lookup) {
    Env env{bindings, nullptr, budget, lookup};
    return eval(expr.root(), env);
}

bool parse_iso8601(std::string_view s, std::array<int, 6>& out) {
    out = {0, 0, 0, 0, 0, 0};
    if (!digits(s, 0, 4, out[0]) || s.size() < 10 || s[4] != '-' || !digits(s, 5, 2, out[1]) || s[7] != '-' ||
        !digits(s, 8, 2, out[2]))
        return false;
    if (out[1] < 1 || out[1] > 12 || out[2] < 1 || out[2] > 31) return false;
    std::size_t i = 10;
    if (i == s.size()) return true;
    if (s[i] != 'T' && s[i] != ' ') return false;
    if (!digits(s, i + 1, 2, out[3]) || i + 3 >= s.size() || s[i + 3] != ':' || !digits(s, i + 4, 2, out[4]))
        return false;
    if (out[3] > 23 || out[4] > 59) return false;
    i += 6;
    if (i < s.size() && s[i] == ':') {
        if (!digits(s, i + 1, 2, out[5]) || out[5] > 60) return false;
        i += 3;
        if (i < s.size() && s[i] == '.') {
            ++i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
    }
    if (i == s.size()) return true;
    if (s[i] == 'Z') return i + 1 == s.size();
    int hh = 0, mm = 0;
    if ((s[i] == '+' || s[i] == '-') && digits(s, i + 1, 2, hh) && i + 3 < s.size() && s[i + 3] == ':' &&
        digits(s, i + 4, 2, mm))
        return i + 6 == s.size();
    return false;
}

}  // namespace taskui
