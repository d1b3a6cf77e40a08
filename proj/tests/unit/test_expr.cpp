#include <gtest/gtest.h>

#include <random>

#include "taskui/core/error.hpp"
#include "taskui/expr/expression.hpp"

using namespace taskui;

namespace {

Value eval(const std::string& src, const Bindings& b = {}, std::size_t steps = 100000) {
    EvalBudget budget{steps, 0};
    return evaluate(Expression::parse(src), b, budget);
}

std::string error_code(const std::string& src, const Bindings& b = {}, std::size_t steps = 100000) {
    try {
        (void)eval(src, b, steps);
    } catch (const Error& e) {
        return e.code();
    }
    return "ok";
}

Value menu_source(const std::vector<double>& calories) {
    Value::List menu;
    for (double c : calories) menu.push_back(Value(Value::Dict{{"calories", Value(c)}, {"name", Value("dish")}}));
    return Value(Value::Dict{{"menu", Value(menu)}, {"date", Value("2025-06-14")}});
}

}  // namespace

TEST(Expr, SumOverMenu) {
    auto v = eval("sum(source.menu[*].calories)", {{"source", menu_source({650, 800, 650})}});
    ASSERT_TRUE(v.is_number());
    EXPECT_DOUBLE_EQ(v.as_number(), 2100);
}

TEST(Expr, AggregatesMatchBruteForce) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> xs(1 + rng() % 8);
        for (auto& x : xs) x = static_cast<double>(rng() % 2000);
        Bindings b{{"source", menu_source(xs)}};
        double s = 0, lo = xs[0], hi = xs[0];
        int big = 0;
        for (double x : xs) {
            s += x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            big += x > 700;
        }
        EXPECT_DOUBLE_EQ(eval("sum(source.menu[*].calories)", b).as_number(), s);
        EXPECT_DOUBLE_EQ(eval("avg(source.menu[*].calories)", b).as_number(), s / static_cast<double>(xs.size()));
        EXPECT_DOUBLE_EQ(eval("min(source.menu[*].calories)", b).as_number(), lo);
        EXPECT_DOUBLE_EQ(eval("max(source.menu[*].calories)", b).as_number(), hi);
        EXPECT_DOUBLE_EQ(eval("count(source.menu[*])", b).as_number(), static_cast<double>(xs.size()));
        EXPECT_DOUBLE_EQ(eval("count(source.menu, item.calories > 700)", b).as_number(), big);
        EXPECT_EQ(eval("len(filter(source.menu, item.calories > 700))", b).as_number(), big);
    }
}

TEST(Expr, EmptyAggregates) {
    Bindings b{{"source", menu_source({})}};
    EXPECT_DOUBLE_EQ(eval("sum(source.menu[*].calories)", b).as_number(), 0);
    EXPECT_DOUBLE_EQ(eval("count(source.menu)", b).as_number(), 0);
    EXPECT_TRUE(eval("max(source.menu[*].calories)", b).is_empty());
}

TEST(Expr, DateComparison) {
    Bindings b{{"source", Value(Value::Dict{{"start", Value("2025-06-14")}})},
               {"target", Value(Value::Dict{{"end", Value("2025-06-13")}})}};
    EXPECT_EQ(eval("target.end >= source.start", b), Value(false));
    EXPECT_EQ(eval("target.end < source.start", b), Value(true));
    EXPECT_EQ(eval("\"2025-06-14T10:00\" > \"2025-06-14\"", b), Value(true));
    EXPECT_EQ(error_code("\"apple\" < \"banana\""), "type-error");
}

TEST(Expr, ArithmeticAndLogic) {
    EXPECT_EQ(eval("1 + 2 * 3"), Value(7));
    EXPECT_EQ(eval("(1 + 2) * 3"), Value(9));
    EXPECT_EQ(eval("10 / 4"), Value(2.5));
    EXPECT_EQ(eval("-3 + 1"), Value(-2));
    EXPECT_EQ(eval("1 < 2 and not (3 < 2)"), Value(true));
    EXPECT_EQ(eval("false or 2 == 2"), Value(true));
    EXPECT_EQ(eval("\"a\" + \"b\""), Value("ab"));
    EXPECT_EQ(eval("if(1 > 2, \"x\", \"y\")"), Value("y"));
    EXPECT_EQ(eval("lower(\"ABC\")"), Value("abc"));
    EXPECT_EQ(eval("round(2.567, 1)"), Value(2.6));
    EXPECT_EQ(eval("contains(\"vegetarian pizza\", \"veg\")"), Value(true));
}

TEST(Expr, EmptyIsUnknown) {
    Bindings b{{"target", Value(Value::Dict{{"end", Value()}})}};
    EXPECT_TRUE(eval("target.end > \"2025-06-14\"", b).is_empty());
    EXPECT_EQ(eval("target.end > \"2025-06-14\" or true", b), Value(true));
    EXPECT_EQ(eval("target.end > \"2025-06-14\" and false", b), Value(false));
    EXPECT_TRUE(eval("not (target.end > 1)", b).is_empty());
}

TEST(Expr, DistinctErrors) {
    EXPECT_EQ(error_code("sum(source.menu[*].calories"), "parse-error");
    EXPECT_EQ(error_code("import os"), "parse-error");
    EXPECT_EQ(error_code("frobnicate(1)"), "parse-error");
    EXPECT_EQ(error_code("source.menu"), "unbound-name");
    EXPECT_EQ(error_code("1 + true"), "type-error");
    EXPECT_EQ(error_code("1 / 0"), "type-error");
    EXPECT_EQ(error_code("sum(source.menu[*].calories)", {{"source", menu_source({1, 2, 3, 4, 5})}}, 5),
              "budget-exceeded");
}

TEST(Expr, BudgetNeverExceeded) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> xs(rng() % 40);
        for (auto& x : xs) x = static_cast<double>(rng() % 100);
        Bindings b{{"source", menu_source(xs)}};
        std::size_t cap = 1 + rng() % 120;
        EvalBudget budget{cap, 0};
        try {
            (void)evaluate(Expression::parse("sum(filter(source.menu, item.calories > 10)[*].calories) + 1"), b,
                           budget);
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), "budget-exceeded");
        }
        EXPECT_LE(budget.used, cap);
    }
}

TEST(Expr, AccessChains) {
    auto e = Expression::parse("sum(source.menu[*].calories) <= target.limit");
    EXPECT_EQ(e.free_names(), (std::set<std::string>{"source", "target"}));
    auto chains = e.access_chains("source");
    ASSERT_EQ(chains.size(), 1u);
    EXPECT_EQ(chains[0], (std::vector<PathStep>{PathStep::attr("menu"), PathStep::all(), PathStep::attr("calories")}));
    auto f = Expression::parse("count(source.menu, item.calories > 700)");
    auto fc = f.access_chains("source");
    EXPECT_NE(std::find(fc.begin(), fc.end(),
                        std::vector<PathStep>{PathStep::attr("menu"), PathStep::all(), PathStep::attr("calories")}),
              fc.end());
    EXPECT_TRUE(Expression::parse("source.menu").is_access_chain());
    EXPECT_FALSE(Expression::parse("source.menu + 1").is_access_chain());
}

TEST(Expr, Iso8601) {
    std::array<int, 6> t{};
    EXPECT_TRUE(parse_iso8601("2025-06-14", t));
    EXPECT_TRUE(parse_iso8601("2025-06-14T18:30:00Z", t));
    EXPECT_EQ(t[3], 18);
    EXPECT_FALSE(parse_iso8601("June 14", t));
    EXPECT_FALSE(parse_iso8601("2025-13-01", t));
}
