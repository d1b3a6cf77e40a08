#include <gtest/gtest.h>

#include <atomic>
#include <random>

#include "support.hpp"
#include "taskui/core/schema_ops.hpp"
#include "taskui/deps/engine.hpp"

using namespace taskui;
using namespace taskui::test;

namespace {

Dependency dep(const std::string& s, const std::string& t, Mechanism m, const std::string& code) {
    return {Path::parse(s), Path::parse(t), m, Relationship::of_code(code)};
}

std::string code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "ok";
}

Schema with_total(Schema s) {
    s.entities["DINNER_PLAN"].attributes.push_back(AttributeDef::number("total_calories"));
    return s;
}

Schema hotel_schema() {
    Schema s;
    s.root = "HOTEL_BOOKING";
    s.entities["HOTEL_BOOKING"].attributes = {AttributeDef::text("id"), AttributeDef::text("guest"),
                                              AttributeDef::text("checkin_date"), AttributeDef::text("checkout_date")};
    return s;
}

DataSet hotel_data(const Schema& s) {
    return dataset_from_json(s, Json::parse(R"({"root": "HOTEL_BOOKING-1", "instances": {"HOTEL_BOOKING-1":
        {"entity": "HOTEL_BOOKING", "values": {"id": "HOTEL_BOOKING-1", "guest": "Ana",
         "checkin_date": "2025-01-02", "checkout_date": "2025-01-05"}}}})"));
}

// MEAL.total <- DISH.calories <- INGREDIENT.calories <- grams * kcal_per_gram
Schema meal_schema() {
    Schema s;
    s.root = "MEAL";
    s.entities["MEAL"].attributes = {AttributeDef::text("id"),
                                     AttributeDef::array_of("dishes", ItemSpec{AttrKind::Pntr, std::nullopt, "DISH"}),
                                     AttributeDef::number("total")};
    s.entities["DISH"].attributes = {AttributeDef::text("id"), AttributeDef::text("name"),
                                     AttributeDef::array_of("items", ItemSpec{AttrKind::Pntr, std::nullopt, "INGREDIENT"}),
                                     AttributeDef::number("calories")};
    s.entities["INGREDIENT"].attributes = {AttributeDef::text("id"), AttributeDef::number("grams"),
                                           AttributeDef::number("kcal_per_gram"), AttributeDef::number("calories")};
    return s;
}

std::vector<Dependency> meal_deps() {
    return {dep("DISH.items", "DISH.calories", Mechanism::Update, "sum(source.items[*].calories)"),
            dep("MEAL.dishes", "MEAL.total", Mechanism::Update, "sum(source.dishes[*].calories)"),
            dep("INGREDIENT.grams", "INGREDIENT.calories", Mechanism::Update, "source.grams * source.kcal_per_gram")};
}

struct MealOracle {
    std::vector<std::pair<double, double>> ingredients;  // grams, kcal
    std::vector<std::vector<int>> dishes;

    double total() const {
        double t = 0;
        for (const auto& d : dishes)
            for (int i : d) t += ingredients[static_cast<std::size_t>(i)].first * ingredients[static_cast<std::size_t>(i)].second;
        return t;
    }
};

DataSet meal_data(const Schema& s, const MealOracle& o) {
    Json inst = Json::object();
    Json dish_ids = Json::array();
    for (std::size_t i = 0; i < o.ingredients.size(); ++i) {
        std::string id = "INGREDIENT-" + std::to_string(i + 1);
        inst[id] = {{"entity", "INGREDIENT"},
                    {"values", {{"id", id}, {"grams", o.ingredients[i].first}, {"kcal_per_gram", o.ingredients[i].second},
                                {"calories", 0}}}};
    }
    for (std::size_t d = 0; d < o.dishes.size(); ++d) {
        std::string id = "DISH-" + std::to_string(d + 1);
        Json items = Json::array();
        for (int i : o.dishes[d]) items.push_back("INGREDIENT-" + std::to_string(i + 1));
        inst[id] = {{"entity", "DISH"}, {"values", {{"id", id}, {"name", id}, {"items", items}, {"calories", 0}}}};
        dish_ids.push_back(id);
    }
    inst["MEAL-1"] = {{"entity", "MEAL"}, {"values", {{"id", "MEAL-1"}, {"dishes", dish_ids}, {"total", 0}}}};
    return dataset_from_json(s, {{"root", "MEAL-1"}, {"instances", inst}});
}

double number_at(const Schema& s, const DataSet& d, const std::string& path) {
    auto vs = get(s, d, Path::parse(path));
    return vs.at(0).as_number();
}

}  // namespace

TEST(BuildGraph, Examples) {
    auto s = with_total(dinner_spec().schema);
    auto g = build_graph(s, {dep("DINNER_PLAN.menu", "DINNER_PLAN.total_calories", Mechanism::Update,
                                "sum(source.menu[*].calories)")});
    ASSERT_EQ(g.edges.size(), 1u);
    EXPECT_EQ(g.order, std::vector<std::size_t>{0});
    EXPECT_TRUE(g.edges[0].reads.count("DISH.calories"));
    EXPECT_TRUE(build_graph(s, {}).empty());
    try {
        (void)build_graph(s, {dep("DINNER_PLAN.location", "DINNER_PLAN.date", Mechanism::Update, "source.location"),
                              dep("DINNER_PLAN.date", "DINNER_PLAN.location", Mechanism::Update, "source.date")});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "cycle-detected");
        EXPECT_EQ(e.detail()["cycle"].size(), 2u);
    }
    EXPECT_EQ(code_of([&] {
                  (void)build_graph(s, {dep("DINNER_PLAN.budget", "DINNER_PLAN.date", Mechanism::Update, "1")});
              }),
              "unresolved-endpoint");
    EXPECT_EQ(code_of([&] {
                  (void)build_graph(s, {dep("DINNER_PLAN.menu", "DINNER_PLAN.total_calories", Mechanism::Update,
                                            "sum(source.menu[*].calories")});
              }),
              "parse-error");
}

TEST(BuildGraph, RejectsExactlyTheCyclicGraphs) {
    Schema s;
    s.root = "R";
    for (int i = 0; i < 8; ++i) s.entities["R"].attributes.push_back(AttributeDef::number("x" + std::to_string(i)));
    std::mt19937 rng(29);
    int cyclic = 0;
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<std::pair<int, int>> es;
        std::vector<Dependency> deps;
        int n = 1 + static_cast<int>(rng() % 10);
        for (int k = 0; k < n; ++k) {
            int u = static_cast<int>(rng() % 8), v = static_cast<int>(rng() % 8);
            if (u == v) continue;
            es.emplace_back(u, v);
            deps.push_back(dep("R.x" + std::to_string(u), "R.x" + std::to_string(v), Mechanism::Update,
                               "source.x" + std::to_string(u) + " + 1"));
        }
        // reachability oracle
        bool reach[8][8] = {};
        for (auto [u, v] : es) reach[u][v] = true;
        for (int k = 0; k < 8; ++k)
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j)
                    if (reach[i][k] && reach[k][j]) reach[i][j] = true;
        bool has_cycle = false;
        for (int i = 0; i < 8; ++i) has_cycle |= reach[i][i];
        cyclic += has_cycle;
        if (has_cycle) {
            EXPECT_EQ(code_of([&] { (void)build_graph(s, deps); }), "cycle-detected") << trial;
            continue;
        }
        auto g = build_graph(s, deps);
        ASSERT_EQ(g.order.size(), deps.size());
        std::vector<std::size_t> pos(deps.size());
        for (std::size_t i = 0; i < g.order.size(); ++i) pos[g.order[i]] = i;
        for (std::size_t a = 0; a < es.size(); ++a)
            for (std::size_t b = 0; b < es.size(); ++b)
                if (es[a].second == es[b].first) EXPECT_LT(pos[a], pos[b]);
    }
    EXPECT_GT(cyclic, 20);
}

TEST(BuildGraph, SelfReadIsACycle) {
    auto s = with_total(dinner_spec().schema);
    EXPECT_EQ(code_of([&] {
                  (void)build_graph(s, {dep("DINNER_PLAN.menu", "DINNER_PLAN.total_calories", Mechanism::Update,
                                            "source.total_calories + 1")});
              }),
              "cycle-detected");
}

TEST(CheckWrite, HotelDates) {
    auto s = hotel_schema();
    auto data = hotel_data(s);
    auto g = build_graph(s, {dep("HOTEL_BOOKING.checkin_date", "HOTEL_BOOKING.checkout_date", Mechanism::Validate,
                                "target.checkout_date > source.checkin_date")});
    auto checkout = Path::parse("HOTEL_BOOKING.checkout_date");
    for (std::string attempt : {"2025-01-01", "2025-01-02", "2025-01-03", "2025-01-06", "2024-12-31"}) {
        bool oracle = attempt > std::string("2025-01-02");
        auto r = check_write(g, s, data, {checkout, Value(attempt)});
        EXPECT_EQ(r.accepted, oracle) << attempt;
        if (!oracle) {
            ASSERT_EQ(r.violations.size(), 1u);
            EXPECT_EQ(r.violations[0].kind, "violated");
            EXPECT_EQ(r.violations[0].path, "HOTEL_BOOKING.checkout_date");
            EXPECT_EQ(r.violations[0].attempted, attempt);
        }
    }
    EXPECT_TRUE(check_write(g, s, data, {Path::parse("HOTEL_BOOKING.guest"), Value("Bo")}).accepted);
    auto early_checkin = check_write(g, s, data, {Path::parse("HOTEL_BOOKING.checkin_date"), Value("2025-01-09")});
    EXPECT_FALSE(early_checkin.accepted);
}

TEST(CheckWrite, FailsClosed) {
    auto s = hotel_schema();
    auto data = hotel_data(s);
    auto g = build_graph(s, {dep("HOTEL_BOOKING.checkin_date", "HOTEL_BOOKING.checkout_date", Mechanism::Validate,
                                "target.checkout_date > 5")});
    auto r = check_write(g, s, data, {Path::parse("HOTEL_BOOKING.checkout_date"), Value("2025-01-09")});
    ASSERT_FALSE(r.accepted);
    EXPECT_EQ(r.violations[0].kind, "evaluation-failed");
}

TEST(Propagate, DinnerTotal) {
    auto s = with_total(dinner_spec().schema);
    auto data = dinner_data(s);
    auto g = build_graph(s, {dep("DINNER_PLAN.menu", "DINNER_PLAN.total_calories", Mechanism::Update,
                                "sum(source.menu[*].calories)")});
    auto all = recompute_all(g, s, data);
    EXPECT_DOUBLE_EQ(number_at(s, all.data, "DINNER_PLAN.total_calories"), 2100);
    auto w = set_unchecked(s, all.data, Path::parse("DISH[id=DISH-2].calories"), Value(900));
    auto p = propagate(g, s, w.data, w.changed);
    EXPECT_DOUBLE_EQ(number_at(s, p.data, "DINNER_PLAN.total_calories"), 2200);
    EXPECT_EQ(p.updated, std::vector<Path>{Path::parse("DINNER_PLAN.total_calories")});
    auto none = propagate(g, s, all.data, {});
    EXPECT_EQ(none.data, all.data);
    EXPECT_TRUE(none.updated.empty());
}

TEST(Propagate, ThreeEdgeChainMatchesOracle) {
    auto s = meal_schema();
    ASSERT_TRUE(validate_schema(s).ok());
    auto g = build_graph(s, meal_deps());
    EXPECT_EQ(g.order, (std::vector<std::size_t>{2, 0, 1}));
    MealOracle o{{{100, 1.5}, {200, 0.5}, {50, 4}}, {{0, 1}, {2}}};
    auto data = meal_data(s, o);
    auto all = recompute_all(g, s, data);
    EXPECT_EQ(all.fired, (std::vector<std::size_t>{2, 0, 1}));
    EXPECT_DOUBLE_EQ(number_at(s, all.data, "MEAL.total"), o.total());

    o.ingredients[2].first = 75;
    auto w = set_unchecked(s, all.data, Path::parse("INGREDIENT[id=INGREDIENT-3].grams"), Value(75));
    auto p = propagate(g, s, w.data, w.changed);
    EXPECT_EQ(p.fired, (std::vector<std::size_t>{2, 0, 1}));
    EXPECT_EQ(p.rounds, 1u);
    EXPECT_DOUBLE_EQ(number_at(s, p.data, "MEAL.total"), o.total());
    EXPECT_DOUBLE_EQ(number_at(s, p.data, "DISH[id=DISH-2].calories"), 300);
    EXPECT_EQ(p.data, recompute_all(g, s, w.data).data);
}

TEST(Propagate, BudgetExceededThrows) {
    auto s = meal_schema();
    auto g = build_graph(s, meal_deps());
    MealOracle o{{{100, 1.5}}, {{0}}};
    auto data = meal_data(s, o);
    ExecutionBudget b;
    b.max_rounds = 0;
    EXPECT_EQ(code_of([&] { (void)propagate(g, s, data, {Path::parse("INGREDIENT[id=INGREDIENT-1].grams")}, b); }),
              "budget-exceeded");
    ExecutionBudget tiny;
    tiny.max_expression_steps = 2;
    auto r = recompute_all(g, s, data, tiny);
    EXPECT_FALSE(r.stale.empty());
}

// Random acyclic graphs over R.x0..x7 and ITEM.a0..a3, checked against a
// repeat-until-stable oracle on plain numbers.
TEST(Propagate, RandomDagsMatchNaiveFixpoint) {
    Schema s;
    s.root = "R";
    auto& r = s.entities["R"].attributes;
    r.push_back(AttributeDef::text("id"));
    for (int i = 0; i < 8; ++i) r.push_back(AttributeDef::number("x" + std::to_string(i)));
    r.push_back(AttributeDef::array_of("items", ItemSpec{AttrKind::Pntr, std::nullopt, "ITEM"}));
    auto& it = s.entities["ITEM"].attributes;
    it.push_back(AttributeDef::text("id"));
    for (int j = 0; j < 4; ++j) it.push_back(AttributeDef::number("a" + std::to_string(j)));

    struct Node {
        bool item;
        int k;
    };
    struct State {
        std::array<double, 8> x{};
        std::vector<std::array<double, 4>> a;
        bool operator==(const State&) const = default;
    };
    struct OEdge {
        Node from, to;
        int mul, add;
        int extra = -1;  // second R read for R->R edges
    };
    auto eval_edge = [](const OEdge& e, State& st) {
        bool changed = false;
        auto put = [&](double& slot, double v) {
            if (slot != v) changed = true;
            slot = v;
        };
        if (!e.from.item && !e.to.item) {
            double v = st.x[e.from.k] * e.mul + e.add + (e.extra >= 0 ? st.x[e.extra] : 0);
            put(st.x[e.to.k], v);
        } else if (e.from.item && e.to.item) {
            for (auto& row : st.a) put(row[e.to.k], row[e.from.k] * e.mul + e.add);
        } else if (e.from.item) {
            double sum = 0;
            for (auto& row : st.a) sum += row[e.from.k];
            put(st.x[e.to.k], sum + e.add);
        } else {
            for (auto& row : st.a) put(row[e.to.k], st.x[e.from.k] + e.add);
        }
        return changed;
    };
    auto fixpoint = [&](const std::vector<OEdge>& es, State st) {
        for (int pass = 0; pass < 100; ++pass) {
            bool any = false;
            for (const auto& e : es) any |= eval_edge(e, st);
            if (!any) break;
        }
        return st;
    };
    auto to_data = [&](const State& st) {
        Json inst = Json::object(), ids = Json::array();
        for (std::size_t i = 0; i < st.a.size(); ++i) {
            std::string id = "ITEM-" + std::to_string(i + 1);
            Json v = {{"id", id}};
            for (int j = 0; j < 4; ++j) v["a" + std::to_string(j)] = st.a[i][static_cast<std::size_t>(j)];
            inst[id] = {{"entity", "ITEM"}, {"values", v}};
            ids.push_back(id);
        }
        Json v = {{"id", "R-1"}, {"items", ids}};
        for (int i = 0; i < 8; ++i) v["x" + std::to_string(i)] = st.x[static_cast<std::size_t>(i)];
        inst["R-1"] = {{"entity", "R"}, {"values", v}};
        return dataset_from_json(s, {{"root", "R-1"}, {"instances", inst}});
    };
    auto from_data = [&](const DataSet& d) {
        State st;
        const auto* root = d.find("R-1");
        for (int i = 0; i < 8; ++i) st.x[static_cast<std::size_t>(i)] = root->find("x" + std::to_string(i))->as_number();
        for (const auto* inst : d.of_entity("ITEM")) {
            std::array<double, 4> row{};
            for (int j = 0; j < 4; ++j) row[static_cast<std::size_t>(j)] = inst->find("a" + std::to_string(j))->as_number();
            st.a.push_back(row);
        }
        return st;
    };
    auto name = [](Node n) { return (n.item ? "a" : "x") + std::to_string(n.k); };

    std::mt19937 rng(31);
    for (int trial = 0; trial < 150; ++trial) {
        std::vector<Node> nodes;
        for (int i = 0; i < 8; ++i) nodes.push_back({false, i});
        for (int j = 0; j < 4; ++j) nodes.push_back({true, j});
        std::shuffle(nodes.begin(), nodes.end(), rng);
        std::vector<OEdge> es;
        std::vector<bool> is_target(12, false);
        for (std::size_t v = 1; v < nodes.size(); ++v) {
            if (rng() % 10 < 4) continue;
            Node from = nodes[rng() % v], to = nodes[v];
            OEdge e{from, to, 1 + static_cast<int>(rng() % 3), static_cast<int>(rng() % 5)};
            if (!from.item && !to.item && rng() % 2) {
                Node other = nodes[rng() % v];
                if (!other.item) e.extra = other.k;
            }
            es.push_back(e);
            is_target[static_cast<std::size_t>((to.item ? 8 : 0) + to.k)] = true;
        }
        std::shuffle(es.begin(), es.end(), rng);
        std::vector<Dependency> deps;
        for (const auto& e : es) {
            std::string src = e.from.item ? "source." + name(e.from) : "source." + name(e.from);
            if (!e.from.item && !e.to.item) {
                std::string code = src + " * " + std::to_string(e.mul) + " + " + std::to_string(e.add);
                if (e.extra >= 0) code += " + source.x" + std::to_string(e.extra);
                deps.push_back(dep("R." + name(e.from), "R." + name(e.to), Mechanism::Update, code));
            } else if (e.from.item && e.to.item) {
                deps.push_back(dep("ITEM." + name(e.from), "ITEM." + name(e.to), Mechanism::Update,
                                   src + " * " + std::to_string(e.mul) + " + " + std::to_string(e.add)));
            } else if (e.from.item) {
                deps.push_back(dep("R.items", "R." + name(e.to), Mechanism::Update,
                                   "sum(source.items[*]." + name(e.from) + ") + " + std::to_string(e.add)));
            } else {
                deps.push_back(dep("R." + name(e.from), "ITEM." + name(e.to), Mechanism::Update,
                                   src + " + " + std::to_string(e.add)));
            }
        }
        ASSERT_LE(deps.size(), 20u);
        auto g = build_graph(s, deps);

        State st;
        for (auto& x : st.x) x = static_cast<double>(rng() % 10);
        st.a.resize(rng() % 40);
        for (auto& row : st.a)
            for (auto& v : row) v = static_cast<double>(rng() % 10);
        auto data = to_data(st);
        ASSERT_EQ(data.instances.size(), st.a.size() + 1);

        auto full = recompute_all(g, s, data);
        State expect = fixpoint(es, st);
        ASSERT_EQ(from_data(full.data), expect) << trial;

        // Mutate one non-target node and propagate.
        std::vector<int> free;
        for (int n = 0; n < 12; ++n)
            if (!is_target[static_cast<std::size_t>(n)]) free.push_back(n);
        int n = free[rng() % free.size()];
        Path p;
        State changed = expect;
        double nv = static_cast<double>(100 + rng() % 50);
        if (n < 8) {
            p = Path::parse("R.x" + std::to_string(n));
            changed.x[static_cast<std::size_t>(n)] = nv;
        } else {
            if (changed.a.empty()) continue;
            std::size_t row = rng() % changed.a.size();
            p = Path::parse("ITEM[id=ITEM-" + std::to_string(row + 1) + "].a" + std::to_string(n - 8));
            changed.a[row][static_cast<std::size_t>(n - 8)] = nv;
        }
        auto w = set_unchecked(s, full.data, p, Value(nv));
        auto res = propagate(g, s, w.data, w.changed);
        State got = from_data(res.data);
        EXPECT_EQ(got, fixpoint(es, changed)) << trial;
        std::set<std::size_t> fired(res.fired.begin(), res.fired.end());
        if (res.rounds == 1) EXPECT_EQ(fired.size(), res.fired.size());

        // Only declared targets moved.
        for (int m = 0; m < 12; ++m) {
            if (is_target[static_cast<std::size_t>(m)]) continue;
            if (m < 8) {
                EXPECT_EQ(got.x[static_cast<std::size_t>(m)], changed.x[static_cast<std::size_t>(m)]);
            } else {
                for (std::size_t row = 0; row < got.a.size(); ++row)
                    EXPECT_EQ(got.a[row][static_cast<std::size_t>(m - 8)], changed.a[row][static_cast<std::size_t>(m - 8)]);
            }
        }
    }
}

TEST(Propagate, ValidateNeverWrites) {
    auto s = hotel_schema();
    auto data = hotel_data(s);
    auto g = build_graph(s, {dep("HOTEL_BOOKING.checkin_date", "HOTEL_BOOKING.checkout_date", Mechanism::Validate,
                                "target.checkout_date > source.checkin_date")});
    auto w = set_unchecked(s, data, Path::parse("HOTEL_BOOKING.checkin_date"), Value("2025-02-01"));
    auto r = propagate(g, s, w.data, w.changed);
    EXPECT_EQ(r.data, w.data);
    EXPECT_EQ(r.violations.size(), 1u);
}

TEST(Propagate, NaturalLanguageEdges) {
    auto s = with_total(dinner_spec().schema);
    s.entities["DINNER_PLAN"].attributes.push_back(AttributeDef::text("theme"));
    auto data = dinner_data(s);
    std::vector<Dependency> deps = {
        {Path::parse("DINNER_PLAN.menu"), Path::parse("DINNER_PLAN.total_calories"), Mechanism::Update,
         Relationship::of_text("add up the calories of every dish")},
        {Path::parse("DINNER_PLAN.menu"), Path::parse("DINNER_PLAN.theme"), Mechanism::Update,
         Relationship::of_text("name the cuisine theme")}};
    auto g = build_graph(s, deps);
    ASSERT_EQ(g.levels.size(), 1u);
    std::atomic<int> calls{0};
    NlExecutor nl = [&](const NlRequest& r) -> Value {
        ++calls;
        if (r.target == "DINNER_PLAN.theme") return Value("Italian night");
        return Value(2100);
    };
    NlCache cache;
    auto r = recompute_all(g, s, data, {}, nl, &cache);
    EXPECT_EQ(calls.load(), 2);
    EXPECT_EQ(cache.size(), 2u);
    EXPECT_DOUBLE_EQ(number_at(s, r.data, "DINNER_PLAN.total_calories"), 2100);
    auto again = recompute_all(g, s, data, {}, nl, &cache);
    EXPECT_EQ(calls.load(), 2);
    EXPECT_EQ(again.data, r.data);

    NlExecutor flaky = [&](const NlRequest& r) -> Value {
        if (r.target == "DINNER_PLAN.theme") throw std::runtime_error("provider down");
        return Value(1);
    };
    auto f = recompute_all(g, s, data, {}, flaky);
    EXPECT_EQ(f.stale, std::vector<std::size_t>{1});
    EXPECT_DOUBLE_EQ(number_at(s, f.data, "DINNER_PLAN.total_calories"), 1);
}

TEST(Lint, Findings) {
    auto s = with_total(dinner_spec().schema);
    auto ok = lint_dependencies(s, {dep("DINNER_PLAN.menu", "DINNER_PLAN.total_calories", Mechanism::Update,
                                        "sum(source.menu[*].calories)")});
    EXPECT_TRUE(ok.empty());
    auto red = lint_dependencies(s, {dep("DINNER_PLAN.menu", "DISH", Mechanism::Validate, "source.menu")});
    ASSERT_EQ(red.size(), 1u);
    EXPECT_EQ(red[0].rule, "redundant");
    auto rev = lint_dependencies(s, {dep("DINNER_PLAN.menu", "DINNER_PLAN.total_calories", Mechanism::Update,
                                         "target.total_calories * 2")});
    ASSERT_EQ(rev.size(), 1u);
    EXPECT_EQ(rev[0].rule, "reversed");
    auto shared = lint_dependencies(s, {dep("DINNER_PLAN.menu", "DINNER_PLAN.total_calories", Mechanism::Update, "1"),
                                        dep("DINNER_PLAN.date", "DINNER_PLAN.total_calories", Mechanism::Update, "2")});
    ASSERT_EQ(shared.size(), 1u);
    EXPECT_EQ(shared[0].rule, "shared-target");
    EXPECT_EQ(lint_dependencies(s, {dep("DINNER_PLAN.menu", "DINNER_PLAN.cost", Mechanism::Update, "1")})[0].rule,
              "unresolved-endpoint");
}

TEST(Dependency, JsonRoundTrip) {
    auto j = Json::parse(R"J([{"source": "DINNER_PLAN.menu", "target": "DINNER_PLAN.total_calories",
                              "mechanism": "update", "relationship": {"code": "sum(source.menu[*].calories)"}},
                             {"source": "HOTEL.checkin", "target": "HOTEL.checkout", "mechanism": "Validate",
                              "relationship": "checkout after checkin"}])J");
    auto deps = dependencies_from_json(j);
    ASSERT_EQ(deps.size(), 2u);
    EXPECT_EQ(deps[0].mechanism, Mechanism::Update);
    EXPECT_EQ(deps[1].relationship.natural, "checkout after checkin");
    EXPECT_EQ(dependencies_from_json(to_json(deps)), deps);
    EXPECT_EQ(code_of([] { (void)dependency_from_json(Json::parse(R"({"source": "A"})")); }), "dependency-syntax");
}
