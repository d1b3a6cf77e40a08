#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "taskui/core/schema_ops.hpp"

using namespace taskui;
using namespace taskui::test;

TEST(Path, ParsesAndPrints) {
    auto p = Path::parse("DINNER_PLAN.menu[*].calories");
    EXPECT_EQ(p.entity(), "DINNER_PLAN");
    ASSERT_EQ(p.steps().size(), 3u);
    EXPECT_EQ(p.steps()[1].kind, PathStep::Kind::All);
    EXPECT_EQ(p.str(), "DINNER_PLAN.menu[*].calories");
    EXPECT_EQ(Path::parse("DISH[id=DISH-2].ingredients[0]").str(), "DISH[id=DISH-2].ingredients[0]");
    EXPECT_EQ(Path::parse("DISH[id=DISH-2]").steps()[0].name, "DISH-2");
}

TEST(Path, RejectsMalformed) {
    for (const char* bad : {"", "dish.name", "DISH.Name", "DISH..name", "DISH[", "DISH[x]", "DISH.name[", "DISH[id=]"}) {
        try {
            (void)Path::parse(bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), "path-syntax") << bad;
        }
    }
}

TEST(Schema, DinnerModelValidates) {
    auto spec = dinner_spec();
    EXPECT_EQ(spec.schema.root, "DINNER_PLAN");
    EXPECT_TRUE(validate_schema(spec.schema).ok()) << validate_schema(spec.schema).to_json().dump();
    auto ann = validate_annotations(spec.schema, spec.annotations);
    EXPECT_TRUE(ann.ok()) << ann.to_json().dump();
    const auto* date = spec.annotations.find("DINNER_PLAN", "date");
    ASSERT_TRUE(date);
    EXPECT_EQ(date->render, Render::Time);
    const auto* menu = spec.annotations.find("DINNER_PLAN", "menu");
    ASSERT_TRUE(menu && menu->summary);
    EXPECT_EQ(menu->summary->label, "total_calories");
    EXPECT_EQ(menu->summary->field, "calories");
    EXPECT_EQ(menu->summary->operation, SummaryOp::Sum);
    EXPECT_EQ(menu->thumbnail, (std::vector<std::string>{"name", "calories"}));
    EXPECT_TRUE(validate_schema(stores_spec().schema).ok());
    EXPECT_TRUE(validate_annotations(stores_spec().schema, stores_spec().annotations).ok());
}

TEST(Schema, MinimalSchemaValidates) {
    Schema s;
    s.root = "TASK";
    s.entities["TASK"] = {};
    EXPECT_TRUE(validate_schema(s).ok());
}

TEST(Schema, ArrayOfDictIsOneViolation) {
    auto s = dinner_spec().schema;
    auto& menu = s.entities["DINNER_PLAN"].attributes[5];
    ASSERT_EQ(menu.name, "menu");
    menu.item = ItemSpec{AttrKind::Dict, std::nullopt, std::nullopt};
    auto r = validate_schema(s);
    ASSERT_EQ(r.size(), 1u) << r.to_json().dump();
    EXPECT_EQ(r.issues()[0].path, "DINNER_PLAN.menu");
    EXPECT_EQ(r.issues()[0].rule, "no-array-of-dict");
}

TEST(Schema, SingleFieldMutationsAreRejected) {
    const auto base = dinner_spec().schema;
    std::vector<std::pair<std::string, Schema>> mutants;
    auto m = base;
    m.root = "NOPE";
    mutants.emplace_back("unknown-root", m);
    m = base;
    m.entities["DINNER_PLAN"].attributes[2].target = "GHOST";
    mutants.emplace_back("unknown-entity-ref", m);
    m = base;
    m.entities["DINNER_PLAN"].attributes[4].item->target = "GHOST";
    mutants.emplace_back("unknown-entity-ref", m);
    m = base;
    m.entities["USER"].attributes.push_back(AttributeDef::text("email"));
    mutants.emplace_back("duplicate-attribute", m);
    m = base;
    m.entities["USER"].attributes[1].target = "DISH";
    mutants.emplace_back("kind-fields", m);
    m = base;
    m.entities["DISH"].attributes.push_back(
        AttributeDef::dict("nutrition", {AttributeDef::dict("inner", {AttributeDef::number("fat")})}));
    mutants.emplace_back("nested-dict", m);
    m = base;
    m.entities["DISH"].attributes.push_back(AttributeDef::array_of("grid", ItemSpec{AttrKind::Arry, std::nullopt, std::nullopt}));
    mutants.emplace_back("no-nested-array", m);
    m = base;
    m.entities["dish"] = m.entities["DISH"];
    mutants.emplace_back("bad-entity-name", m);
    m = base;
    m.entities["DISH"].attributes[1].name = "Name";
    mutants.emplace_back("bad-attribute-name", m);
    for (const auto& [rule, schema] : mutants) {
        auto r = validate_schema(schema);
        EXPECT_TRUE(r.has(rule)) << rule << " " << r.to_json().dump();
    }
}

TEST(Annotations, MissingEditable) {
    auto spec = dinner_spec();
    auto a = *spec.annotations.find("DISH", "calories");
    a.editable.reset();
    spec.annotations.set("DISH", "calories", a);
    auto r = validate_annotations(spec.schema, spec.annotations);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r.issues()[0].rule, "missing-field");
    EXPECT_EQ(r.issues()[0].path, "DISH.calories");
}

TEST(Annotations, EmptyCategories) {
    auto spec = dinner_spec();
    auto a = *spec.annotations.find("DISH", "cuisine_type");
    a.categories.clear();
    spec.annotations.set("DISH", "cuisine_type", a);
    auto r = validate_annotations(spec.schema, spec.annotations);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r.issues()[0].rule, "empty-categories");
}

TEST(Annotations, InvariantBreaks) {
    auto base = dinner_spec();
    auto check = [&](const std::string& rule, auto&& mutate) {
        auto spec = base;
        mutate(spec);
        auto r = validate_annotations(spec.schema, spec.annotations);
        EXPECT_TRUE(r.has(rule)) << rule << " " << r.to_json().dump();
    };
    check("duplicate-public-identifier", [](ModelSpec& s) {
        auto a = *s.annotations.find("USER", "email");
        a.function = Function::PublicIdentifier;
        s.annotations.set("USER", "email", a);
    });
    check("render-kind-mismatch", [](ModelSpec& s) {
        auto a = *s.annotations.find("DISH", "calories");
        a.render = Render::Expanded;
        s.annotations.set("DISH", "calories", a);
    });
    check("summary-non-numeric", [](ModelSpec& s) {
        auto a = *s.annotations.find("DINNER_PLAN", "menu");
        a.summary->field = "name";
        s.annotations.set("DINNER_PLAN", "menu", a);
    });
    check("summary-field", [](ModelSpec& s) {
        auto a = *s.annotations.find("DINNER_PLAN", "menu");
        a.summary->field = "weight";
        s.annotations.set("DINNER_PLAN", "menu", a);
    });
    check("unknown-thumbnail", [](ModelSpec& s) {
        auto a = *s.annotations.find("DINNER_PLAN", "guest_list");
        a.thumbnail.push_back("age");
        s.annotations.set("DINNER_PLAN", "guest_list", a);
    });
    check("missing-annotation", [](ModelSpec& s) { s.annotations.entities["USER"].erase("phone"); });
    check("orphan-annotation", [](ModelSpec& s) { s.annotations.set("USER", "age", *s.annotations.find("USER", "phone")); });
}

TEST(ResolvePath, Examples) {
    auto s = dinner_spec().schema;
    auto r = resolve_path(s, Path::parse("DINNER_PLAN.date"));
    EXPECT_EQ(r.describe(), "SVAL-text");
    EXPECT_FALSE(r.many);
    r = resolve_path(s, Path::parse("DINNER_PLAN"));
    EXPECT_EQ(r.kind, ResolvedKind::EntityRoot);
    EXPECT_FALSE(r.many);
    r = resolve_path(s, Path::parse("DINNER_PLAN.menu[*].ingredients"));
    EXPECT_EQ(r.describe(), "ARRY of SVAL-text");
    EXPECT_TRUE(r.many);
    r = resolve_path(s, Path::parse("DINNER_PLAN.menu[*].calories"));
    EXPECT_EQ(r.kind, ResolvedKind::SvalNumber);
    EXPECT_TRUE(r.many);
    EXPECT_EQ(r.footprint, (std::vector<std::string>{"DINNER_PLAN.menu", "DISH.calories"}));
    r = resolve_path(s, Path::parse("DINNER_PLAN.host.name"));
    EXPECT_EQ(r.entity, "USER");
    EXPECT_FALSE(r.many);
}

TEST(ResolvePath, Errors) {
    auto s = dinner_spec().schema;
    auto code = [&](const char* p) {
        try {
            (void)resolve_path(s, Path::parse(p));
        } catch (const Error& e) {
            return e.code();
        }
        return std::string("ok");
    };
    EXPECT_EQ(code("HOTEL"), "unknown-entity");
    EXPECT_EQ(code("DINNER_PLAN.budget"), "unknown-attribute");
    EXPECT_EQ(code("DINNER_PLAN.date[0]"), "kind-mismatch");
    EXPECT_EQ(code("DINNER_PLAN.menu.calories"), "kind-mismatch");
}

TEST(ResolvePath, PrinterRoundTripOnEveryPath) {
    for (const auto& spec : {dinner_spec(), stores_spec()}) {
        auto paths = enumerate_paths(spec.schema);
        EXPECT_GT(paths.size(), 10u);
        for (const auto& p : paths) {
            auto again = Path::parse(p.str());
            EXPECT_EQ(again, p);
            EXPECT_NO_THROW((void)resolve_path(spec.schema, again)) << p.str();
        }
    }
}

TEST(SchemaDiff, Examples) {
    auto s = dinner_spec().schema;
    EXPECT_TRUE(diff_schemas(s, s).empty());
    auto t = s;
    t.entities["DISH"].attributes.push_back(AttributeDef::text("dietary_suitability"));
    auto d = diff_schemas(s, t);
    ASSERT_EQ(d.added.size(), 1u);
    EXPECT_EQ(d.added[0].path, "DISH.dietary_suitability");
    EXPECT_TRUE(d.removed.empty() && d.changed.empty());
    auto u = s;
    auto& attrs = u.entities["DINNER_PLAN"].attributes;
    attrs.erase(attrs.begin() + 3);
    d = diff_schemas(s, u);
    ASSERT_EQ(d.removed.size(), 1u);
    EXPECT_EQ(d.removed[0].path, "DINNER_PLAN.location");
}

// Random valid schema pairs: b derives from a by removals, inserts and kind changes.
TEST(SchemaDiff, ApplyReproducesTarget) {
    std::mt19937 rng(7);
    auto base = stores_spec().schema;
    for (int trial = 0; trial < 200; ++trial) {
        Schema a = base, b = base;
        for (auto& [name, def] : b.entities) {
            auto& attrs = def.attributes;
            for (std::size_t i = 1; i < attrs.size();) {
                if (rng() % 5 == 0) attrs.erase(attrs.begin() + static_cast<long>(i));
                else ++i;
            }
            int adds = static_cast<int>(rng() % 3);
            for (int k = 0; k < adds; ++k) {
                auto pos = rng() % (attrs.size() + 1);
                auto attr = rng() % 2 ? AttributeDef::text("extra_" + std::to_string(k))
                                      : AttributeDef::number("extra_" + std::to_string(k));
                attrs.insert(attrs.begin() + static_cast<long>(pos), attr);
            }
            for (auto& at : attrs)
                if (at.kind == AttrKind::Sval && at.name != "id" && rng() % 6 == 0)
                    at.hint = at.hint == ScalarHint::Number ? ScalarHint::Text : ScalarHint::Number;
        }
        if (rng() % 4 == 0) {
            b.entities["NOTE"].attributes = {AttributeDef::text("id"), AttributeDef::text("body")};
        }
        auto d = diff_schemas(a, b);
        EXPECT_EQ(apply_delta(a, d), b) << trial;
        EXPECT_TRUE(diff_schemas(b, apply_delta(a, d)).empty());
    }
}

TEST(DefaultAnnotations, Rules) {
    auto spec = dinner_spec();
    auto defaults = default_annotations(spec.schema);
    auto r = validate_annotations(spec.schema, defaults);
    EXPECT_TRUE(r.ok()) << r.to_json().dump();
    const auto* id = defaults.find("USER", "id");
    ASSERT_TRUE(id);
    EXPECT_EQ(id->function, Function::PrivateIdentifier);
    EXPECT_EQ(id->render, Render::Hidden);
    EXPECT_EQ(id->editable, false);
    const auto* name = defaults.find("USER", "name");
    EXPECT_EQ(name->function, Function::PublicIdentifier);
    EXPECT_EQ(name->render, Render::ShortText);
    const auto* guests = defaults.find("DINNER_PLAN", "guest_list");
    EXPECT_EQ(guests->render, Render::Expanded);
    EXPECT_EQ(guests->thumbnail, std::vector<std::string>{"name"});
    EXPECT_EQ(defaults.find("DISH", "calories")->render, Render::Number);

    Schema single;
    single.root = "NOTE";
    single.entities["NOTE"].attributes = {AttributeDef::text("label")};
    auto one = default_annotations(single);
    const auto* label = one.find("NOTE", "label");
    EXPECT_EQ(label->function, Function::Display);
    EXPECT_EQ(label->render, Render::ShortText);
    EXPECT_EQ(label->editable, true);
}

TEST(DefaultAnnotations, AlwaysValidOnGeneratedSchemas) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        Schema s;
        int n = 1 + static_cast<int>(rng() % 4);
        std::vector<std::string> names;
        for (int e = 0; e < n; ++e) names.push_back("ENTITY_" + std::to_string(e));
        s.root = names[0];
        for (const auto& e : names) {
            auto& attrs = s.entities[e].attributes;
            if (rng() % 2) attrs.push_back(AttributeDef::text("id"));
            if (rng() % 2) attrs.push_back(AttributeDef::text("name"));
            int k = static_cast<int>(rng() % 6);
            for (int i = 0; i < k; ++i) {
                std::string an = "attr_" + std::to_string(i);
                std::string other = names[rng() % names.size()];
                switch (rng() % 6) {
                    case 0: attrs.push_back(AttributeDef::text(an)); break;
                    case 1: attrs.push_back(AttributeDef::number(an)); break;
                    case 2: attrs.push_back(AttributeDef::pointer(an, other)); break;
                    case 3: attrs.push_back(AttributeDef::array_of(an, ItemSpec{AttrKind::Pntr, std::nullopt, other})); break;
                    case 4: attrs.push_back(AttributeDef::array_of(an, ItemSpec{AttrKind::Sval, ScalarHint::Text, std::nullopt})); break;
                    default: attrs.push_back(AttributeDef::dict(an, {AttributeDef::text("x"), AttributeDef::number("y")})); break;
                }
            }
        }
        ASSERT_TRUE(validate_schema(s).ok());
        auto r = validate_annotations(s, default_annotations(s));
        EXPECT_TRUE(r.ok()) << r.to_json().dump();
    }
}

TEST(Json, SchemaAndAnnotationsRoundTrip) {
    auto spec = stores_spec();
    auto sj = to_json(spec.schema);
    auto again = schema_from_json(OrderedJson::parse(sj.dump()));
    EXPECT_EQ(again, spec.schema);
    auto aj = to_json(spec.annotations);
    EXPECT_EQ(annotations_from_json(aj), spec.annotations);
    auto combined = to_combined_json(spec.schema, spec.annotations);
    auto back = combined_from_json(combined);
    EXPECT_EQ(back.schema, spec.schema);
    EXPECT_EQ(back.annotations, spec.annotations);
}
