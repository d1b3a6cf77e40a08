#include "taskui/llm/prompts.hpp"

namespace taskui {

namespace {

const char* kCommon =
    "You design data models for a personal task workspace. Reply with one JSON value and nothing else.\n"
    "Entity names are UPPER_SNAKE_CASE, attribute names lower_snake_case. Every entity has an \"id\" attribute.\n"
    "Attribute types: \"string\", \"number\", \"__ENTITY__\" (pointer to one instance), "
    "{\"type\": \"array\", \"item\": {\"type\": \"string\" | \"number\" | \"__ENTITY__\"}}, "
    "{\"type\": \"object\", \"fields\": {...}} (objects never sit inside arrays).\n";

const char* kGenSchema =
    "Task: propose entities and attributes for the user's task. The first entity is the task itself.\n"
    "Format: {\"ENTITY\": {\"attr\": {\"type\": ...}, ...}, ...}\n"
    "Example for \"run my book club\":\n"
    "{\"BOOK_CLUB\": {\"id\": {\"type\": \"string\"}, \"next_meeting\": {\"type\": \"string\"},"
    " \"members\": {\"type\": \"array\", \"item\": {\"type\": \"__MEMBER__\"}}, \"books\": {\"type\": \"array\", \"item\": {\"type\": \"__BOOK__\"}}},"
    " \"MEMBER\": {\"id\": {\"type\": \"string\"}, \"name\": {\"type\": \"string\"}, \"email\": {\"type\": \"string\"}},"
    " \"BOOK\": {\"id\": {\"type\": \"string\"}, \"title\": {\"type\": \"string\"}, \"pages\": {\"type\": \"number\"}}}\n";

const char* kGenAnnotations =
    "Task: choose UI labels for every attribute of the given schema.\n"
    "Labels: function (privateIdentifier | publicIdentifier | display), render (shortText | paragraph | number | url |"
    " time | location | category | hidden for single values; summary | expanded for arrays), editable (bool),"
    " categories (for category), summary ({name, derived: {operation: SUM|AVG|MIN|MAX|FILTER|COUNT, field}}),"
    " and for arrays \"item\": {thumbnail: [attrs]} or {render}.\n"
    "ids are privateIdentifier and hidden; each entity has exactly one publicIdentifier.\n"
    "Format: {\"ENTITY\": {\"attr\": {labels}, ...}, ...}\n"
    "Example: {\"BOOK\": {\"id\": {\"function\": \"privateIdentifier\", \"render\": \"hidden\", \"editable\": false},"
    " \"title\": {\"function\": \"publicIdentifier\", \"render\": \"shortText\", \"editable\": true},"
    " \"pages\": {\"function\": \"display\", \"render\": \"number\", \"editable\": true}}}\n";

const char* kGenDependencies =
    "Task: list the relationships between attributes. An update dependency recomputes the target from the source;"
    " a validate dependency states a condition the target must meet.\n"
    "Expressions see `source` and `target` bound to instances; use arithmetic, comparisons, and/or/not,"
    " sum/avg/min/max/count/filter over lists, and path access like source.books[*].pages.\n"
    "When no formula fits, give the relationship in words instead of code.\n"
    "Format: {\"dependencies\": [{\"source\": \"ENTITY.attr\", \"target\": \"ENTITY.attr\", \"mechanism\": \"update\" | \"validate\","
    " \"relationship\": {\"code\": \"...\"} | {\"natural\": \"...\"}}]}\n"
    "Example: {\"dependencies\": [{\"source\": \"BOOK_CLUB.books\", \"target\": \"BOOK_CLUB.total_pages\","
    " \"mechanism\": \"update\", \"relationship\": {\"code\": \"sum(source.books[*].pages)\"}}]}\n";

const char* kGenData =
    "Task: fill the schema with plausible instances for the user's task. Pointers hold instance ids.\n"
    "Format: {\"root\": \"ROOT_ENTITY-1\", \"instances\": {\"ENTITY-1\": {\"entity\": \"ENTITY\", \"values\": {...}}, ...}}\n"
    "Example: {\"root\": \"BOOK_CLUB-1\", \"instances\": {\"BOOK_CLUB-1\": {\"entity\": \"BOOK_CLUB\","
    " \"values\": {\"id\": \"BOOK_CLUB-1\", \"next_meeting\": \"2025-03-02\", \"members\": [\"MEMBER-1\"], \"books\": []}},"
    " \"MEMBER-1\": {\"entity\": \"MEMBER\", \"values\": {\"id\": \"MEMBER-1\", \"name\": \"Ana\", \"email\": \"ana@example.com\"}}}}\n";

const char* kParseFollowUp =
    "Task: turn the user's follow-up into updaters on the current model. Decide whether the schema must change,"
    " the data must change, or both.\n"
    "Updater: {\"target\": path, \"action\": add-schema | remove-schema | update-schema | add-data | remove-data |"
    " update-data | cluster | filter | sort, \"specifications\": {...}}.\n"
    "Paths: ENTITY, ENTITY.attr, ENTITY[id=ENTITY-3].attr, ENTITY.list[2].\n"
    "Specifications: add-schema {attributes: [{name, type, labels...}]}; update-schema {type?, rename?, labels?};"
    " add-data {values}; update-data {value} or {values}; cluster {field} or {pending: \"cluster\", criterion};"
    " filter {predicate over item}; sort {field, direction: asc | desc}.\n"
    "If nothing needs to change, return no updaters and explain why.\n"
    "Format: {\"updaters\": [...], \"message\": \"short reply to the user\"}\n"
    "Example for \"Ana is vegetarian\": {\"updaters\": [{\"target\": \"MEMBER\", \"action\": \"add-schema\","
    " \"specifications\": {\"attributes\": [{\"name\": \"diet\", \"type\": \"string\"}]}},"
    " {\"target\": \"MEMBER[id=MEMBER-1].diet\", \"action\": \"update-data\", \"specifications\": {\"value\": \"vegetarian\"}}],"
    " \"message\": \"Added a diet field and marked Ana as vegetarian.\"}\n";

const char* kAutoComplete =
    "Task: complete one instance. Keep every given value exactly as it is and fill the missing attributes."
    " Follow the user's preference when one is given. Pointers must name existing instance ids.\n"
    "Format: {\"values\": {\"attr\": value, ...}}\n";

const char* kNlExec =
    "Task: apply a relationship described in words. For an update, compute the new target value."
    " For a validation, decide whether the target satisfies it.\n"
    "Format: {\"value\": ...} for updates, {\"valid\": true | false, \"reason\": \"...\"} for validations.\n";

const char* kCluster =
    "Task: group the listed items by the given criterion. Every item id goes in exactly one group.\n"
    "Format: {\"groups\": [{\"label\": \"...\", \"members\": [ids]}]}\n";

}  // namespace

std::string system_prompt(RequestKind kind) {
    std::string out = kCommon;
    switch (kind) {
        case RequestKind::GenSchema: return out + kGenSchema;
        case RequestKind::GenAnnotations: return out + kGenAnnotations;
        case RequestKind::GenDependencies: return out + kGenDependencies;
        case RequestKind::GenData: return out + kGenData;
        case RequestKind::ParseFollowUp: return out + kParseFollowUp;
        case RequestKind::AutoComplete: return out + kAutoComplete;
        case RequestKind::NLDependencyExec: return out + kNlExec;
        case RequestKind::SemanticCluster: return out + kCluster;
    }
    return out;
}

std::string user_message(const ProviderRequest& r) {
    Json m = {{"request", to_string(r.kind)}, {"input", r.payload}};
    if (!r.context.empty()) m["context"] = r.context;
    if (r.payload.contains("repair"))
        m["note"] = "Your previous answer could not be used. Fix the listed problems and answer again.";
    return m.dump(2);
}

}  // namespace taskui
