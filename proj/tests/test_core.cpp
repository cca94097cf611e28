#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "mdchase/error.hpp"
#include "mdchase/instance.hpp"
#include "mdchase/io.hpp"
#include "mdchase/schema.hpp"
#include "mdchase/similarity.hpp"
#include "mdchase/value.hpp"

#include "generators.hpp"

using namespace mdchase;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("mdchase_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("values compare and display") {
    Value a = Value::ground("a"), b = Value::ground("b"), a2 = Value::ground("a");
    Value f0 = Value::fresh(0), f1 = Value::fresh(1);
    CHECK(a == a2);
    CHECK_FALSE(a == b);
    CHECK_FALSE(a == f0);
    CHECK_FALSE(f0 == f1);
    CHECK(f0 == Value::fresh(0));
    CHECK(a < b);
    CHECK(b < f0);  // ground precedes fresh
    CHECK(f0 < f1);
    CHECK(a.display() == "a");
    CHECK(f1.display() == "_:1");
}

TEST_CASE("schema lookups") {
    Schema s({{"R", {"A", "B"}}, {"S", {"X"}}});
    CHECK(s.find("R") != nullptr);
    CHECK(s.find("T") == nullptr);
    CHECK(s.attr_index({"R", "B"}) == 1);
    CHECK(s.attr_index({"R", "Z"}) == -1);
    CHECK(s.has_attr({"S", "X"}));
    CHECK_THROWS_AS(s.require("T"), structural_error);
    CHECK(AttrRef{"R", "A"}.str() == "R[A]");
    CHECK((Position{3, {"R", "B"}}.str()) == "(R:t3,B)");
}

TEST_CASE("schema rejects duplicates") {
    CHECK_THROWS_AS(Schema({{"R", {"A"}}, {"R", {"B"}}}), structural_error);
    CHECK_THROWS_AS(Schema({{"R", {"A", "A"}}}), structural_error);
}

TEST_CASE("instance cells, diff, change_count") {
    auto schema = std::make_shared<Schema>(
        std::vector<RelationDef>{{"R", {"A", "B"}}});
    Instance d(schema);
    d.insert("R", 1, {Value::ground("a"), Value::ground("b")});
    d.insert("R", 2, {Value::ground("a"), Value::ground("c")});
    CHECK(d.tuple_count() == 2);
    CHECK(d.at({2, {"R", "B"}}) == Value::ground("c"));
    CHECK_THROWS_AS(d.insert("R", 1, {Value::ground("x"), Value::ground("y")}),
                    structural_error);
    CHECK_THROWS_AS(d.insert("R", 3, {Value::ground("x")}), structural_error);

    Instance d2 = d;
    d2.set({2, {"R", "B"}}, Value::ground("b"));
    auto changed = diff(d, d2);
    REQUIRE(changed.size() == 1);
    CHECK(changed.count({2, {"R", "B"}}) == 1);
    CHECK(change_count(d, d2) == 1);

    auto dom = active_domain(d, {"R", "B"});
    CHECK(dom == std::set<Value>{Value::ground("b"), Value::ground("c")});
}

TEST_CASE("diff requires matching tid sets") {
    auto schema = std::make_shared<Schema>(std::vector<RelationDef>{{"R", {"A"}}});
    Instance d1(schema), d2(schema);
    d1.insert("R", 1, {Value::ground("a")});
    d2.insert("R", 2, {Value::ground("a")});
    CHECK_THROWS_AS(diff(d1, d2), structural_error);
}

TEST_CASE("levenshtein") {
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("", "abc") == 3);
    CHECK(levenshtein("abc", "abc") == 0);
    CHECK(levenshtein("ab", "ba") == 2);
}

TEST_CASE("table similarity closure and transitivity check") {
    SimilaritySpec t;
    t.name = "s";
    t.kind = SimKind::Table;
    t.pairs = {{"x", "y"}};
    SimilaritySpec v = validate_similarity(t);
    CHECK(v.pairs.count({"y", "x"}) == 1);  // swap closure
    CHECK(v.pairs.count({"x", "x"}) == 1);  // identity of mentioned values
    CHECK(sim_eval(v, Value::ground("x"), Value::ground("y")));
    CHECK_FALSE(sim_eval(v, Value::ground("x"), Value::ground("z")));
    CHECK(sim_eval(v, Value::ground("z"), Value::ground("z")));  // equality subsumption

    SimilaritySpec bad;
    bad.name = "b";
    bad.kind = SimKind::Table;
    bad.pairs = {{"x", "y"}, {"y", "z"}};
    bad.transitive = true;  // x~y, y~z but not x~z
    CHECK_THROWS_AS(validate_similarity(bad), input_error);
}

TEST_CASE("fresh values are similar only to themselves") {
    SimilaritySpec ed;
    ed.kind = SimKind::EditDistance;
    ed.threshold = 100;
    CHECK(sim_eval(ed, Value::fresh(1), Value::fresh(1)));
    CHECK_FALSE(sim_eval(ed, Value::fresh(1), Value::fresh(2)));
    CHECK_FALSE(sim_eval(ed, Value::fresh(1), Value::ground("")));
}

TEST_CASE("registry reserves eq and validates additions") {
    SimilarityRegistry reg;
    CHECK(reg.has("eq"));
    CHECK(reg.get("eq").transitive);
    SimilaritySpec clash = equality_spec();
    CHECK_THROWS_AS(reg.add(clash), input_error);
    SimilaritySpec ed;
    ed.name = "near";
    ed.kind = SimKind::EditDistance;
    ed.threshold = 1;
    reg.add(ed);
    CHECK(reg.all_transitive({"eq"}));
    CHECK_FALSE(reg.all_transitive({"eq", "near"}));
    CHECK_THROWS_AS(reg.get("nope"), structural_error);
}

TEST_CASE("similarity axioms hold on random pairs", "[property]") {
    gen::Rng rng;
    auto rand_text = [&] {
        std::string s;
        std::size_t len = rng.below(5);
        for (std::size_t i = 0; i < len; ++i) s += char('a' + rng.below(3));
        return s;
    };

    std::vector<SimilaritySpec> specs;
    specs.push_back(equality_spec());
    for (std::size_t t = 0; t <= 2; ++t) {
        SimilaritySpec ed;
        ed.name = "ed" + std::to_string(t);
        ed.kind = SimKind::EditDistance;
        ed.threshold = t;
        specs.push_back(validate_similarity(ed));
    }
    SimilaritySpec tab;
    tab.name = "tab";
    tab.kind = SimKind::Table;
    for (int i = 0; i < 6; ++i) tab.pairs.insert({rand_text(), rand_text()});
    specs.push_back(validate_similarity(tab));

    for (const auto& spec : specs) {
        for (int i = 0; i < 1200; ++i) {
            Value x = Value::ground(rand_text()), y = Value::ground(rand_text());
            CHECK(sim_eval(spec, x, y) == sim_eval(spec, y, x));  // symmetry
            CHECK(sim_eval(spec, x, x));                          // equality subsumption
        }
    }
}

TEST_CASE("csv parsing handles quotes, escapes, newlines, crlf") {
    auto rows = parse_csv("a,b\n\"x,1\",\"he said \"\"hi\"\"\"\n\"multi\nline\",last\r\nend,row\n",
                          "t.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].fields == std::vector<std::string>{"a", "b"});
    CHECK(rows[1].fields == std::vector<std::string>{"x,1", "he said \"hi\""});
    CHECK(rows[2].fields == std::vector<std::string>{"multi\nline", "last"});
    CHECK(rows[2].line == 3);
    CHECK(rows[3].fields == std::vector<std::string>{"end", "row"});
    CHECK(rows[3].line == 5);
}

TEST_CASE("csv errors carry position") {
    try {
        parse_csv("a,\"unterminated\n", "bad.csv");
        FAIL("expected input_error");
    } catch (const input_error& e) {
        CHECK(std::string(e.what()).find("bad.csv") != std::string::npos);
        CHECK(e.line() == 1);
    }
    CHECK_THROWS_AS(parse_csv("\"a\"x,b\n", "bad.csv"), input_error);
}

TEST_CASE("csv quoting roundtrip") {
    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("a,b") == "\"a,b\"");
    CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
    auto rows = parse_csv(csv_quote("a,\"b\"\nc") + "\n", "t.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].fields[0] == "a,\"b\"\nc");
}

TEST_CASE("instance directory reading") {
    fs::path dir = temp_dir("read_instance");
    write(dir / "R.csv", "_tid,A,B\n1,a,b\n2,a,c\n");
    write(dir / "S.csv", "X\nhello\nworld\n");  // no _tid: ids assigned 1..n
    Instance d = read_instance_dir(dir.string());
    CHECK(d.schema().relations().size() == 2);
    CHECK(d.at({1, {"R", "A"}}) == Value::ground("a"));
    CHECK(d.at({2, {"R", "B"}}) == Value::ground("c"));
    CHECK(d.at({2, {"S", "X"}}) == Value::ground("world"));
    CHECK(d.tuple_count() == 4);

    std::string out = write_relation_csv(d, "R");
    CHECK(out == "_tid,A,B\n1,a,b\n2,a,c\n");
}

TEST_CASE("instance directory errors name file and line") {
    fs::path dir = temp_dir("bad_instance");
    write(dir / "R.csv", "_tid,A\n1,a\n1,b\n");
    try {
        read_instance_dir(dir.string());
        FAIL("expected input_error");
    } catch (const input_error& e) {
        CHECK(e.line() == 3);
        CHECK(e.token() == "1");
        CHECK(std::string(e.what()).find("R.csv") != std::string::npos);
    }

    write(dir / "R.csv", "_tid,A\nx,a\n");
    CHECK_THROWS_AS(read_instance_dir(dir.string()), input_error);
    write(dir / "R.csv", "_tid,A\n1,a,extra\n");
    CHECK_THROWS_AS(read_instance_dir(dir.string()), input_error);
    fs::remove(dir / "R.csv");
    fs::remove(dir / "S.csv");
    CHECK_THROWS_AS(read_instance_dir(dir.string()), input_error);
}

TEST_CASE("similarity config loading") {
    fs::path dir = temp_dir("sims");
    write(dir / "pairs.csv", "723-9583,(750) 723-9583\n");
    write(dir / "sims.json",
          "{\"phone\": {\"kind\": \"table\", \"pairs\": \"pairs.csv\"},\n"
          " \"near\": {\"kind\": \"edit_distance\", \"threshold\": 2},\n"
          " \"exact\": {\"kind\": \"equality\"}}");
    auto reg = load_similarities((dir / "sims.json").string());
    CHECK(reg->has("phone"));
    CHECK(sim_eval(reg->get("phone"), Value::ground("723-9583"),
                   Value::ground("(750) 723-9583")));
    CHECK(sim_eval(reg->get("near"), Value::ground("cat"), Value::ground("cart")));
    CHECK(reg->get("exact").transitive);

    write(dir / "bad.json", "{\"x\": {\"kind\": \"cosine\"}}");
    CHECK_THROWS_AS(load_similarities((dir / "bad.json").string()), input_error);
    write(dir / "bad.json", "{\"x\": {\"kind\": \"edit_distance\"}}");
    CHECK_THROWS_AS(load_similarities((dir / "bad.json").string()), input_error);
    write(dir / "bad.json", "not json at all");
    CHECK_THROWS_AS(load_similarities((dir / "bad.json").string()), input_error);
}

TEST_CASE("schema inference from MD text") {
    std::string text =
        "# comment line\n"
        "m1: People[Phone] ~p People[Phone] -> People[Name] == People[Name]\n"
        "R[A, B] = R[A, B] -> R[C] == R[C]\n";
    auto schema = infer_schema_from_mds(text, "t.md");
    REQUIRE(schema->relations().size() == 2);
    const RelationDef* people = schema->find("People");
    REQUIRE(people != nullptr);
    CHECK(people->attrs == std::vector<std::string>{"Phone", "Name"});
    const RelationDef* r = schema->find("R");
    REQUIRE(r != nullptr);
    CHECK(r->attrs == std::vector<std::string>{"A", "B", "C"});
}
