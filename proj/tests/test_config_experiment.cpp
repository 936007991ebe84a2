#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "recur2d/acceptance.hpp"
#include "recur2d/error.hpp"
#include "recur2d/experiment.hpp"

using namespace recur2d;

namespace {

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigInvalid);
        return e.what();
    }
    FAIL("no exception");
    return {};
}

Json llt_doc() {
    return Json::parse(R"({"schema_version": 1, "kind": "llt", "seed": 3, "workers": 1, "system": "lazy5",
                           "params": {"n": 40, "checkpoints": [10, 40]}})");
}

}  // namespace

TEST_CASE("config layout is strict") {
    Json d = llt_doc();
    CHECK(parse_config(d).kind == "llt");
    d["colour"] = "red";
    CHECK(message_of([&] { parse_config(d); }).find("$.colour") != std::string::npos);
    d = llt_doc();
    d["schema_version"] = 2;
    CHECK(message_of([&] { parse_config(d); }).find("$.schema_version") != std::string::npos);
    d = llt_doc();
    d["kind"] = "teleport";
    message_of([&] { parse_config(d); });
    d = llt_doc();
    d["workers"] = 0;
    message_of([&] { parse_config(d); });
}

TEST_CASE("unknown parameters are reported by path") {
    Json d = llt_doc();
    d["params"]["n_steps"] = 5;
    const auto msg = message_of([&] { run_experiment(parse_config(d)); });
    CHECK(msg.find("$.params.n_steps") != std::string::npos);
    d = llt_doc();
    d["tolerances"] = {{"x", 1}};
    CHECK(message_of([&] { run_experiment(parse_config(d)); }).find("$.tolerances.x") != std::string::npos);
}

TEST_CASE("param reader types") {
    const Json j = Json::parse(R"({"a": 2.0, "b": 2.5, "c": "s", "d": [1, 2], "e": {"f": true}})");
    ParamReader r(j, "$.p");
    CHECK(r.integer("a") == 2);
    CHECK(message_of([&] { r.integer("b"); }).find("$.p.b") != std::string::npos);
    CHECK(r.number("b") == 2.5);
    CHECK(r.string("c") == "s");
    CHECK(r.integers("d") == std::vector<int>{1, 2});
    ParamReader e = r.child("e");
    CHECK(e.boolean("f"));
    e.finish();
    CHECK(r.number("missing", 7.0) == 7.0);
    r.finish();
    ParamReader r2(j, "$.p");
    r2.number("a");
    CHECK(message_of([&] { r2.finish(); }).find("$.p.") != std::string::npos);
}

TEST_CASE("explicit systems") {
    const Json sys = Json::parse(R"({"symbols": ["a", "b"], "transition": [[1, 1], [1, 1]],
                                      "potential": {"a,b": 0.5},
                                      "observable": {"a": [1, 0], "b": [-1, 0]}})");
    const System s = resolve_system(sys);
    CHECK(s.measure.size() == 2);
    REQUIRE(s.observable.has_value());
    CHECK((*s.observable)(0, 1).x == 1);
    CHECK(resolve_system(Json("golden_mean")).measure.size() == 2);
    CHECK(resolve_system(Json::parse(R"({"builtin": "srw4"})")).measure.size() == 4);
    message_of([] { resolve_system(Json::parse(R"({"symbols": ["a", "b"], "transition": [[0, 1], [1, 0]]})")); });
}

TEST_CASE("windows from names") {
    const System s = resolve_system(Json("lazy5"));
    const Window w = parse_window(s.measure.sft(), Json::parse(R"(["E", "R", "W"])"), true, "$.w");
    CHECK(w.radius() == 1);
    message_of([&] { parse_window(s.measure.sft(), Json::parse(R"(["E", "R"])"), true, "$.w"); });
    message_of([&] { parse_window(s.measure.sft(), Json::parse(R"(["E", "Q", "R"])"), true, "$.w"); });
}

TEST_CASE("fnv1a") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("number formatting round trips") {
    for (double v : {0.1, 1.0 / 3.0, 5.0 / (4.0 * 3.141592653589793), 1e-300, 12345.0}) {
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(INFINITY) == "inf");
    CsvText csv({"a", "b"});
    csv.cell(1.5).cell(std::int64_t{3});
    csv.end_row();
    CHECK(csv.str() == "a,b\n1.5,3\n");
}

TEST_CASE("manifest digest ignores workers and wall time") {
    ExperimentConfig c = parse_config(llt_doc());
    const RunResult a = run_experiment(c);
    c.workers = 4;
    const RunResult b = run_experiment(c);
    CHECK(a.manifest.at("manifest_digest") == b.manifest.at("manifest_digest"));
    CHECK(a.manifest.at("config_digest") == b.manifest.at("config_digest"));
    c.seed = 4;
    CHECK(run_experiment(c).manifest.at("config_digest") != a.manifest.at("config_digest"));
    CHECK(a.artifacts.at(0).name == "zero_series.csv");
    CHECK(a.summary.at("checkpoints").size() == 2);
}

TEST_CASE("outputs are written") {
    const auto dir = std::filesystem::temp_directory_path() / "recur2d_test_outputs";
    std::filesystem::remove_all(dir);
    const RunResult r = run_experiment(parse_config(llt_doc()));
    write_outputs(r, dir.string());
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    CHECK(std::filesystem::exists(dir / "summary.json"));
    std::ifstream is(dir / "zero_series.csv");
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str() == r.artifacts.at(0).content);
    std::filesystem::remove_all(dir);
}

TEST_CASE("every kind has a runnable default") {
    for (const auto& kind : experiment_kinds()) CHECK_NOTHROW(parse_config(default_config(kind)));
}

TEST_CASE("shipped acceptance config matches the built-in suite") {
    std::ifstream is(RECUR2D_SOURCE_DIR "/config/accept.json");
    REQUIRE(is.good());
    CHECK(Json::parse(is) == default_acceptance_config());
    const Json d = default_acceptance_config();
    for (int id = 1; id <= kCriterionCount; ++id) {
        CHECK(d.at("params").contains("c" + std::to_string(id)));
        CHECK(d.at("tolerances").contains("c" + std::to_string(id)));
    }
}

TEST_CASE("acceptance rejects unknown criterion keys") {
    Json d = smoke_acceptance_config();
    d["params"]["c16"] = Json::object();
    message_of([&] { run_experiment(parse_config(d)); });
    d = smoke_acceptance_config();
    d["tolerances"]["c1"]["eigen"] = 1;
    RunOptions o;
    o.only = {1};
    message_of([&] { run_experiment(parse_config(d), o); });
}
