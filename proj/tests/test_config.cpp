#include <doctest.h>

#include <json.hpp>

#include "mvm/config.hpp"
#include "mvm/report.hpp"

using namespace mvm;
using nlohmann::json;

namespace {

json base_config() {
    return json{
        {"support", {-1.0, 0.0, 1.0}},
        {"weights", {0.25, 0.5, 0.25}},
        {"controls", {"id", "zero", json{{"scale_id", 0.5}}, json{{"scale_id", 2.0}}}},
        {"beta", 1.0},
        {"cost", {{"kind", "ex91"}, {"phi", "tanh"}, {"rho_bar", "id"}, {"alpha", 0.5}}},
        {"mesh", 10},
        {"dt", 1e-3},
        {"horizon", 1.0},
        {"paths", 100},
        {"seed", 7},
    };
}

} // namespace

TEST_CASE("config parsing expands names to vectors") {
    RunConfig cfg = parse_run_config(base_config());
    REQUIRE(cfg.controls.size() == 4);
    CHECK(cfg.controls[0].values == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(cfg.controls[1].values == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(cfg.controls[2].values == std::vector<double>{-0.5, 0.0, 0.5});
    CHECK(cfg.controls[3].values == std::vector<double>{-2.0, 0.0, 2.0});
    CHECK(cfg.control.kind == "constant");
    CHECK(cfg.control.values == cfg.controls[0].values);
}

TEST_CASE("config errors name the field") {
    json doc = base_config();
    doc.erase("weights");
    CHECK_THROWS_WITH_AS(parse_run_config(doc), doctest::Contains("weights"), ConfigError);

    doc = base_config();
    doc["weights"] = {0.5, 0.5};
    CHECK_THROWS_WITH_AS(parse_run_config(doc), doctest::Contains("weights"), ConfigError);

    doc = base_config();
    doc["cost"]["kind"] = "unknown";
    CHECK_THROWS_WITH_AS(parse_run_config(doc), doctest::Contains("cost.kind"), ConfigError);

    doc = base_config();
    doc["dt"] = -1.0;
    CHECK_THROWS_WITH_AS(parse_run_config(doc), doctest::Contains("dt"), ConfigError);
}

TEST_CASE("config echo round-trips to an identical config") {
    RunConfig cfg = parse_run_config(base_config());
    RunConfig again = parse_run_config(json::parse(cfg.echo_json));
    CHECK(again.weights == cfg.weights);
    CHECK(again.beta == cfg.beta);
    CHECK(again.mesh == cfg.mesh);
    CHECK(again.dt == cfg.dt);
    CHECK(again.horizon == cfg.horizon);
    CHECK(again.paths == cfg.paths);
    CHECK(again.seed == cfg.seed);
    CHECK(again.cost.kind == cfg.cost.kind);
    REQUIRE(again.controls.size() == cfg.controls.size());
    for (std::size_t i = 0; i < cfg.controls.size(); ++i)
        CHECK(again.controls[i].values == cfg.controls[i].values);
    CHECK(again.control.values == cfg.control.values);
    // And the echo of the echo is textually stable.
    CHECK(again.echo_json == cfg.echo_json);
}

TEST_CASE("table costs need matching dimensions") {
    json doc = base_config();
    doc["cost"] = {{"kind", "table"}, {"values", {1.0, 2.0}}};
    RunConfig cfg = parse_run_config(doc);
    CHECK_THROWS_WITH_AS(make_hjb_problem(cfg, 1), doctest::Contains("cost.values"), ConfigError);
}

TEST_CASE("documents carry the schema tag and deterministic records") {
    McResult r;
    r.estimate = 1.25;
    r.std_error = 0.01;
    r.paths = 100;
    auto doc = make_document("simulate", "", {mc_record(r)}, 0.5);
    CHECK(doc["schema"] == "mvm/1");
    CHECK(doc["records"][0]["estimate"] == 1.25);
    CHECK(doc.contains("meta"));

    auto empty = make_document("simulate", "", {}, 0.0);
    CHECK(empty["records"].is_array());
    CHECK(empty["records"].empty());
}
