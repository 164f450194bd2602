#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "reclab/catalog.hpp"
#include "reclab/config.hpp"
#include "reclab/experiment.hpp"
#include "reclab/verify.hpp"

using namespace reclab;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "schema_version": 1,
  "name": "minimal",
  "space": {"domain": "half_line", "trunc": 50, "spacing": 0.05, "mode": "lp", "p": 1},
  "weight": {"name": "exp_decay"},
  "family": {"kind": "translation"},
  "analysis": {"criterion": "liminf", "stages": 3}
})";

std::vector<ValidationProblem> problems_of(const std::string& text) {
    try {
        load_config_text(text);
    } catch (const ValidationError& e) {
        return e.problems();
    }
    return {};
}

bool names_path(const std::vector<ValidationProblem>& ps, const std::string& path) {
    for (const auto& p : ps) {
        if (p.path == path) return true;
    }
    return false;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("reclab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig instance_config(const std::string& name) {
    ExperimentConfig c = catalog_instance(name).config;
    c.output.path.clear();
    return c;
}

} // namespace

TEST_CASE("config parsing") {
    SUBCASE("minimal valid config") {
        const auto c = load_config_text(kMinimal);
        CHECK(c.name == "minimal");
        CHECK(c.weight.name == "exp_decay");
        CHECK(c.analysis.stages == 3);
        CHECK(c.analysis.eps0 == 0.5);
    }
    SUBCASE("unknown weight") {
        const auto ps = problems_of(replace(kMinimal, "exp_decay", "foo"));
        CHECK(names_path(ps, "weight.name"));
    }
    SUBCASE("p below 1") {
        const auto ps = problems_of(replace(kMinimal, "\"p\": 1", "\"p\": 0.5"));
        CHECK(names_path(ps, "space.p"));
    }
    SUBCASE("every problem is listed") {
        auto text = replace(kMinimal, "exp_decay", "foo");
        text = replace(text, "\"p\": 1", "\"p\": 0.5");
        text = replace(text, "\"stages\": 3", "\"stages\": 3, \"colour\": 2");
        const auto ps = problems_of(text);
        CHECK(names_path(ps, "weight.name"));
        CHECK(names_path(ps, "space.p"));
        CHECK(names_path(ps, "analysis.colour"));
    }
    SUBCASE("malformed text") {
        CHECK_FALSE(problems_of("{").empty());
    }
    SUBCASE("infinite bounds are spelled as strings") {
        const auto c = load_config_text(replace(kMinimal, "\"trunc\": 50", "\"trunc\": 50, \"high\": \"inf\""));
        CHECK(std::isinf(c.space.high));
    }
    SUBCASE("matrix analyses respect the cap") {
        auto text = replace(kMinimal, "\"spacing\": 0.05", "\"grid_points\": 1000000");
        text = replace(text, "\"stages\": 3", "\"stages\": 3, \"operations\": [\"spectrum\"]");
        CHECK(names_path(problems_of(text), "space.grid_points"));
    }
}

TEST_CASE("canonical text and hash") {
    const auto c = load_config_text(kMinimal);
    const auto again = load_config_text(to_text(c));
    CHECK(to_text(again) == to_text(c));
    CHECK(config_hash(again) == config_hash(c));
    auto moved = c;
    moved.output.path = "/elsewhere";
    CHECK(config_hash(moved) == config_hash(c));
    auto changed = c;
    changed.analysis.eps0 = 0.25;
    CHECK(config_hash(changed) != config_hash(c));
    CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("catalog") {
    const auto& all = catalog();
    CHECK(all.size() == 9);
    for (const auto& inst : all) {
        CAPTURE(inst.name);
        CHECK(validate(inst.config).empty());
        CHECK_FALSE(inst.basis.empty());
    }
    CHECK(catalog_instance("halfline-expdecay").expected_recurrent);
    CHECK(catalog_instance("line-symmetric").expected_recurrent);
    CHECK_FALSE(catalog_instance("halfline-flat").expected_recurrent);
    CHECK_THROWS_AS(catalog_instance("nope"), Error);
    const auto listing = emit_catalog();
    CHECK(listing.find("halfline-expdecay") != std::string::npos);
    CHECK(listing.find("line-symmetric") != std::string::npos);
}

TEST_CASE("runs") {
    SUBCASE("recurrent instance") {
        const auto rec = run(instance_config("halfline-expdecay"));
        CHECK(rec.exit_status == 0);
        CHECK(rec.error.empty());
        REQUIRE(rec.criterion.has_value());
        CHECK(rec.criterion->holds);
        REQUIRE(rec.construction.has_value());
        CHECK(rec.construction->certified);
        CHECK(rec.construction->stages.size() == 6);
        REQUIRE_FALSE(rec.consistency.empty());
        CHECK(rec.consistency.front().status == ConsistencyStatus::Agree);
    }
    SUBCASE("non-recurrent instance") {
        const auto rec = run(instance_config("halfline-flat"));
        CHECK(rec.exit_status == 0);
        REQUIRE(rec.criterion.has_value());
        CHECK_FALSE(rec.criterion->holds);
        CHECK_FALSE(rec.construction.has_value());
        for (const auto& d : rec.detectors) CHECK(d.report.verdict != Verdict::WitnessFound);
    }
    SUBCASE("oversized matrix request is an execution error") {
        auto c = instance_config("halfline-growing");
        c.space.grid_points = 1000000;
        const auto rec = run(c);
        CHECK(rec.exit_status == 1);
        CHECK(rec.error.find("cap") != std::string::npos);
    }
    SUBCASE("a contradicted necessary criterion exits 2") {
        auto c = instance_config("halfline-flat");
        c.analysis.operations = {"admissibility", "criterion", "direct_scan", "cross_validate"};
        c.analysis.detector = "direct_scan";
        c.analysis.detector_tol = 1.5;  // above ||T(t)f - f|| = 1, so every time "returns"
        const auto rec = run(c);
        CHECK(rec.exit_status == 2);
        REQUIRE_FALSE(rec.consistency.empty());
        CHECK(rec.consistency.front().status == ConsistencyStatus::CriterionNoDetectorYes);
        CHECK_FALSE(rec.consistency.front().criterion_evidence.empty());
    }
}

TEST_CASE("reports") {
    SUBCASE("csv layout") {
        std::vector<ReportRow> rows{
            {"b", "x", "q", 2.0, 0.1, 1e-3, 10.0, false, "m"},
            {"a", "y", "q", std::nullopt, 1.0 / 3.0, 1e-3, 10.0, true, "m"},
            {"a", "x", "q", 1.0, 2.0, 1e-3, 10.0, false, "m"},
        };
        const auto csv = rows_to_csv(rows);
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        CHECK(line == "instance,analysis,quantity,t_or_x,value,tol,horizon,truncated,method");
        std::getline(in, line);
        CHECK(line.rfind("a,x,", 0) == 0);
        std::getline(in, line);
        CHECK(line == "a,y,q,,0.33333333333333331,0.001,10,1,m");
        std::getline(in, line);
        CHECK(line.rfind("b,x,", 0) == 0);
    }
    SUBCASE("reruns are byte-identical") {
        const auto c = instance_config("halfline-expdecay");
        const auto a = scratch("a");
        const auto b = scratch("b");
        write_reports(run(c), a.string(), "csv");
        write_reports(run(c), b.string(), "csv");
        for (const auto* f : {"halfline-expdecay.csv", "halfline-expdecay.summary.json"}) {
            CAPTURE(f);
            const auto x = slurp(a / f);
            CHECK_FALSE(x.empty());
            CHECK(x == slurp(b / f));
        }
        CHECK(slurp(a / "halfline-expdecay.summary.json").find("wall") == std::string::npos);
        const auto s = scratch("s");
        write_reports(run(c), s.string(), "structured");
        CHECK(fs::exists(s / "halfline-expdecay.json"));
    }
}

TEST_CASE("invariant suites") {
    SUBCASE("all pass") {
        const auto s = verify_theorems({"all"});
        CHECK(s.entries.size() >= verify_suite_names().size());
        CHECK(s.all_passed());
        CHECK(s.exit_status() == 0);
        CHECK(format_summary(s).find("FAIL") == std::string::npos);
    }
    SUBCASE("tampered tolerance is a named failure") {
        VerifyOptions o;
        o.tamper = "rotation";
        const auto s = verify_theorems({"rotation"}, o);
        CHECK(s.exit_status() == 1);
        CHECK(format_summary(s).find("FAIL rotation:") != std::string::npos);
    }
    SUBCASE("empty selector is a no-op") {
        const auto s = verify_theorems({});
        CHECK(s.entries.empty());
        CHECK(s.exit_status() == 0);
    }
    SUBCASE("unknown suite") {
        CHECK_THROWS_AS(verify_theorems({"nope"}), Error);
    }
}
