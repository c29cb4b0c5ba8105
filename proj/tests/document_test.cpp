#include <gtest/gtest.h>

#include "test_support.hpp"

namespace tmodel {
namespace {

using testing::fixture;
using testing::fixture_text;
using testing::case_study_fixtures;

const char* const kMinimal = R"({
  "schema_version": "1.0",
  "title": "Minimal",
  "team": [],
  "assumptions": {
    "operational_environment": "",
    "security_boundaries": [],
    "use_scenarios": [],
    "exclusions": []
  },
  "devices": [
    {"id": "D1", "name": "Node", "category": "implantable", "purpose": "", "status": "",
     "attack_points": [9], "assets": []}
  ],
  "attackers": [],
  "threats": [
    {"id": "T1", "description": "jam", "violates": ["availability"],
     "targets": [{"device": "D1", "impact": "moderate"}],
     "scores": {"expertise": 2, "equipment": 2, "proximity": 2, "access_time": 2, "device_information": 2}}
  ]
}
)";

std::string schema_path_of(std::string_view text) {
    try {
        parse_document(text);
    } catch (const SchemaError& e) {
        return e.path();
    }
    return "<no SchemaError>";
}

std::string replace(std::string text, std::string_view from, std::string_view to) {
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    if (pos != std::string::npos) text.replace(pos, from.size(), to);
    return text;
}

TEST(ParseDocument, Minimal) {
    const auto doc = parse_document(kMinimal);
    EXPECT_EQ(doc.title, "Minimal");
    ASSERT_EQ(doc.threats.size(), 1u);
    EXPECT_EQ(doc.threats[0].scores, (ScoreVector{{2, 2, 2, 2, 2}}));
    EXPECT_FALSE(doc.custom_model);
    const auto list = assess_document(doc);
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0].risk_level, RiskLevel::moderate);
}

TEST(ParseDocument, MissingScoreFieldNamesPath) {
    EXPECT_EQ(schema_path_of(replace(kMinimal, R"("expertise": 2, )", "")), "threats[0].scores.expertise");
}

TEST(ParseDocument, MissingRootField) {
    EXPECT_EQ(schema_path_of(replace(kMinimal, R"("title": "Minimal",)", "")), "title");
}

TEST(ParseDocument, UnknownFieldRejected) {
    EXPECT_EQ(schema_path_of(replace(kMinimal, R"("status": "",)", R"("status": "", "colour": "red",)")),
              "devices[0].colour");
}

TEST(ParseDocument, BadEnumAndWrongType) {
    EXPECT_EQ(schema_path_of(replace(kMinimal, "implantable", "edible")), "devices[0].category");
    EXPECT_EQ(schema_path_of(replace(kMinimal, R"("attack_points": [9])", R"("attack_points": ["9"])")),
              "devices[0].attack_points[0]");
    EXPECT_EQ(schema_path_of(replace(kMinimal, R"("impact": "moderate")", R"("impact": "Moderate")")),
              "threats[0].targets[0].impact");
}

TEST(ParseDocument, UnsupportedSchemaVersion) {
    EXPECT_EQ(schema_path_of(replace(kMinimal, R"("1.0")", R"("2.0")")), "schema_version");
}

TEST(ParseDocument, CustomModelMustBeComplete) {
    const std::string text = replace(kMinimal, R"("devices": [)", R"("probability_bins": [], "devices": [)");
    EXPECT_EQ(schema_path_of(text), "scales");
}

TEST(ParseDocument, SyntaxErrorHasLineAndColumn) {
    const std::string text = replace(kMinimal, R"("title": "Minimal",)", R"("title": "Minimal",,)");
    try {
        parse_document(text);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_GT(e.column(), 0u);
        EXPECT_EQ(e.code(), "PARSE");
    }
}

TEST(ParseDocument, DuplicateKeysRejected) {
    const std::string text = replace(kMinimal, R"("title": "Minimal",)", R"("title": "A", "title": "B",)");
    EXPECT_THROW(parse_document(text), ParseError);
}

TEST(ParseDocument, Fixtures) {
    for (const auto& name : case_study_fixtures()) {
        const auto doc = fixture(name);
        const auto report = validate_document(doc);
        EXPECT_TRUE(report.errors.empty()) << name;
        EXPECT_TRUE(report.warnings.empty()) << name;
    }
}

TEST(Serialize, FixturesAreCanonical) {
    for (const auto& name : case_study_fixtures()) {
        const std::string text = fixture_text(name);
        EXPECT_EQ(serialize_document(parse_document(text)), text) << name;
    }
}

TEST(Serialize, GeneratedRoundTrip) {
    testing::DocumentGenerator gen(2024);
    for (int i = 0; i < 200; ++i) {
        const auto doc = gen.next();
        const std::string text = serialize_document(doc);
        const auto back = parse_document(text);
        ASSERT_EQ(back, doc) << text;
        ASSERT_EQ(serialize_document(back), text);
    }
}

TEST(Serialize, InjectedUnknownKeysRejected) {
    testing::DocumentGenerator gen(99);
    int rejected = 0;
    for (int i = 0; i < 50; ++i) {
        std::string text = serialize_document(gen.next());
        // Inject at the root and inside the first nested object.
        const std::string root = "{\n  \"zz_unknown\": 1,\n" + text.substr(2);
        EXPECT_THROW(parse_document(root), SchemaError);
        ++rejected;
        const auto nested = text.find("\"assumptions\": {");
        text.insert(nested + std::string_view("\"assumptions\": {").size(), "\"extra\": true,");
        EXPECT_EQ(schema_path_of(text), "assumptions.extra");
    }
    EXPECT_EQ(rejected, 50);
}

TEST(Serialize, CustomModelRoundTrips) {
    ThreatModelDocument doc = parse_document(kMinimal);
    doc.custom_model = testing::four_tier_model();
    const auto back = parse_document(serialize_document(doc));
    ASSERT_TRUE(back.custom_model);
    EXPECT_EQ(*back.custom_model, *doc.custom_model);
    EXPECT_TRUE(validate_document(back).valid());
}

TEST(Validate, BrokenReferences) {
    auto doc = fixture("d1.tmdoc.json");
    doc.threats[1].targets[0].device = "D9";
    doc.threats[0].attackers.push_back("ATK-NOBODY");
    const auto report = validate_document(doc);
    EXPECT_FALSE(report.valid());
    ASSERT_TRUE(report.has_error("REF_UNKNOWN_DEVICE"));
    EXPECT_TRUE(report.has_error("REF_UNKNOWN_ATTACKER"));
    const auto it = std::find_if(report.errors.begin(), report.errors.end(),
                                 [](const Finding& f) { return f.code == "REF_UNKNOWN_DEVICE"; });
    EXPECT_EQ(it->path, "threats[1].targets[0]");
}

TEST(Validate, DuplicatesAndEmpties) {
    auto doc = fixture("case-studies.tmdoc.json");
    doc.threats[1].id = doc.threats[0].id;
    doc.threats[2].violates.clear();
    doc.threats[3].targets.push_back(doc.threats[3].targets[0]);
    doc.devices[0].attack_points.push_back(12);
    const auto report = validate_document(doc);
    EXPECT_TRUE(report.has_error("DUPLICATE_ID"));
    EXPECT_TRUE(report.has_error("VIOLATES_EMPTY"));
    EXPECT_TRUE(report.has_error("DUPLICATE_TARGET"));
    EXPECT_TRUE(report.has_error("ATTACK_POINT_OUT_OF_RANGE"));
}

TEST(Validate, ScoresAndOverrides) {
    auto doc = fixture("d2.tmdoc.json");
    doc.threats[0].scores->values[0] = 4;
    doc.threats[1].score_overrides["D9"] = ScoreVector{{1, 1, 1, 1, 1}};
    const auto report = validate_document(doc);
    EXPECT_TRUE(report.has_error("SCORE_OUT_OF_SCALE"));
    EXPECT_TRUE(report.has_error("REF_OVERRIDE_NOT_TARGET"));
}

TEST(Validate, MethodologyWarnings) {
    ThreatModelDocument doc;
    const auto report = validate_document(doc);
    EXPECT_TRUE(report.valid());
    for (const char* code : {"STEP_TEAM_MISSING", "STEP_ENVIRONMENT_MISSING", "STEP_BOUNDARIES_MISSING",
                             "STEP_USE_SCENARIOS_MISSING", "STEP_EXCLUSIONS_MISSING", "STEP_DEVICES_MISSING",
                             "STEP_ATTACKERS_MISSING", "STEP_THREATS_MISSING"}) {
        EXPECT_TRUE(report.has_warning(code)) << code;
    }
}

TEST(Validate, OutOfScopeAttackPointAndUnusedAttacker) {
    auto doc = fixture("d1.tmdoc.json");
    doc.devices[0].attack_points.push_back(3);
    doc.attackers.push_back({"ATK-IDLE", AttackerPosition::internal, AttackerActivity::passive,
                             AttackerCardinality::individual, AttackerSophistication::unsophisticated, ""});
    const auto report = validate_document(doc);
    EXPECT_TRUE(report.valid());
    EXPECT_TRUE(report.has_warning("ATTACK_POINT_OUT_OF_SCOPE"));
    EXPECT_TRUE(report.has_warning("ATTACKER_UNUSED"));
}

TEST(Validate, AssumeWorst) {
    auto doc = fixture("d1.tmdoc.json");
    doc.threats[0].scores.reset();
    doc.threats[0].targets[0].impact.reset();
    auto strict = validate_document(doc);
    EXPECT_TRUE(strict.has_error("SCORES_MISSING"));
    EXPECT_TRUE(strict.has_error("IMPACT_MISSING"));
    auto lenient = validate_document(doc, {true});
    EXPECT_TRUE(lenient.valid());
    EXPECT_TRUE(lenient.has_warning("ASSUMED_WORST"));
    const auto resolved = resolve_assume_worst(doc);
    EXPECT_EQ(resolved.threats[0].scores, (ScoreVector{{3, 3, 3, 3, 3}}));
    EXPECT_EQ(resolved.threats[0].targets[0].impact, "high");
    EXPECT_EQ(assess_pair(resolved.threats[0], "D1", builtin_model()).risk_level, RiskLevel::very_high);
}

TEST(Validate, CustomModelViolationsAreErrors) {
    ThreatModelDocument doc = parse_document(kMinimal);
    auto model = testing::four_tier_model();
    doc.custom_model = RiskModel{model.scales, builtin_bins(), builtin_matrix()};
    const auto report = validate_document(doc);
    EXPECT_TRUE(report.has_error("BINS_COVERAGE"));
}

TEST(Scaffold, ParsesAndWarnsOnlyAboutMissingSections) {
    for (auto category : {DeviceCategory::injectable, DeviceCategory::wearable}) {
        const std::string text = scaffold_document("Pump", category);
        const auto doc = parse_document(text);
        EXPECT_EQ(doc.title, "Pump");
        EXPECT_EQ(doc.devices.at(0).category, category);
        const auto report = validate_document(doc);
        EXPECT_TRUE(report.valid());
        EXPECT_TRUE(report.has_warning("STEP_TEAM_MISSING"));
        EXPECT_TRUE(report.has_warning("STEP_ENVIRONMENT_MISSING"));
        EXPECT_EQ(serialize_document(doc), text);
        EXPECT_EQ(assess_document(doc).size(), 1u);
    }
}

}  // namespace
}  // namespace tmodel
