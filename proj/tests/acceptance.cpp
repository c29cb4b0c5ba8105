// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <cstdio>
#include <functional>
#include <iostream>

#include "test_support.hpp"
#include "tmodel_cli.hpp"

namespace {

using namespace tmodel;
namespace fs = std::filesystem;

// Each check returns an empty string on success, otherwise what went wrong.
using Check = std::function<std::string()>;

std::string case_study_totals() {
    struct Row {
        const char* id;
        ScoreVector scores;
        int total;
        const char* bin;
    };
    const Row rows[] = {
        {"T1", {{3, 3, 2, 3, 3}}, 14, "high"},     {"T2", {{1, 2, 2, 3, 3}}, 11, "moderate"},
        {"T3", {{1, 2, 3, 2, 3}}, 11, "moderate"}, {"T4", {{2, 3, 2, 3, 3}}, 13, "high"},
        {"T5", {{2, 2, 2, 3, 3}}, 12, "moderate"}, {"T6", {{1, 2, 2, 3, 3}}, 11, "moderate"},
        {"T7", {{2, 2, 2, 3, 3}}, 12, "moderate"}, {"T8", {{2, 2, 2, 3, 3}}, 12, "moderate"},
    };
    const auto doc = testing::fixture("case-studies.tmdoc.json");
    for (const auto& row : rows) {
        const Threat* t = doc.find_threat(row.id);
        if (t == nullptr || t->scores != row.scores) return std::string(row.id) + " scores differ in fixture";
        const int total = compute_probability(*t->scores, builtin_scales());
        if (total != row.total) return std::string(row.id) + " total " + std::to_string(total);
        if (bin_probability(total, builtin_bins()) != row.bin) return std::string(row.id) + " bin";
    }
    return "";
}

std::string case_study_matrices() {
    struct Expect {
        const char* file;
        const char* device;
        std::vector<std::array<std::string, 3>> cells;
    };
    const std::vector<Expect> expects{
        {"d1.tmdoc.json", "D1", {{"high", "low", "T1"}, {"moderate", "high", "T2, T3"}}},
        {"d2.tmdoc.json", "D2", {{"moderate", "low", "T5, T7, T8"}, {"moderate", "high", "T6"}}},
        {"d3.tmdoc.json", "D3", {{"high", "low", "T4"}, {"moderate", "high", "T2, T3"}}},
        {"d4.tmdoc.json", "D4", {{"moderate", "low", "T5"}, {"moderate", "high", "T6, T8"}}},
    };
    for (const auto& e : expects) {
        const auto doc = testing::fixture(e.file);
        const auto list = assess_document(doc);
        const MatrixGrid grid = build_matrix_grid(list, effective_model(doc), e.device);
        for (const auto& bin : grid.bins) {
            for (const auto& impact : grid.impacts) {
                std::string want(kEmptyCell);
                for (const auto& c : e.cells) {
                    if (c[0] == bin && c[1] == impact) want = c[2];
                }
                if (grid.cell(bin, impact) != want) {
                    return std::string(e.device) + " (" + bin + ", " + impact + ") = '" + grid.cell(bin, impact) +
                           "', want '" + want + "'";
                }
            }
        }
        // The rendered text carries the same cell contents.
        const std::string text = render_matrix_grid(doc, list, e.device);
        for (const auto& c : e.cells) {
            if (text.find(c[2]) == std::string::npos) return std::string(e.device) + " render lacks " + c[2];
        }
    }
    return "";
}

std::string t8_split_impact() {
    const auto doc = testing::fixture("case-studies.tmdoc.json");
    const Threat& t8 = *doc.find_threat("T8");
    const Assessment d2 = assess_pair(t8, "D2", builtin_model());
    const Assessment d4 = assess_pair(t8, "D4", builtin_model());
    if (d2.scores != d4.scores) return "score vectors differ";
    if (d2.risk_level != RiskLevel::low) return "D2 risk " + std::string(to_string(d2.risk_level));
    if (d4.risk_level != RiskLevel::high) return "D4 risk " + std::string(to_string(d4.risk_level));
    return "";
}

std::string score_space() {
    // Brute force with literal bounds, independent of the engine.
    std::map<std::string, std::size_t> oracle{{"low", 0}, {"moderate", 0}, {"high", 0}};
    for (int code = 0; code < 243; ++code) {
        int p = 0;
        for (int i = 0, c = code; i < 5; ++i, c /= 3) p += c % 3 + 1;
        ++oracle[p <= 7 ? "low" : p <= 12 ? "moderate" : "high"];
    }
    const std::map<std::string, std::size_t> expected{{"low", 21}, {"moderate", 201}, {"high", 21}};
    if (oracle != expected) return "oracle disagrees with expected counts";
    const auto engine = enumerate_score_space(builtin_scales(), builtin_bins());
    if (engine != expected) return "engine histogram differs";
    std::size_t sum = 0;
    for (const auto& [_, n] : engine) sum += n;
    return sum == 243 ? "" : "sum " + std::to_string(sum);
}

std::string matrix_fidelity() {
    using enum RiskLevel;
    struct Cell {
        const char* bin;
        const char* impact;
        RiskLevel level;
    };
    const Cell cells[] = {
        {"low", "low", very_low},  {"low", "moderate", moderate},      {"low", "high", high},
        {"moderate", "low", low},  {"moderate", "moderate", moderate}, {"moderate", "high", high},
        {"high", "low", moderate}, {"high", "moderate", high},         {"high", "high", very_high},
    };
    for (const auto& c : cells) {
        const auto found = builtin_matrix().find(c.bin, c.impact);
        if (found != c.level) return std::string("(") + c.bin + ", " + c.impact + ")";
    }
    std::size_t total = 0;
    for (const auto& row : builtin_matrix().cells()) total += row.size();
    return total == 9 ? "" : "matrix has " + std::to_string(total) + " cells";
}

std::string monotonicity() {
    const std::vector<std::string> impacts{"low", "moderate", "high"};
    Threat t;
    t.id = "T";
    t.targets.push_back({"D", std::nullopt, std::nullopt});
    auto risk = [&](const ScoreVector& s, const std::string& impact) {
        t.scores = s;
        t.targets[0].impact = impact;
        return assess_pair(t, "D", builtin_model()).risk_level;
    };
    int assessed = 0;
    for (int code = 0; code < 243; ++code) {
        ScoreVector s;
        for (int i = 0, c = code; i < 5; ++i, c /= 3) s.values[static_cast<std::size_t>(i)] = c % 3 + 1;
        for (std::size_t k = 0; k < impacts.size(); ++k) {
            const RiskLevel base = risk(s, impacts[k]);
            ++assessed;
            for (std::size_t i = 0; i < 5; ++i) {
                if (s.values[i] == 3) continue;
                ScoreVector up = s;
                ++up.values[i];
                if (compare_risk(risk(up, impacts[k]), base) < 0) return "score increase lowered risk";
            }
            if (k + 1 < impacts.size() && compare_risk(risk(s, impacts[k + 1]), base) < 0) {
                return "impact increase lowered risk";
            }
        }
    }
    return assessed == 729 ? "" : "assessed " + std::to_string(assessed);
}

std::string round_trip() {
    testing::DocumentGenerator gen(20240601);
    for (int i = 0; i < 150; ++i) {
        const auto doc = gen.next();
        const std::string text = serialize_document(doc);
        if (parse_document(text) != doc) return "generated document " + std::to_string(i) + " changed";
        if (serialize_document(parse_document(text)) != text) return "generated text " + std::to_string(i);
    }
    for (const auto& name : testing::case_study_fixtures()) {
        const std::string text = testing::fixture_text(name);
        if (serialize_document(parse_document(text)) != text) return name + " is not byte-stable";
    }
    return "";
}

std::string determinism() {
    const fs::path dir = fs::temp_directory_path() / "tmodel-acceptance";
    fs::create_directories(dir);
    std::ostringstream sink;
    for (const auto& name : testing::case_study_fixtures()) {
        const std::string input = (testing::fixture_dir() / name).string();
        const std::string a = (dir / (name + ".a.md")).string();
        const std::string b = (dir / (name + ".b.md")).string();
        if (cli::run({"report", input, "-o", a}, sink, sink) != 0) return name + ": report failed";
        if (cli::run({"report", input, "-o", b}, sink, sink) != 0) return name + ": report failed";
        const std::string first = testing::read_text(a);
        if (first.empty() || first != testing::read_text(b)) return name + ": reports differ";
    }
    fs::remove_all(dir);
    return "";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, Check>> criteria{
        {"AC1 case-study probability totals and bins", case_study_totals},
        {"AC2 case-study risk matrix placements", case_study_matrices},
        {"AC3 T8 split impact across D2 and D4", t8_split_impact},
        {"AC4 score-space histogram against brute-force oracle", score_space},
        {"AC5 built-in risk matrix cells", matrix_fidelity},
        {"AC6 exhaustive monotonicity", monotonicity},
        {"AC7 document round trip", round_trip},
        {"AC8 report determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        std::string problem;
        try {
            problem = check();
        } catch (const std::exception& e) {
            problem = std::string("exception: ") + e.what();
        }
        if (problem.empty()) {
            std::cout << "PASS " << name << "\n";
        } else {
            ++failed;
            std::cout << "FAIL " << name << ": " << problem << "\n";
        }
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
