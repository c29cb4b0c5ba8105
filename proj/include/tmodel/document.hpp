#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tmodel/catalog.hpp"
#include "tmodel/core.hpp"

namespace tmodel {

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error("PARSE", "line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + message),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed text that does not match the document schema.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& message)
        : Error("SCHEMA", (path.empty() ? std::string("<root>") : path) + ": " + message),
          path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct Finding {
    std::string code;
    std::string path;
    std::string message;

    friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
    std::vector<Finding> errors;
    std::vector<Finding> warnings;

    bool valid() const noexcept { return errors.empty(); }

    bool has_error(std::string_view code) const {
        return std::any_of(errors.begin(), errors.end(), [&](const Finding& f) { return f.code == code; });
    }
    bool has_warning(std::string_view code) const {
        return std::any_of(warnings.begin(), warnings.end(),
                           [&](const Finding& f) { return f.code == code; });
    }
};

struct ValidationOptions {
    bool assume_worst = false;
};

inline constexpr std::string_view kDocumentExtension = ".tmdoc.json";

namespace detail {

using Json = nlohmann::ordered_json;

inline std::string join_path(const std::string& base, std::string_view key) {
    if (base.empty()) return std::string(key);
    return base + "." + std::string(key);
}

inline std::string index_path(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

inline std::string_view type_name(const Json& j) {
    if (j.is_null()) return "null";
    if (j.is_boolean()) return "boolean";
    if (j.is_number_integer()) return "integer";
    if (j.is_number()) return "number";
    if (j.is_string()) return "string";
    if (j.is_array()) return "array";
    return "object";
}

/// Walks one JSON object, recording which keys were consumed so that any
/// leftover key can be rejected.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string path) : json_(j), path_(std::move(path)) {
        if (!json_.is_object()) {
            throw SchemaError(path_, "expected object, found " + std::string(type_name(json_)));
        }
    }

    const std::string& path() const noexcept { return path_; }

    const Json* optional(std::string_view key) {
        auto it = json_.find(std::string(key));
        if (it == json_.end()) return nullptr;
        used_.insert(std::string(key));
        return &*it;
    }

    const Json& required(std::string_view key) {
        if (const Json* j = optional(key)) return *j;
        throw SchemaError(join_path(path_, key), "missing required field");
    }

    std::string string(std::string_view key) { return as_string(required(key), join_path(path_, key)); }

    bool boolean(std::string_view key) {
        const Json& j = required(key);
        if (!j.is_boolean()) throw wrong_type(key, "boolean", j);
        return j.get<bool>();
    }

    int integer(std::string_view key) { return as_int(required(key), join_path(path_, key)); }

    const Json& array(std::string_view key) {
        const Json& j = required(key);
        if (!j.is_array()) throw wrong_type(key, "array", j);
        return j;
    }

    std::vector<std::string> string_list(std::string_view key) {
        return as_string_list(array(key), join_path(path_, key));
    }

    std::vector<std::string> optional_string_list(std::string_view key) {
        const Json* j = optional(key);
        if (j == nullptr) return {};
        if (!j->is_array()) throw wrong_type(key, "array", *j);
        return as_string_list(*j, join_path(path_, key));
    }

    void finish() const {
        for (auto it = json_.begin(); it != json_.end(); ++it) {
            if (!used_.contains(it.key())) throw SchemaError(join_path(path_, it.key()), "unknown field");
        }
    }

    static std::string as_string(const Json& j, const std::string& path) {
        if (!j.is_string()) {
            throw SchemaError(path, "expected string, found " + std::string(type_name(j)));
        }
        return j.get<std::string>();
    }

    static int as_int(const Json& j, const std::string& path) {
        if (!j.is_number_integer()) {
            throw SchemaError(path, "expected integer, found " + std::string(type_name(j)));
        }
        const auto v = j.get<std::int64_t>();
        if (v < -1'000'000 || v > 1'000'000) throw SchemaError(path, "integer out of supported range");
        return static_cast<int>(v);
    }

    static std::vector<std::string> as_string_list(const Json& j, const std::string& path) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], index_path(path, i)));
        return out;
    }

private:
    SchemaError wrong_type(std::string_view key, std::string_view expected, const Json& found) const {
        return SchemaError(join_path(path_, key), "expected " + std::string(expected) + ", found " +
                                                      std::string(type_name(found)));
    }

    const Json& json_;
    std::string path_;
    std::set<std::string> used_;
};

template <typename Enum, typename ParseFn>
Enum parse_enum(const Json& j, const std::string& path, ParseFn parse,
                const std::vector<std::string_view>& allowed) {
    const std::string text = ObjectReader::as_string(j, path);
    if (auto v = parse(text)) return *v;
    std::string list;
    for (auto a : allowed) list += (list.empty() ? "" : "|") + std::string(a);
    throw SchemaError(path, "invalid value '" + text + "', expected one of " + list);
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

inline Json parse_json_strict(std::string_view text) {
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
        throw ParseError(1, 1, "byte order mark is not allowed");
    }
    // Duplicate keys would otherwise be merged silently.
    std::vector<std::set<std::string>> open_objects;
    std::optional<std::string> duplicate;
    auto on_event = [&](int, Json::parse_event_t event, Json& parsed) {
        switch (event) {
            case Json::parse_event_t::object_start: open_objects.emplace_back(); break;
            case Json::parse_event_t::object_end:
                if (!open_objects.empty()) open_objects.pop_back();
                break;
            case Json::parse_event_t::key:
                if (!open_objects.empty() && !open_objects.back().insert(parsed.get<std::string>()).second &&
                    !duplicate) {
                    duplicate = parsed.get<std::string>();
                }
                break;
            default: break;
        }
        return true;
    };
    try {
        Json j = Json::parse(text.begin(), text.end(), on_event);
        if (duplicate) throw ParseError(0, 0, "duplicate object key '" + *duplicate + "'");
        return j;
    } catch (const Json::parse_error& e) {
        // e.byte is 1-based and points one past the offending character.
        const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::string message = e.what();
        if (auto pos = message.find("syntax error"); pos != std::string::npos) message = message.substr(pos);
        throw ParseError(line, column, message);
    }
}

inline ScoreVector parse_scores(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    ScoreVector scores;
    for (auto id : kProbabilityCharacteristics) scores[id] = r.integer(to_string(id));
    r.finish();
    return scores;
}

inline Json scores_json(const ScoreVector& scores) {
    Json j = Json::object();
    for (auto id : kProbabilityCharacteristics) j[std::string(to_string(id))] = scores[id];
    return j;
}

template <typename Fn>
auto as_schema_error(const std::string& path, Fn&& build) {
    try {
        return build();
    } catch (const InvariantError& e) {
        throw SchemaError(path, e.what());
    }
}

inline RiskModel parse_custom_model(const Json* scales_j, const Json* bins_j, const Json* matrix_j) {
    ObjectReader sr(*scales_j, "scales");
    std::array<ScaleSet::TierList, kCharacteristicCount> tiers;
    for (auto id : kAllCharacteristics) {
        const std::string path = join_path("scales", to_string(id));
        const Json& list = sr.array(to_string(id));
        for (std::size_t i = 0; i < list.size(); ++i) {
            ObjectReader tr(list[i], index_path(path, i));
            ScaleTier tier{tr.string("label"), tr.integer("value"), tr.string("description")};
            tr.finish();
            tiers[index_of(id)].push_back(std::move(tier));
        }
    }
    sr.finish();
    ScaleSet scales = as_schema_error("scales", [&] { return ScaleSet(std::move(tiers)); });

    if (!bins_j->is_array()) throw SchemaError("probability_bins", "expected array");
    std::vector<ProbabilityBin> bin_list;
    for (std::size_t i = 0; i < bins_j->size(); ++i) {
        ObjectReader br((*bins_j)[i], index_path("probability_bins", i));
        ProbabilityBin bin{br.string("label"), br.integer("min"), br.integer("max")};
        br.finish();
        bin_list.push_back(std::move(bin));
    }
    ProbabilityBins bins =
        as_schema_error("probability_bins", [&] { return ProbabilityBins(std::move(bin_list)); });

    if (!matrix_j->is_object() || matrix_j->empty()) {
        throw SchemaError("risk_matrix", "expected non-empty object keyed by bin label");
    }
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    std::vector<std::vector<RiskLevel>> cells;
    for (auto row = matrix_j->begin(); row != matrix_j->end(); ++row) {
        const std::string row_path = join_path("risk_matrix", row.key());
        if (!row->is_object()) throw SchemaError(row_path, "expected object keyed by impact label");
        std::vector<std::string> row_columns;
        std::vector<RiskLevel> row_cells;
        for (auto cell = row->begin(); cell != row->end(); ++cell) {
            const std::string cell_path = join_path(row_path, cell.key());
            row_columns.push_back(cell.key());
            row_cells.push_back(parse_enum<RiskLevel>(
                cell.value(), cell_path, parse_risk_level,
                {"very_low", "low", "moderate", "high", "very_high"}));
        }
        if (rows.empty()) {
            columns = row_columns;
        } else if (row_columns != columns) {
            throw SchemaError(row_path, "MATRIX_TOTAL: every row must list the same impact labels in the same order");
        }
        rows.push_back(row.key());
        cells.push_back(std::move(row_cells));
    }
    RiskMatrix matrix = as_schema_error("risk_matrix", [&] {
        return RiskMatrix(std::move(rows), std::move(columns), std::move(cells));
    });
    return RiskModel{std::move(scales), std::move(bins), std::move(matrix)};
}

inline Json custom_model_json(const RiskModel& model) {
    Json scales = Json::object();
    for (auto id : kAllCharacteristics) {
        Json list = Json::array();
        for (const auto& t : model.scales.tiers(id)) {
            Json tier = Json::object();
            tier["label"] = t.label;
            tier["value"] = t.value;
            tier["description"] = t.description;
            list.push_back(std::move(tier));
        }
        scales[std::string(to_string(id))] = std::move(list);
    }
    Json bins = Json::array();
    for (const auto& b : model.bins.bins()) {
        Json bin = Json::object();
        bin["label"] = b.label;
        bin["min"] = b.min;
        bin["max"] = b.max;
        bins.push_back(std::move(bin));
    }
    Json matrix = Json::object();
    for (std::size_t r = 0; r < model.matrix.bin_labels().size(); ++r) {
        Json row = Json::object();
        for (std::size_t c = 0; c < model.matrix.impact_labels().size(); ++c) {
            row[model.matrix.impact_labels()[c]] = std::string(to_string(model.matrix.cells()[r][c]));
        }
        matrix[model.matrix.bin_labels()[r]] = std::move(row);
    }
    Json out = Json::object();
    out["scales"] = std::move(scales);
    out["probability_bins"] = std::move(bins);
    out["risk_matrix"] = std::move(matrix);
    return out;
}

}  // namespace detail

/// Parses a document in the canonical JSON format. Strict: unknown fields,
/// duplicate keys, wrong types and unknown enum strings are rejected.
inline ThreatModelDocument parse_document(std::string_view text) {
    using detail::index_path;
    using detail::join_path;
    using detail::Json;
    using detail::ObjectReader;
    using detail::parse_enum;

    const Json root = detail::parse_json_strict(text);
    ObjectReader r(root, "");
    ThreatModelDocument doc;

    doc.schema_version = r.string("schema_version");
    if (doc.schema_version != kSchemaVersion) {
        throw SchemaError("schema_version", "unsupported schema version '" + doc.schema_version +
                                                "', expected '" + std::string(kSchemaVersion) + "'");
    }
    doc.title = r.string("title");

    const Json& team = r.array("team");
    for (std::size_t i = 0; i < team.size(); ++i) {
        ObjectReader m(team[i], index_path("team", i));
        doc.team.push_back({m.string("name"), m.string("discipline")});
        m.finish();
    }

    {
        ObjectReader a(r.required("assumptions"), "assumptions");
        doc.assumptions.operational_environment = a.string("operational_environment");
        doc.assumptions.security_boundaries = a.string_list("security_boundaries");
        doc.assumptions.use_scenarios = a.string_list("use_scenarios");
        doc.assumptions.exclusions = a.string_list("exclusions");
        a.finish();
    }

    const Json* scales_j = r.optional("scales");
    const Json* bins_j = r.optional("probability_bins");
    const Json* matrix_j = r.optional("risk_matrix");
    const int supplied = (scales_j != nullptr) + (bins_j != nullptr) + (matrix_j != nullptr);
    if (supplied != 0 && supplied != 3) {
        const char* missing = scales_j == nullptr ? "scales"
                              : bins_j == nullptr ? "probability_bins"
                                                  : "risk_matrix";
        throw SchemaError(missing,
                          "custom scales, probability_bins and risk_matrix must be supplied together");
    }
    if (supplied == 3) doc.custom_model = detail::parse_custom_model(scales_j, bins_j, matrix_j);
    const std::vector<std::string> impact_keys = effective_model(doc).scales.impact_keys();

    const Json& devices = r.array("devices");
    for (std::size_t i = 0; i < devices.size(); ++i) {
        const std::string path = index_path("devices", i);
        ObjectReader d(devices[i], path);
        Device dev;
        dev.id = d.string("id");
        dev.name = d.string("name");
        dev.category = parse_enum<DeviceCategory>(d.required("category"), join_path(path, "category"),
                                                  parse_DeviceCategory, detail::names(kDeviceCategoryNames));
        dev.purpose = d.string("purpose");
        dev.status = d.string("status");
        const Json& points = d.array("attack_points");
        for (std::size_t k = 0; k < points.size(); ++k) {
            dev.attack_points.push_back(
                ObjectReader::as_int(points[k], index_path(join_path(path, "attack_points"), k)));
        }
        const Json& assets = d.array("assets");
        for (std::size_t k = 0; k < assets.size(); ++k) {
            const std::string apath = index_path(join_path(path, "assets"), k);
            ObjectReader a(assets[k], apath);
            Asset asset;
            asset.id = a.string("id");
            asset.name = a.string("name");
            asset.tangible = a.boolean("tangible");
            asset.description = a.string("description");
            if (const Json* goals = a.optional("privacy_goals")) {
                const std::string gpath = join_path(apath, "privacy_goals");
                if (!goals->is_array()) throw SchemaError(gpath, "expected array");
                for (std::size_t g = 0; g < goals->size(); ++g) {
                    asset.privacy_goals.push_back(parse_enum<PrivacyGoal>(
                        (*goals)[g], index_path(gpath, g), parse_PrivacyGoal,
                        detail::names(kPrivacyGoalNames)));
                }
            }
            a.finish();
            dev.assets.push_back(std::move(asset));
        }
        d.finish();
        doc.devices.push_back(std::move(dev));
    }

    const Json& attackers = r.array("attackers");
    for (std::size_t i = 0; i < attackers.size(); ++i) {
        const std::string path = index_path("attackers", i);
        ObjectReader a(attackers[i], path);
        AttackerProfile p;
        p.id = a.string("id");
        p.position = parse_enum<AttackerPosition>(a.required("position"), join_path(path, "position"),
                                                  parse_AttackerPosition,
                                                  detail::names(kAttackerPositionNames));
        p.activity = parse_enum<AttackerActivity>(a.required("activity"), join_path(path, "activity"),
                                                  parse_AttackerActivity,
                                                  detail::names(kAttackerActivityNames));
        p.cardinality = parse_enum<AttackerCardinality>(
            a.required("cardinality"), join_path(path, "cardinality"), parse_AttackerCardinality,
            detail::names(kAttackerCardinalityNames));
        p.sophistication = parse_enum<AttackerSophistication>(
            a.required("sophistication"), join_path(path, "sophistication"),
            parse_AttackerSophistication, detail::names(kAttackerSophisticationNames));
        p.description = a.string("description");
        a.finish();
        doc.attackers.push_back(std::move(p));
    }

    const Json& threats = r.array("threats");
    for (std::size_t i = 0; i < threats.size(); ++i) {
        const std::string path = index_path("threats", i);
        ObjectReader t(threats[i], path);
        Threat threat;
        threat.id = t.string("id");
        threat.description = t.string("description");
        const Json& violates = t.array("violates");
        for (std::size_t k = 0; k < violates.size(); ++k) {
            threat.violates.push_back(parse_enum<SecurityProperty>(
                violates[k], index_path(join_path(path, "violates"), k), parse_SecurityProperty,
                detail::names(kSecurityPropertyNames)));
        }
        threat.stride_tags = t.optional_string_list("stride_tags");
        threat.attackers = t.optional_string_list("attackers");
        const Json& targets = t.array("targets");
        for (std::size_t k = 0; k < targets.size(); ++k) {
            const std::string tpath = index_path(join_path(path, "targets"), k);
            ObjectReader g(targets[k], tpath);
            ThreatTarget target;
            target.device = g.string("device");
            if (const Json* impact = g.optional("impact")) {
                const std::string ipath = join_path(tpath, "impact");
                const std::string label = ObjectReader::as_string(*impact, ipath);
                if (std::find(impact_keys.begin(), impact_keys.end(), label) == impact_keys.end()) {
                    std::string list;
                    for (const auto& key : impact_keys) list += (list.empty() ? "" : "|") + key;
                    throw SchemaError(ipath, "invalid value '" + label + "', expected one of " + list);
                }
                target.impact = label;
            }
            if (const Json* rationale = g.optional("impact_rationale")) {
                target.impact_rationale =
                    ObjectReader::as_string(*rationale, join_path(tpath, "impact_rationale"));
            }
            g.finish();
            threat.targets.push_back(std::move(target));
        }
        if (const Json* scores = t.optional("scores")) {
            threat.scores = detail::parse_scores(*scores, join_path(path, "scores"));
        }
        if (const Json* overrides = t.optional("score_overrides")) {
            const std::string opath = join_path(path, "score_overrides");
            if (!overrides->is_object()) throw SchemaError(opath, "expected object keyed by device id");
            for (auto it = overrides->begin(); it != overrides->end(); ++it) {
                threat.score_overrides.emplace(it.key(),
                                               detail::parse_scores(it.value(), join_path(opath, it.key())));
            }
        }
        t.finish();
        doc.threats.push_back(std::move(threat));
    }

    r.finish();
    return doc;
}

/// Canonical text: schema key order, two-space indentation, trailing newline.
/// Optional lists are omitted when empty.
inline std::string serialize_document(const ThreatModelDocument& doc) {
    using detail::Json;
    Json root = Json::object();
    root["schema_version"] = doc.schema_version;
    root["title"] = doc.title;

    Json team = Json::array();
    for (const auto& m : doc.team) {
        Json member = Json::object();
        member["name"] = m.name;
        member["discipline"] = m.discipline;
        team.push_back(std::move(member));
    }
    root["team"] = std::move(team);

    Json assumptions = Json::object();
    assumptions["operational_environment"] = doc.assumptions.operational_environment;
    assumptions["security_boundaries"] = doc.assumptions.security_boundaries;
    assumptions["use_scenarios"] = doc.assumptions.use_scenarios;
    assumptions["exclusions"] = doc.assumptions.exclusions;
    root["assumptions"] = std::move(assumptions);

    if (doc.custom_model) {
        const Json model = detail::custom_model_json(*doc.custom_model);
        for (const auto& [key, value] : model.items()) root[key] = value;
    }

    Json devices = Json::array();
    for (const auto& d : doc.devices) {
        Json dev = Json::object();
        dev["id"] = d.id;
        dev["name"] = d.name;
        dev["category"] = std::string(to_string(d.category));
        dev["purpose"] = d.purpose;
        dev["status"] = d.status;
        dev["attack_points"] = d.attack_points;
        Json assets = Json::array();
        for (const auto& a : d.assets) {
            Json asset = Json::object();
            asset["id"] = a.id;
            asset["name"] = a.name;
            asset["tangible"] = a.tangible;
            asset["description"] = a.description;
            if (!a.privacy_goals.empty()) {
                Json goals = Json::array();
                for (auto g : a.privacy_goals) goals.push_back(std::string(to_string(g)));
                asset["privacy_goals"] = std::move(goals);
            }
            assets.push_back(std::move(asset));
        }
        dev["assets"] = std::move(assets);
        devices.push_back(std::move(dev));
    }
    root["devices"] = std::move(devices);

    Json attackers = Json::array();
    for (const auto& p : doc.attackers) {
        Json a = Json::object();
        a["id"] = p.id;
        a["position"] = std::string(to_string(p.position));
        a["activity"] = std::string(to_string(p.activity));
        a["cardinality"] = std::string(to_string(p.cardinality));
        a["sophistication"] = std::string(to_string(p.sophistication));
        a["description"] = p.description;
        attackers.push_back(std::move(a));
    }
    root["attackers"] = std::move(attackers);

    Json threats = Json::array();
    for (const auto& t : doc.threats) {
        Json th = Json::object();
        th["id"] = t.id;
        th["description"] = t.description;
        Json violates = Json::array();
        for (auto p : t.violates) violates.push_back(std::string(to_string(p)));
        th["violates"] = std::move(violates);
        if (!t.stride_tags.empty()) th["stride_tags"] = t.stride_tags;
        if (!t.attackers.empty()) th["attackers"] = t.attackers;
        Json targets = Json::array();
        for (const auto& g : t.targets) {
            Json target = Json::object();
            target["device"] = g.device;
            if (g.impact) target["impact"] = *g.impact;
            if (g.impact_rationale) target["impact_rationale"] = *g.impact_rationale;
            targets.push_back(std::move(target));
        }
        th["targets"] = std::move(targets);
        if (t.scores) th["scores"] = detail::scores_json(*t.scores);
        if (!t.score_overrides.empty()) {
            Json overrides = Json::object();
            for (const auto& [device, scores] : t.score_overrides) overrides[device] = detail::scores_json(scores);
            th["score_overrides"] = std::move(overrides);
        }
        threats.push_back(std::move(th));
    }
    root["threats"] = std::move(threats);

    return root.dump(2) + "\n";
}

/// Highest tier value of every probability characteristic.
inline ScoreVector worst_case_scores(const ScaleSet& scales) {
    ScoreVector v;
    for (auto id : kProbabilityCharacteristics) v[id] = scales.max_value(id);
    return v;
}

inline std::string worst_case_impact(const ScaleSet& scales) { return scales.impact_keys().back(); }

/// Referential integrity, id uniqueness, score ranges, custom model coherence
/// (errors) and methodology completeness (warnings). Findings are in document
/// order.
inline ValidationReport validate_document(const ThreatModelDocument& doc, ValidationOptions options = {}) {
    using detail::index_path;
    using detail::join_path;

    ValidationReport report;
    auto error = [&](std::string code, std::string path, std::string message) {
        report.errors.push_back({std::move(code), std::move(path), std::move(message)});
    };
    auto warn = [&](std::string code, std::string path, std::string message) {
        report.warnings.push_back({std::move(code), std::move(path), std::move(message)});
    };
    const RiskModel& model = effective_model(doc);

    if (doc.team.empty()) warn("STEP_TEAM_MISSING", "team", "no threat-modeling team recorded");
    if (doc.assumptions.operational_environment.empty()) {
        warn("STEP_ENVIRONMENT_MISSING", "assumptions.operational_environment",
             "operational environment is not described");
    }
    if (doc.assumptions.security_boundaries.empty()) {
        warn("STEP_BOUNDARIES_MISSING", "assumptions.security_boundaries",
             "no security domains or trust boundaries listed");
    }
    if (doc.assumptions.use_scenarios.empty()) {
        warn("STEP_USE_SCENARIOS_MISSING", "assumptions.use_scenarios", "no use scenarios listed");
    }
    if (doc.assumptions.exclusions.empty()) {
        warn("STEP_EXCLUSIONS_MISSING", "assumptions.exclusions", "no exclusions listed");
    }

    if (doc.custom_model) {
        for (const auto& v : validate_scale_customization(doc.custom_model->scales, doc.custom_model->bins,
                                                          doc.custom_model->matrix)) {
            error(v.rule, v.element, v.message);
        }
    }

    std::set<std::string> device_ids;
    std::set<std::string> targeted;
    for (const auto& t : doc.threats) {
        for (const auto& g : t.targets) targeted.insert(g.device);
    }
    if (doc.devices.empty()) warn("STEP_DEVICES_MISSING", "devices", "no devices described");
    for (std::size_t i = 0; i < doc.devices.size(); ++i) {
        const auto& d = doc.devices[i];
        const std::string path = index_path("devices", i);
        if (d.id.empty()) error("ID_EMPTY", join_path(path, "id"), "device id is empty");
        if (!device_ids.insert(d.id).second) {
            error("DUPLICATE_ID", join_path(path, "id"), "device id '" + d.id + "' is declared more than once");
        }
        for (std::size_t k = 0; k < d.attack_points.size(); ++k) {
            const int n = d.attack_points[k];
            const std::string ppath = index_path(join_path(path, "attack_points"), k);
            const AttackPoint* point = find_attack_point(n);
            if (point == nullptr) {
                error("ATTACK_POINT_OUT_OF_RANGE", ppath,
                      "attack point " + std::to_string(n) + " is outside 1.." +
                          std::to_string(kAttackPointCount));
            } else if (!point->in_scope() && targeted.contains(d.id)) {
                warn("ATTACK_POINT_OUT_OF_SCOPE", ppath,
                     "threats on device '" + d.id + "' include attack point " + std::to_string(n) +
                         " (" + point->description() + "), which the model leaves out of scope");
            }
        }
        if (d.assets.empty()) {
            warn("DEVICE_NO_ASSETS", join_path(path, "assets"), "device '" + d.id + "' lists no protected assets");
        }
        std::set<std::string> asset_ids;
        for (std::size_t k = 0; k < d.assets.size(); ++k) {
            const auto& a = d.assets[k];
            const std::string apath = join_path(index_path(join_path(path, "assets"), k), "id");
            if (a.id.empty()) error("ID_EMPTY", apath, "asset id is empty");
            if (!asset_ids.insert(a.id).second) {
                error("DUPLICATE_ID", apath, "asset id '" + a.id + "' repeated within device '" + d.id + "'");
            }
        }
    }

    std::set<std::string> attacker_ids;
    std::set<std::string> referenced_attackers;
    for (const auto& t : doc.threats) referenced_attackers.insert(t.attackers.begin(), t.attackers.end());
    if (doc.attackers.empty()) warn("STEP_ATTACKERS_MISSING", "attackers", "no attacker profiles defined");
    for (std::size_t i = 0; i < doc.attackers.size(); ++i) {
        const auto& a = doc.attackers[i];
        const std::string path = index_path("attackers", i);
        if (a.id.empty()) error("ID_EMPTY", join_path(path, "id"), "attacker id is empty");
        if (!attacker_ids.insert(a.id).second) {
            error("DUPLICATE_ID", join_path(path, "id"), "attacker id '" + a.id + "' is declared more than once");
        }
        if (!referenced_attackers.contains(a.id)) {
            warn("ATTACKER_UNUSED", path, "attacker profile '" + a.id + "' is not referenced by any threat");
        }
    }

    auto check_scores = [&](const ScoreVector& scores, const std::string& path) {
        for (auto id : kProbabilityCharacteristics) {
            if (!model.scales.contains_value(id, scores[id])) {
                error("SCORE_OUT_OF_SCALE", join_path(path, to_string(id)),
                      std::string(to_string(id)) + " value " + std::to_string(scores[id]) + " is outside 1.." +
                          std::to_string(model.scales.max_value(id)));
            }
        }
    };

    std::set<std::string> threat_ids;
    if (doc.threats.empty()) warn("STEP_THREATS_MISSING", "threats", "no threats identified");
    for (std::size_t i = 0; i < doc.threats.size(); ++i) {
        const auto& t = doc.threats[i];
        const std::string path = index_path("threats", i);
        if (t.id.empty()) error("ID_EMPTY", join_path(path, "id"), "threat id is empty");
        if (!threat_ids.insert(t.id).second) {
            error("DUPLICATE_ID", join_path(path, "id"), "threat id '" + t.id + "' is declared more than once");
        }
        if (t.violates.empty()) {
            error("VIOLATES_EMPTY", join_path(path, "violates"), "threat '" + t.id + "' violates no security property");
        }
        for (std::size_t k = 0; k < t.attackers.size(); ++k) {
            if (!attacker_ids.contains(t.attackers[k])) {
                error("REF_UNKNOWN_ATTACKER", index_path(join_path(path, "attackers"), k),
                      "attacker '" + t.attackers[k] + "' is not declared");
            }
        }
        if (t.targets.empty()) {
            error("TARGETS_EMPTY", join_path(path, "targets"), "threat '" + t.id + "' targets no device");
        }
        std::set<std::string> seen_targets;
        bool needs_shared_scores = false;
        for (std::size_t k = 0; k < t.targets.size(); ++k) {
            const auto& g = t.targets[k];
            const std::string tpath = index_path(join_path(path, "targets"), k);
            if (doc.find_device(g.device) == nullptr) {
                error("REF_UNKNOWN_DEVICE", tpath, "device '" + g.device + "' is not declared");
            }
            if (!seen_targets.insert(g.device).second) {
                error("DUPLICATE_TARGET", tpath, "device '" + g.device + "' is targeted more than once");
            }
            if (!g.impact) {
                if (options.assume_worst) {
                    warn("ASSUMED_WORST", join_path(tpath, "impact"),
                         "impact missing; assuming '" + worst_case_impact(model.scales) + "'");
                } else {
                    error("IMPACT_MISSING", join_path(tpath, "impact"),
                          "impact of threat '" + t.id + "' on device '" + g.device + "' is not assessed");
                }
            } else if (model.scales.find_label(CharacteristicId::severity, *g.impact) == nullptr) {
                error("IMPACT_UNKNOWN", join_path(tpath, "impact"), "impact '" + *g.impact + "' is not a severity tier");
            }
            if (!t.score_overrides.contains(g.device)) needs_shared_scores = true;
        }
        if (t.scores) {
            check_scores(*t.scores, join_path(path, "scores"));
        } else if (needs_shared_scores) {
            if (options.assume_worst) {
                warn("ASSUMED_WORST", join_path(path, "scores"),
                     "scores missing; assuming the maximum tier for every probability characteristic");
            } else {
                error("SCORES_MISSING", join_path(path, "scores"), "threat '" + t.id + "' is not scored");
            }
        }
        for (const auto& [device, scores] : t.score_overrides) {
            const std::string opath = join_path(join_path(path, "score_overrides"), device);
            if (t.find_target(device) == nullptr) {
                error("REF_OVERRIDE_NOT_TARGET", opath, "device '" + device + "' is not a target of threat '" + t.id + "'");
            }
            check_scores(scores, opath);
        }
    }
    return report;
}

/// Fills every missing score vector and impact with the conservative maximum.
inline ThreatModelDocument resolve_assume_worst(ThreatModelDocument doc) {
    const ScaleSet& scales = effective_model(doc).scales;
    for (auto& t : doc.threats) {
        bool needs_shared = false;
        for (auto& g : t.targets) {
            if (!g.impact) g.impact = worst_case_impact(scales);
            if (!t.score_overrides.contains(g.device)) needs_shared = true;
        }
        if (!t.scores && needs_shared) t.scores = worst_case_scores(scales);
    }
    return doc;
}

/// A parseable starting document with every methodology section present and
/// placeholder content to be replaced.
inline std::string scaffold_document(std::string_view title, DeviceCategory category) {
    ThreatModelDocument doc;
    doc.title = std::string(title);
    doc.assumptions.security_boundaries = {
        "TODO: name the logical components and the trust boundaries between them"};
    doc.assumptions.use_scenarios = {"TODO: describe how the device is deployed and used"};

    Device device;
    device.id = "D1";
    device.name = "TODO: device name";
    device.category = category;
    device.purpose = "TODO: what the device measures or actuates";
    device.status = "TODO: development status";
    device.attack_points = {9, 10, 11};
    device.assets.push_back({"A1", "TODO: protected asset", true, "TODO: why an adversary wants it", {}});
    doc.devices.push_back(std::move(device));

    doc.attackers.push_back({"ATK1", AttackerPosition::external, AttackerActivity::active,
                             AttackerCardinality::individual, AttackerSophistication::sophisticated,
                             "TODO: attacker capabilities and intent"});

    Threat threat;
    threat.id = "T1";
    threat.description = "TODO: participants, actions and consequences of the attack";
    threat.violates = {SecurityProperty::confidentiality};
    threat.attackers = {"ATK1"};
    threat.targets.push_back({"D1", std::string("high"),
                              std::string("TODO: manage risks - justify the severity, rank with `assess`, "
                                          "record the chosen response and revisit when conditions change")});
    threat.scores = ScoreVector{{3, 3, 3, 3, 3}};
    doc.threats.push_back(std::move(threat));
    return serialize_document(doc);
}

}  // namespace tmodel
