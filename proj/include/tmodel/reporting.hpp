#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tmodel/catalog.hpp"
#include "tmodel/core.hpp"
#include "tmodel/document.hpp"
#include "tmodel/scoring.hpp"

namespace tmodel {

class ReportError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Matrix grids
// ---------------------------------------------------------------------------

inline constexpr std::string_view kEmptyCell = "--";

/// Threat ids placed into (bin, impact) cells. Rows ascend through the bins,
/// columns ascend through impact.
struct MatrixGrid {
    std::vector<std::string> bins;
    std::vector<std::string> impacts;
    std::vector<std::vector<std::vector<std::string>>> entries;  // [row][column] -> sorted ids

    /// Cell text: ids joined by ", " or "--" when empty.
    std::string cell(std::size_t row, std::size_t column) const {
        const auto& ids = entries.at(row).at(column);
        if (ids.empty()) return std::string(kEmptyCell);
        std::string out;
        for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
        return out;
    }

    std::string cell(std::string_view bin, std::string_view impact) const {
        const auto r = std::find(bins.begin(), bins.end(), bin);
        const auto c = std::find(impacts.begin(), impacts.end(), impact);
        if (r == bins.end() || c == impacts.end()) {
            throw ReportError("LOOKUP", "grid has no cell (" + std::string(bin) + ", " + std::string(impact) + ")");
        }
        return cell(static_cast<std::size_t>(r - bins.begin()), static_cast<std::size_t>(c - impacts.begin()));
    }
};

/// Places each assessment (optionally only those of `device_id`) into its
/// (bin, impact) cell. When the placed assessments span several devices the
/// entries read "T2@D1" so that pairs stay distinguishable.
inline MatrixGrid build_matrix_grid(std::span<const Assessment> assessments, const RiskModel& model,
                                    std::optional<std::string_view> device_id = std::nullopt) {
    MatrixGrid grid;
    grid.bins = model.bins.labels();
    grid.impacts = model.scales.impact_keys();
    grid.entries.assign(grid.bins.size(), std::vector<std::vector<std::string>>(grid.impacts.size()));

    std::vector<const Assessment*> placed;
    std::set<std::string> devices;
    for (const auto& a : assessments) {
        if (device_id && a.device_id != *device_id) continue;
        placed.push_back(&a);
        devices.insert(a.device_id);
    }
    const bool qualify = devices.size() > 1;
    for (const Assessment* a : placed) {
        const auto r = std::find(grid.bins.begin(), grid.bins.end(), a->probability_bin);
        const auto c = std::find(grid.impacts.begin(), grid.impacts.end(), a->impact);
        if (r == grid.bins.end() || c == grid.impacts.end()) {
            throw ReportError("LOOKUP", "assessment (" + a->threat_id + ", " + a->device_id +
                                            ") does not address a cell of the risk matrix");
        }
        auto& cell = grid.entries[static_cast<std::size_t>(r - grid.bins.begin())]
                                 [static_cast<std::size_t>(c - grid.impacts.begin())];
        cell.push_back(qualify ? a->threat_id + "@" + a->device_id : a->threat_id);
    }
    for (auto& row : grid.entries) {
        for (auto& cell : row) {
            std::sort(cell.begin(), cell.end());
            cell.erase(std::unique(cell.begin(), cell.end()), cell.end());
        }
    }
    return grid;
}

namespace detail {

inline std::string rtrim(std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

inline std::string pad(std::string_view s, std::size_t width) {
    std::string out(s);
    if (out.size() < width) out.append(width - out.size(), ' ');
    return out;
}

/// Left-aligned columns separated by `sep`, optional rule under the header.
inline std::string aligned_table(const std::vector<std::vector<std::string>>& rows, std::string_view sep,
                                 std::optional<std::string_view> rule_sep) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    std::string out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::string line;
        for (std::size_t i = 0; i < rows[r].size(); ++i) {
            if (i > 0) line += sep;
            line += pad(rows[r][i], widths[i]);
        }
        out += rtrim(line) + "\n";
        if (r == 0 && rule_sep) {
            std::string rule;
            for (std::size_t i = 0; i < widths.size(); ++i) {
                if (i > 0) rule += *rule_sep;
                rule.append(widths[i], '-');
            }
            out += rule + "\n";
        }
    }
    return out;
}

inline std::string md_escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        if (ch == '|') {
            out += "\\|";
        } else if (ch == '\n') {
            out += "<br>";
        } else {
            out.push_back(ch);
        }
    }
    return out;
}

inline std::string markdown_table(const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out += "|";
        for (const auto& cell : rows[r]) out += " " + md_escape(cell) + " |";
        out += "\n";
        if (r == 0) {
            out += "|";
            for (std::size_t i = 0; i < rows[r].size(); ++i) out += " --- |";
            out += "\n";
        }
    }
    return out;
}

inline std::vector<std::vector<std::string>> grid_rows(const MatrixGrid& grid, std::string_view corner) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{std::string(corner)};
    for (const auto& impact : grid.impacts) header.push_back(display_label(impact));
    rows.push_back(std::move(header));
    for (std::size_t r = 0; r < grid.bins.size(); ++r) {
        std::vector<std::string> row{display_label(grid.bins[r])};
        for (std::size_t c = 0; c < grid.impacts.size(); ++c) row.push_back(grid.cell(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

/// Plain-text grid:
///
///     Probability \ Impact | Low | Moderate | High
///     ---------------------+-----+----------+-------
///     Low                  | --  | --       | --
inline std::string render_matrix_grid(const MatrixGrid& grid) {
    return detail::aligned_table(detail::grid_rows(grid, "Probability \\ Impact"), " | ", "-+-");
}

inline std::string render_matrix_grid_markdown(const MatrixGrid& grid) {
    return detail::markdown_table(detail::grid_rows(grid, "Probability \\ Impact"));
}

inline std::string render_matrix_grid(std::span<const Assessment> assessments, const RiskModel& model,
                                      std::optional<std::string_view> device_id = std::nullopt) {
    return render_matrix_grid(build_matrix_grid(assessments, model, device_id));
}

/// Grid for one device of `doc`; the device must be declared.
inline std::string render_matrix_grid(const ThreatModelDocument& doc, std::span<const Assessment> assessments,
                                      std::string_view device_id) {
    if (doc.find_device(device_id) == nullptr) {
        throw ReportError("UNKNOWN_DEVICE", "device '" + std::string(device_id) + "' is not declared");
    }
    return render_matrix_grid(assessments, effective_model(doc), device_id);
}

// ---------------------------------------------------------------------------
// Threat register
// ---------------------------------------------------------------------------

enum class RegisterFormat { table, json, markdown };

inline std::optional<RegisterFormat> parse_register_format(std::string_view s) {
    if (s == "table") return RegisterFormat::table;
    if (s == "json") return RegisterFormat::json;
    if (s == "markdown") return RegisterFormat::markdown;
    return std::nullopt;
}

inline nlohmann::ordered_json assessment_json(const Assessment& a) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["threat_id"] = a.threat_id;
    j["device_id"] = a.device_id;
    j["scores"] = detail::scores_json(a.scores);
    j["probability_total"] = a.probability_total;
    j["probability_bin"] = a.probability_bin;
    j["impact"] = a.impact;
    j["risk_level"] = std::string(to_string(a.risk_level));
    return j;
}

/// One row per assessment in ranked order.
inline std::string render_threat_register(std::span<const Assessment> assessments, RegisterFormat format) {
    const auto ranked = rank_assessments({assessments.begin(), assessments.end()});
    if (format == RegisterFormat::json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& a : ranked) arr.push_back(assessment_json(a));
        return arr.dump(2) + "\n";
    }

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"threat_id", "device_id", "C1", "C2", "C3", "C4", "C5", "P", "bin", "impact", "risk"});
    for (const auto& a : ranked) {
        std::vector<std::string> row{a.threat_id, a.device_id};
        for (int v : a.scores.values) row.push_back(std::to_string(v));
        row.push_back(std::to_string(a.probability_total));
        row.push_back(a.probability_bin);
        row.push_back(a.impact);
        row.push_back(std::string(to_string(a.risk_level)));
        rows.push_back(std::move(row));
    }
    if (format == RegisterFormat::markdown) return detail::markdown_table(rows);
    return detail::aligned_table(rows, "  ", std::nullopt);
}

// ---------------------------------------------------------------------------
// Full report
// ---------------------------------------------------------------------------

inline std::string render_full_report(const ThreatModelDocument& doc, std::span<const Assessment> assessments,
                                      const ValidationReport& findings) {
    using detail::md_escape;
    std::ostringstream out;
    const RiskModel& model = effective_model(doc);

    out << "# " << md_escape(doc.title.empty() ? "Untitled threat model" : doc.title) << "\n\n";

    auto bullets = [&](const std::vector<std::string>& items) {
        if (items.empty()) {
            out << "_None recorded._\n\n";
            return;
        }
        for (const auto& item : items) out << "- " << md_escape(item) << "\n";
        out << "\n";
    };

    out << "## Team\n\n";
    {
        std::vector<std::string> members;
        for (const auto& m : doc.team) members.push_back(m.name + " (" + m.discipline + ")");
        bullets(members);
    }

    out << "## Assumptions\n\n";
    out << "### Operational environment\n\n";
    if (doc.assumptions.operational_environment.empty()) {
        out << "_None recorded._\n\n";
    } else {
        out << md_escape(doc.assumptions.operational_environment) << "\n\n";
    }
    out << "### Security boundaries\n\n";
    bullets(doc.assumptions.security_boundaries);
    out << "### Use scenarios\n\n";
    bullets(doc.assumptions.use_scenarios);
    out << "### Exclusions\n\n";
    bullets(doc.assumptions.exclusions);

    out << "## Devices and assets\n\n";
    if (doc.devices.empty()) {
        out << "_None recorded._\n\n";
    } else {
        std::vector<std::vector<std::string>> rows{
            {"Number", "Name", "Category", "Purpose", "Status", "Attack points", "Assets"}};
        for (const auto& d : doc.devices) {
            std::string points;
            for (int p : d.attack_points) points += (points.empty() ? "" : ", ") + std::to_string(p);
            std::string assets;
            for (std::size_t i = 0; i < d.assets.size(); ++i) {
                const auto& a = d.assets[i];
                if (i > 0) assets += "<br>";
                assets += std::to_string(i + 1) + ". " + a.name + " (" + a.id + ", " +
                          (a.tangible ? "tangible" : "intangible");
                for (auto g : a.privacy_goals) assets += ", " + std::string(to_string(g)) + " privacy";
                assets += ")";
            }
            rows.push_back({d.id, d.name, display_label(to_string(d.category)), d.purpose, d.status,
                            points.empty() ? std::string(kEmptyCell) : points,
                            assets.empty() ? std::string(kEmptyCell) : assets});
        }
        out << detail::markdown_table(rows) << "\n";
    }

    out << "## Attackers\n\n";
    if (doc.attackers.empty()) {
        out << "_None recorded._\n\n";
    } else {
        std::vector<std::vector<std::string>> rows{
            {"ID", "Position", "Activity", "Cardinality", "Sophistication", "Description"}};
        for (const auto& a : doc.attackers) {
            rows.push_back({a.id, std::string(to_string(a.position)), std::string(to_string(a.activity)),
                            std::string(to_string(a.cardinality)), std::string(to_string(a.sophistication)),
                            a.description});
        }
        out << detail::markdown_table(rows) << "\n";
    }

    out << "## Threats\n\n";
    if (doc.threats.empty()) {
        out << "_None recorded._\n\n";
    } else {
        std::vector<std::vector<std::string>> rows{{"ID", "Threat", "Violates", "Devices"}};
        for (const auto& t : doc.threats) {
            std::string violates;
            for (auto p : t.violates) violates += (violates.empty() ? "" : ", ") + display_label(to_string(p));
            std::string devices;
            for (const auto& g : t.targets) devices += (devices.empty() ? "" : ", ") + g.device;
            rows.push_back({t.id, t.description, violates, devices});
        }
        out << detail::markdown_table(rows) << "\n";
    }

    out << "## Threat register\n\n";
    out << render_threat_register(assessments, RegisterFormat::markdown) << "\n";

    out << "## Risk matrices\n\n";
    std::vector<const Device*> devices;
    for (const auto& d : doc.devices) devices.push_back(&d);
    std::sort(devices.begin(), devices.end(), [](const Device* a, const Device* b) { return a->id < b->id; });
    if (devices.empty()) out << "_No devices._\n\n";
    for (const Device* d : devices) {
        out << "### Risk matrix - " << md_escape(d->id) << " (" << md_escape(d->name) << ")\n\n";
        out << render_matrix_grid_markdown(build_matrix_grid(assessments, model, d->id)) << "\n";
    }

    out << "## Validation warnings\n\n";
    if (findings.warnings.empty()) {
        out << "_None._\n";
    } else {
        for (const auto& w : findings.warnings) {
            out << "- `" << w.code << "` " << md_escape(w.path) << ": " << md_escape(w.message) << "\n";
        }
    }
    return out.str();
}

inline std::string render_full_report(const ThreatModelDocument& doc, std::span<const Assessment> assessments) {
    return render_full_report(doc, assessments, validate_document(doc));
}

// ---------------------------------------------------------------------------
// Diffs
// ---------------------------------------------------------------------------

enum class DeltaKind { added, removed, changed };

constexpr std::string_view to_string(DeltaKind kind) noexcept {
    switch (kind) {
        case DeltaKind::added: return "added";
        case DeltaKind::removed: return "removed";
        case DeltaKind::changed: return "changed";
    }
    return "?";
}

struct RiskDelta {
    std::string threat_id;
    std::string device_id;
    DeltaKind kind = DeltaKind::changed;
    std::optional<Assessment> old_assessment;
    std::optional<Assessment> new_assessment;

    friend bool operator==(const RiskDelta&, const RiskDelta&) = default;
};

namespace detail {

inline std::map<std::pair<std::string, std::string>, const Assessment*> key_assessments(
    std::span<const Assessment> list, std::string_view side) {
    std::map<std::pair<std::string, std::string>, const Assessment*> out;
    for (const auto& a : list) {
        if (!out.emplace(std::make_pair(a.threat_id, a.device_id), &a).second) {
            throw ReportError("DUPLICATE_KEY", std::string(side) + " assessments repeat (" + a.threat_id + ", " +
                                                   a.device_id + ")");
        }
    }
    return out;
}

}  // namespace detail

/// Outer join on (threat_id, device_id). A pair counts as changed when its
/// risk level, probability total or impact differs; unchanged pairs are
/// omitted. Output is sorted by key.
inline std::vector<RiskDelta> diff_assessments(std::span<const Assessment> old_list,
                                               std::span<const Assessment> new_list) {
    const auto olds = detail::key_assessments(old_list, "old");
    const auto news = detail::key_assessments(new_list, "new");
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& [k, _] : olds) keys.insert(k);
    for (const auto& [k, _] : news) keys.insert(k);

    std::vector<RiskDelta> out;
    for (const auto& key : keys) {
        const auto o = olds.find(key);
        const auto n = news.find(key);
        RiskDelta d{key.first, key.second, DeltaKind::changed, std::nullopt, std::nullopt};
        if (o == olds.end()) {
            d.kind = DeltaKind::added;
            d.new_assessment = *n->second;
        } else if (n == news.end()) {
            d.kind = DeltaKind::removed;
            d.old_assessment = *o->second;
        } else {
            const Assessment& a = *o->second;
            const Assessment& b = *n->second;
            if (a.risk_level == b.risk_level && a.probability_total == b.probability_total && a.impact == b.impact) {
                continue;
            }
            d.old_assessment = a;
            d.new_assessment = b;
        }
        out.push_back(std::move(d));
    }
    return out;
}

inline std::string render_deltas(std::span<const RiskDelta> deltas) {
    std::ostringstream out;
    auto summary = [](const Assessment& a) {
        return "risk " + std::string(to_string(a.risk_level)) + " (P " + std::to_string(a.probability_total) + " " +
               a.probability_bin + ", impact " + a.impact + ")";
    };
    for (const auto& d : deltas) {
        out << to_string(d.kind) << " " << d.threat_id << " " << d.device_id << ": ";
        switch (d.kind) {
            case DeltaKind::added: out << summary(*d.new_assessment); break;
            case DeltaKind::removed: out << summary(*d.old_assessment); break;
            case DeltaKind::changed:
                out << summary(*d.old_assessment) << " -> " << summary(*d.new_assessment);
                break;
        }
        out << "\n";
    }
    out << deltas.size() << (deltas.size() == 1 ? " change" : " changes") << "\n";
    return out.str();
}

}  // namespace tmodel
