#pragma once

// Command-line front end. Kept in a header so tests can drive `run` in-process.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tmodel.hpp"

namespace tmodel::cli {

enum ExitCode : int {
    kOk = 0,
    kValidationFailed = 1,
    kParseFailed = 2,
    kUsage = 3,
};

namespace detail {

struct Failure {
    int code;
};

inline std::string read_file(const std::string& path, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "error: cannot read '" << path << "'\n";
        throw Failure{kUsage};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline ThreatModelDocument load(const std::string& path, std::ostream& err) {
    const std::string text = read_file(path, err);
    try {
        return parse_document(text);
    } catch (const Error& e) {
        err << path << ": " << e.code() << " error: " << e.what() << "\n";
        throw Failure{kParseFailed};
    }
}

inline void print_findings(const ValidationReport& report, std::ostream& os) {
    for (const auto& f : report.errors) os << "error " << f.code << " " << f.path << ": " << f.message << "\n";
    for (const auto& f : report.warnings) os << "warning " << f.code << " " << f.path << ": " << f.message << "\n";
}

/// Loads, validates and, when allowed, resolves a document for assessment.
inline ThreatModelDocument load_for_assessment(const std::string& path, bool assume_worst, std::ostream& err) {
    ThreatModelDocument doc = load(path, err);
    const ValidationReport report = validate_document(doc, {assume_worst});
    if (!report.valid()) {
        err << path << ": " << report.errors.size() << " validation error(s); refusing to assess\n";
        for (const auto& f : report.errors) err << "error " << f.code << " " << f.path << ": " << f.message << "\n";
        throw Failure{kValidationFailed};
    }
    if (assume_worst) {
        for (const auto& f : report.warnings) {
            if (f.code == "ASSUMED_WORST") err << "warning " << f.code << " " << f.path << ": " << f.message << "\n";
        }
        doc = resolve_assume_worst(std::move(doc));
    }
    return doc;
}

inline void require_device(const ThreatModelDocument& doc, const std::string& device, std::ostream& err) {
    if (doc.find_device(device) == nullptr) {
        err << "error: device '" << device << "' is not declared in the document\n";
        throw Failure{kUsage};
    }
}

inline std::vector<const Device*> devices_by_id(const ThreatModelDocument& doc) {
    std::vector<const Device*> out;
    for (const auto& d : doc.devices) out.push_back(&d);
    std::sort(out.begin(), out.end(), [](const Device* a, const Device* b) { return a->id < b->id; });
    return out;
}

inline std::string render_catalog_scales() {
    std::ostringstream out;
    const ScaleSet& scales = builtin_scales();
    for (auto id : kAllCharacteristics) {
        out << short_code(id) << " " << to_string(id) << " - " << display_name(id)
            << (is_probability(id) ? " (probability)" : " (impact)") << "\n";
        for (const auto& t : scales.tiers(id)) {
            out << "  " << t.value << "  " << tmodel::detail::pad(t.label, 11) << "  " << t.description << "\n";
        }
    }
    return out.str();
}

inline std::string render_catalog_matrix() {
    const RiskMatrix& m = builtin_matrix();
    const ProbabilityBins& bins = builtin_bins();
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"Probability \\ Impact"};
    const auto& scales = builtin_scales();
    for (const auto& impact : m.impact_labels()) {
        header.push_back(display_label(impact) + " (" +
                         std::to_string(scales.find_label(CharacteristicId::severity, impact)->value) + ")");
    }
    rows.push_back(std::move(header));
    for (std::size_t r = 0; r < m.bin_labels().size(); ++r) {
        const auto& bin = bins.bins()[r];
        std::vector<std::string> row{display_label(bin.label) + " (" + std::to_string(bin.min) + "-" +
                                     std::to_string(bin.max) + ")"};
        for (auto level : m.cells()[r]) row.push_back(display_label(to_string(level)));
        rows.push_back(std::move(row));
    }
    return tmodel::detail::aligned_table(rows, " | ", "-+-");
}

inline std::string render_catalog_attack_points() {
    std::vector<std::vector<std::string>> rows{{"point", "scope", "interface", "example attacks"}};
    for (const auto& p : builtin_attack_points()) {
        std::string examples;
        for (const auto& e : p.example_attacks()) examples += (examples.empty() ? "" : ", ") + e;
        rows.push_back({std::to_string(p.number()), p.in_scope() ? "in" : "out", p.description(), examples});
    }
    return tmodel::detail::aligned_table(rows, "  ", std::nullopt);
}

}  // namespace detail

/// Runs one invocation. `args` excludes the program name. Payloads go to
/// `out`, diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Threat-model-as-code toolkit for miniaturized wireless biomedical devices", "tmodel"};
    app.require_subcommand(1);

    std::string path;
    std::string old_path;
    std::string new_path;
    std::string category = "wearable";
    std::string title = "New threat model";
    std::string device;
    std::string format = "table";
    std::string output;
    std::string catalog_view;
    bool assume_worst = false;

    std::vector<std::string> category_names;
    for (auto name : tmodel::detail::names(kDeviceCategoryNames)) category_names.emplace_back(name);

    auto* init = app.add_subcommand("init", "Write a scaffold document (never overwrites)");
    init->add_option("path", path, "Output file")->required();
    init->add_option("--category", category, "Device category")->check(CLI::IsMember(category_names));
    init->add_option("--title", title, "Document title");

    auto* validate = app.add_subcommand("validate", "Print validation findings");
    validate->add_option("doc", path, "Threat-model document")->required();
    validate->add_flag("--assume-worst", assume_worst, "Substitute worst case for unassessed values");

    auto* assess = app.add_subcommand("assess", "Print the ranked threat register");
    assess->add_option("doc", path, "Threat-model document")->required();
    assess->add_option("--device", device, "Only this device");
    assess->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"table", "json", "markdown"}));
    assess->add_flag("--assume-worst", assume_worst, "Substitute worst case for unassessed values");

    auto* matrix = app.add_subcommand("matrix", "Print per-device risk matrix grids");
    matrix->add_option("doc", path, "Threat-model document")->required();
    matrix->add_option("--device", device, "Only this device");

    auto* report = app.add_subcommand("report", "Write the full markdown report");
    report->add_option("doc", path, "Threat-model document")->required();
    report->add_option("-o", output, "Output file (default: standard output)");

    auto* diff = app.add_subcommand("diff", "Print risk changes between two document versions");
    diff->add_option("old-doc", old_path, "Previous version")->required();
    diff->add_option("new-doc", new_path, "Current version")->required();

    auto* catalog = app.add_subcommand("catalog", "Print built-in scales, matrix or attack points");
    catalog->add_option("view", catalog_view, "scales|matrix|attack-points")
        ->required()
        ->check(CLI::IsMember({"scales", "matrix", "attack-points"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*init) {
            if (std::filesystem::exists(path)) {
                err << "error: '" << path << "' already exists; refusing to overwrite\n";
                return kUsage;
            }
            std::ofstream file(path, std::ios::binary);
            if (!file) {
                err << "error: cannot write '" << path << "'\n";
                return kUsage;
            }
            file << scaffold_document(title, *parse_DeviceCategory(category));
            out << "wrote " << path << "\n";
            return kOk;
        }

        if (*validate) {
            const ThreatModelDocument doc = detail::load(path, err);
            const ValidationReport findings = validate_document(doc, {assume_worst});
            detail::print_findings(findings, out);
            out << findings.errors.size() << " error(s), " << findings.warnings.size() << " warning(s)\n";
            return findings.valid() ? kOk : kValidationFailed;
        }

        if (*assess) {
            const ThreatModelDocument doc = detail::load_for_assessment(path, assume_worst, err);
            std::vector<Assessment> assessments = assess_document(doc);
            if (!device.empty()) {
                detail::require_device(doc, device, err);
                std::erase_if(assessments, [&](const Assessment& a) { return a.device_id != device; });
            }
            out << render_threat_register(assessments, *parse_register_format(format));
            return kOk;
        }

        if (*matrix) {
            const ThreatModelDocument doc = detail::load_for_assessment(path, false, err);
            const auto assessments = assess_document(doc);
            if (!device.empty()) {
                detail::require_device(doc, device, err);
                out << "Risk matrix - " << device << "\n" << render_matrix_grid(doc, assessments, device);
                return kOk;
            }
            bool first = true;
            for (const Device* d : detail::devices_by_id(doc)) {
                if (!first) out << "\n";
                first = false;
                out << "Risk matrix - " << d->id << "\n" << render_matrix_grid(doc, assessments, d->id);
            }
            return kOk;
        }

        if (*report) {
            const ThreatModelDocument doc = detail::load_for_assessment(path, false, err);
            const std::string text = render_full_report(doc, assess_document(doc));
            if (output.empty()) {
                out << text;
                return kOk;
            }
            std::ofstream file(output, std::ios::binary | std::ios::trunc);
            if (!file) {
                err << "error: cannot write '" << output << "'\n";
                return kUsage;
            }
            file << text;
            return kOk;
        }

        if (*diff) {
            const ThreatModelDocument before = detail::load_for_assessment(old_path, false, err);
            const ThreatModelDocument after = detail::load_for_assessment(new_path, false, err);
            const auto old_list = assess_document(before);
            const auto new_list = assess_document(after);
            out << render_deltas(diff_assessments(old_list, new_list));
            return kOk;
        }

        if (*catalog) {
            if (catalog_view == "scales") out << detail::render_catalog_scales();
            if (catalog_view == "matrix") out << detail::render_catalog_matrix();
            if (catalog_view == "attack-points") out << detail::render_catalog_attack_points();
            return kOk;
        }
    } catch (const detail::Failure& f) {
        return f.code;
    } catch (const Error& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return kValidationFailed;
    }
    return kUsage;
}

}  // namespace tmodel::cli
