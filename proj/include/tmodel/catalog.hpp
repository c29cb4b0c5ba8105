#pragma once

#include <string>
#include <vector>

#include "tmodel/core.hpp"

namespace tmodel {

/// Three-tier scales for C1..C6. Probability characteristics score 1 for the
/// hardest attacker condition and 3 for the easiest; severity scores 3 for High.
inline const ScaleSet& builtin_scales() {
    static const ScaleSet scales{{{
        // C1
        {{"Expert", 1,
          "Broad expertise in cybersecurity. Familiar with the target device at the developer "
          "level. Experienced with, and equipped by, sophisticated tools, for which the expertise "
          "in using is difficult to obtain."},
         {"Proficient", 2,
          "Familiar with security behavior, classical attacks, and related disciplines "
          "(electrical engineering, software development, etc.)."},
         {"Layman", 3, "No particular expertise."}},
        // C2
        {{"Custom", 1, "Bespoke equipment."},
         {"Specialized", 2,
          "Expensive commercially available equipment. Sales are controlled by manufacturers. "
          "The expertise in using the equipment is difficult to obtain."},
         {"Standard", 3,
          "Mass-market commercially available equipment. The expertise in using the equipment "
          "may be acquired from publicly available resources. For example, smartphones or "
          "laptops."}},
        // C3
        {{"Nearby", 1,
          "The attacker is in close proximity (the same room) to, and in immediate visibility "
          "to, the victim. No physical obstacles exist between the attacker and the device."},
         {"Moderate", 2,
          "The attacker is in the same space with the victim without physical obstacles, but "
          "the distance does not allow the victim to see the attacker."},
         {"Remote", 3,
          "The attacker is capable to mount an attack while in a different location than the "
          "victim."}},
        // C4
        {{"Long", 1, "The attacker is able to access the device continuously."},
         {"Moderate", 2, "The attacker is able to access the device multiple times."},
         {"Short", 3, "The attacker is able to access the device once in real time."}},
        // C5
        {{"Critical", 1, "Low-level information about hardware design or source code."},
         {"Restricted", 2,
          "Proprietary confidential developer's information like specifications or guidances."},
         {"Public", 3, "Public domain information."}},
        // C6, listed from most to least severe
        {{"High", 3,
          "Attacks have a severe or catastrophic adverse effect on the user, up to irreparable "
          "harm or loss of life."},
         {"Moderate", 2,
          "Attacks have a moderate, temporary adverse effect on the user, e.g. altered sensor "
          "data causing wrong actuator commands."},
         {"Low", 1,
          "Attacks have a limited adverse effect on the user; the device keeps functioning "
          "correctly."}},
    }}};
    return scales;
}

inline const ProbabilityBins& builtin_bins() {
    static const ProbabilityBins bins{{
        {"low", 5, 7},
        {"moderate", 8, 12},
        {"high", 13, 15},
    }};
    return bins;
}

inline const RiskMatrix& builtin_matrix() {
    using enum RiskLevel;
    static const RiskMatrix matrix{
        {"low", "moderate", "high"},
        {"low", "moderate", "high"},
        {
            {very_low, moderate, high},
            {low, moderate, high},
            {moderate, high, very_high},
        }};
    return matrix;
}

inline const RiskModel& builtin_model() {
    static const RiskModel model{builtin_scales(), builtin_bins(), builtin_matrix()};
    return model;
}

/// The eleven attack points of the generic device architecture. Only the direct
/// non-invasive interfaces (sensors, actuators, telemetry) are in scope.
inline const std::vector<AttackPoint>& builtin_attack_points() {
    static const std::vector<AttackPoint> points{
        {1, "Sensors (sensing channel)", {"fault injection"}, true},
        {2, "Sensor-to-processor signal path", {"probing"}, false},
        {3, "Processor integrated circuit", {"hardware trojans"}, false},
        {4, "Processor-to-memory bus", {"probing"}, false},
        {5, "Actuators (actuating channel)", {"control spoofing"}, true},
        {6, "Processor-to-actuator signal path", {"probing"}, false},
        {7, "Off-chip memory", {"microprobing"}, false},
        {8, "Processor-to-telemetry interface", {"probing"}, false},
        {9, "Antenna", {"shielding/cutting the antenna"}, true},
        {10, "Wireless power transfer link", {"denial of sleep", "power analysis"}, true},
        {11, "Wireless data/control link", {"man-in-the-middle"}, true},
    };
    return points;
}

inline const AttackPoint* find_attack_point(int number) {
    for (const auto& p : builtin_attack_points()) {
        if (p.number() == number) return &p;
    }
    return nullptr;
}

inline const RiskModel& effective_model(const ThreatModelDocument& doc) {
    return doc.custom_model ? *doc.custom_model : builtin_model();
}

struct Violation {
    std::string rule;
    std::string element;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {

inline std::string sum_span(int lo, int hi) {
    return lo == hi ? "sum " + std::to_string(lo) + " uncovered"
                    : "sums " + std::to_string(lo) + ".." + std::to_string(hi) + " uncovered";
}

}  // namespace detail

/// Cross-checks a custom (scales, bins, matrix) triple. Per-object rules such as
/// tier contiguity and matrix monotonicity are enforced by the types
/// themselves; this checks that the three agree with each other:
///   - the bins exactly partition the attainable probability-sum range,
///   - the matrix rows are the bin labels and its columns the severity labels,
///     both in order.
inline std::vector<Violation> validate_scale_customization(const ScaleSet& scales,
                                                           const ProbabilityBins& bins,
                                                           const RiskMatrix& matrix) {
    std::vector<Violation> out;
    const auto [lo, hi] = scales.attainable_sum_range();
    const auto& list = bins.bins();

    if (list.front().min > lo) {
        out.push_back({"BINS_COVERAGE", "probability_bins[0]",
                       detail::sum_span(lo, std::min(hi, list.front().min - 1)) +
                           "; attainable range is [" + std::to_string(lo) + "," +
                           std::to_string(hi) + "]"});
    }
    for (std::size_t i = 1; i < list.size(); ++i) {
        if (list[i].min > list[i - 1].max + 1) {
            out.push_back({"BINS_GAP", "probability_bins[" + std::to_string(i) + "]",
                           detail::sum_span(list[i - 1].max + 1, list[i].min - 1) + " between '" +
                               list[i - 1].label + "' and '" + list[i].label + "'"});
        }
    }
    if (list.back().max < hi) {
        out.push_back({"BINS_COVERAGE",
                       "probability_bins[" + std::to_string(list.size() - 1) + "]",
                       detail::sum_span(std::max(lo, list.back().max + 1), hi) +
                           "; attainable range is [" + std::to_string(lo) + "," +
                           std::to_string(hi) + "]"});
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].max < lo || list[i].min > hi || list[i].min < lo || list[i].max > hi) {
            out.push_back({"BINS_UNATTAINABLE", "probability_bins[" + std::to_string(i) + "]",
                           "bin '" + list[i].label + "' [" + std::to_string(list[i].min) + "," +
                               std::to_string(list[i].max) + "] extends outside attainable range [" +
                               std::to_string(lo) + "," + std::to_string(hi) + "]"});
        }
    }

    if (matrix.bin_labels() != bins.labels()) {
        out.push_back({"MATRIX_LABELS", "risk_matrix",
                       "matrix rows must be exactly the probability bin labels in bin order"});
    }
    if (matrix.impact_labels() != scales.impact_keys()) {
        out.push_back({"MATRIX_LABELS", "risk_matrix",
                       "matrix columns must be exactly the severity tier labels in ascending order"});
    }
    return out;
}

}  // namespace tmodel
