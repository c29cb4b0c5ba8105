#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "tmodel/catalog.hpp"
#include "tmodel/core.hpp"

namespace tmodel {

class ScoreOutOfScaleError : public Error {
public:
    ScoreOutOfScaleError(CharacteristicId id, int value)
        : Error("SCORE_OUT_OF_SCALE", std::string(to_string(id)) + " (" +
                                          std::string(short_code(id)) + ") value " +
                                          std::to_string(value) + " is not a tier of its scale"),
          characteristic_(id) {}

    CharacteristicId characteristic() const noexcept { return characteristic_; }

private:
    CharacteristicId characteristic_;
};

class ScoringError : public Error {
public:
    using Error::Error;
};

/// Sum of the five probability scores.
inline int compute_probability(const ScoreVector& scores, const ScaleSet& scales) {
    int total = 0;
    for (auto id : kProbabilityCharacteristics) {
        const int v = scores[id];
        if (!scales.contains_value(id, v)) throw ScoreOutOfScaleError(id, v);
        total += v;
    }
    return total;
}

inline const std::string& bin_probability(int total, const ProbabilityBins& bins) {
    for (const auto& b : bins.bins()) {
        if (b.contains(total)) return b.label;
    }
    throw ScoringError("OUT_OF_RANGE",
                       "probability total " + std::to_string(total) + " is outside every bin");
}

inline RiskLevel lookup_risk(std::string_view bin, std::string_view impact, const RiskMatrix& matrix) {
    if (auto level = matrix.find(bin, impact)) return *level;
    throw ScoringError("LOOKUP", "no risk matrix cell for bin '" + std::string(bin) +
                                     "' and impact '" + std::string(impact) + "'");
}

inline Assessment assess_pair(const Threat& threat, std::string_view device_id, const RiskModel& model) {
    const ThreatTarget* target = threat.find_target(device_id);
    if (target == nullptr) {
        throw ScoringError("NOT_A_TARGET", "device '" + std::string(device_id) +
                                               "' is not a target of threat '" + threat.id + "'");
    }
    const auto scores = threat.effective_scores(device_id);
    if (!scores) {
        throw ScoringError("SCORES_MISSING",
                           "threat '" + threat.id + "' has no scores for device '" +
                               std::string(device_id) + "'");
    }
    if (!target->impact) {
        throw ScoringError("IMPACT_MISSING", "threat '" + threat.id + "' has no impact for device '" +
                                                 std::string(device_id) + "'");
    }
    const ScaleTier* severity = model.scales.find_label(CharacteristicId::severity, *target->impact);
    if (severity == nullptr) {
        throw ScoringError("LOOKUP", "impact '" + *target->impact + "' is not a severity tier");
    }

    Assessment a;
    a.threat_id = threat.id;
    a.device_id = std::string(device_id);
    a.scores = *scores;
    a.probability_total = compute_probability(*scores, model.scales);
    a.probability_bin = bin_probability(a.probability_total, model.bins);
    a.impact = label_key(severity->label);
    a.impact_value = severity->value;
    a.risk_level = lookup_risk(a.probability_bin, a.impact, model.matrix);
    return a;
}

/// Ranking key: risk, then probability total, then impact (all descending),
/// then (threat_id, device_id) ascending.
inline bool ranks_before(const Assessment& a, const Assessment& b) {
    if (a.risk_level != b.risk_level) return a.risk_level > b.risk_level;
    if (a.probability_total != b.probability_total) return a.probability_total > b.probability_total;
    if (a.impact_value != b.impact_value) return a.impact_value > b.impact_value;
    return std::tie(a.threat_id, a.device_id) < std::tie(b.threat_id, b.device_id);
}

inline std::vector<Assessment> rank_assessments(std::vector<Assessment> assessments) {
    std::stable_sort(assessments.begin(), assessments.end(), ranks_before);
    return assessments;
}

/// One assessment per (threat, target) pair, ranked. Expects a document that
/// passed validation; failures carry the (threat, device) context.
inline std::vector<Assessment> assess_document(const ThreatModelDocument& doc) {
    const RiskModel& model = effective_model(doc);
    std::vector<Assessment> out;
    for (const auto& threat : doc.threats) {
        for (const auto& target : threat.targets) {
            try {
                out.push_back(assess_pair(threat, target.device, model));
            } catch (const Error& e) {
                throw ScoringError(e.code(), "assessing (" + threat.id + ", " + target.device +
                                                 "): " + e.what());
            }
        }
    }
    return rank_assessments(std::move(out));
}

/// Histogram of every combination of the supplied per-characteristic tier
/// values, keyed by probability bin. Counts are reported for every bin, zero
/// included.
inline std::map<std::string, std::size_t> enumerate_score_space(
    std::span<const std::vector<int>, kProbabilityCharacteristicCount> tier_values,
    const ProbabilityBins& bins) {
    std::map<std::string, std::size_t> histogram;
    for (const auto& b : bins.bins()) histogram[b.label] = 0;
    for (const auto& values : tier_values) {
        if (values.empty()) return histogram;
    }

    std::array<std::size_t, kProbabilityCharacteristicCount> cursor{};
    while (true) {
        int total = 0;
        for (std::size_t i = 0; i < cursor.size(); ++i) total += tier_values[i][cursor[i]];
        ++histogram[bin_probability(total, bins)];

        std::size_t i = 0;
        for (; i < cursor.size(); ++i) {
            if (++cursor[i] < tier_values[i].size()) break;
            cursor[i] = 0;
        }
        if (i == cursor.size()) break;
    }
    return histogram;
}

inline std::map<std::string, std::size_t> enumerate_score_space(const ScaleSet& scales,
                                                                const ProbabilityBins& bins) {
    std::array<std::vector<int>, kProbabilityCharacteristicCount> values;
    for (auto id : kProbabilityCharacteristics) {
        for (const auto& t : scales.tiers(id)) values[index_of(id)].push_back(t.value);
    }
    return enumerate_score_space(std::span<const std::vector<int>, kProbabilityCharacteristicCount>(values),
                                 bins);
}

}  // namespace tmodel
