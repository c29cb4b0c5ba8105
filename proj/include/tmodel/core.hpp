#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tmodel {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for every failure raised by the library. `code()` is a stable
/// machine-readable identifier; `what()` carries the human diagnostic.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// A value violated an invariant of its type at construction time.
class InvariantError : public Error {
public:
    InvariantError(std::string rule, const std::string& message)
        : Error("INVARIANT", rule + ": " + message), rule_(std::move(rule)) {}

    const std::string& rule() const noexcept { return rule_; }

private:
    std::string rule_;
};

// ---------------------------------------------------------------------------
// Characteristics
// ---------------------------------------------------------------------------

enum class CharacteristicId {
    expertise,           // C1
    equipment,           // C2
    proximity,           // C3
    access_time,         // C4
    device_information,  // C5
    severity,            // C6
};

inline constexpr std::size_t kCharacteristicCount = 6;
inline constexpr std::size_t kProbabilityCharacteristicCount = 5;

inline constexpr std::array<CharacteristicId, kCharacteristicCount> kAllCharacteristics{
    CharacteristicId::expertise,   CharacteristicId::equipment,
    CharacteristicId::proximity,   CharacteristicId::access_time,
    CharacteristicId::device_information, CharacteristicId::severity,
};

inline constexpr std::array<CharacteristicId, kProbabilityCharacteristicCount>
    kProbabilityCharacteristics{
        CharacteristicId::expertise,   CharacteristicId::equipment,
        CharacteristicId::proximity,   CharacteristicId::access_time,
        CharacteristicId::device_information,
    };

constexpr bool is_probability(CharacteristicId id) noexcept {
    return id != CharacteristicId::severity;
}

constexpr std::size_t index_of(CharacteristicId id) noexcept {
    return static_cast<std::size_t>(id);
}

/// Schema key, e.g. "access_time".
constexpr std::string_view to_string(CharacteristicId id) noexcept {
    switch (id) {
        case CharacteristicId::expertise: return "expertise";
        case CharacteristicId::equipment: return "equipment";
        case CharacteristicId::proximity: return "proximity";
        case CharacteristicId::access_time: return "access_time";
        case CharacteristicId::device_information: return "device_information";
        case CharacteristicId::severity: return "severity";
    }
    return "?";
}

/// Short code "C1".."C6".
constexpr std::string_view short_code(CharacteristicId id) noexcept {
    constexpr std::array<std::string_view, kCharacteristicCount> codes{"C1", "C2", "C3",
                                                                      "C4", "C5", "C6"};
    return codes[index_of(id)];
}

constexpr std::string_view display_name(CharacteristicId id) noexcept {
    switch (id) {
        case CharacteristicId::expertise: return "Expertise of the attacker";
        case CharacteristicId::equipment: return "Equipment required to carry out the attack";
        case CharacteristicId::proximity: return "Physical proximity to the attacked device";
        case CharacteristicId::access_time: return "Device access time";
        case CharacteristicId::device_information: return "Device information";
        case CharacteristicId::severity: return "Severity of the attack";
    }
    return "?";
}

inline std::optional<CharacteristicId> parse_characteristic(std::string_view text) {
    for (auto id : kAllCharacteristics) {
        if (to_string(id) == text) return id;
    }
    return std::nullopt;
}

/// Normalizes a qualitative label to its key form: lower case, spaces and
/// dashes become underscores. "Very Low" -> "very_low".
inline std::string label_key(std::string_view label) {
    std::string out;
    out.reserve(label.size());
    for (char ch : label) {
        if (ch == ' ' || ch == '-') {
            out.push_back('_');
        } else {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    return out;
}

/// Inverse-ish of label_key for display: "very_low" -> "Very Low".
inline std::string display_label(std::string_view key) {
    std::string out;
    out.reserve(key.size());
    bool start = true;
    for (char ch : key) {
        if (ch == '_') {
            out.push_back(' ');
            start = true;
            continue;
        }
        out.push_back(start ? static_cast<char>(std::toupper(static_cast<unsigned char>(ch))) : ch);
        start = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scales
// ---------------------------------------------------------------------------

struct ScaleTier {
    std::string label;
    int value = 0;
    std::string description;

    friend bool operator==(const ScaleTier&, const ScaleTier&) = default;
};

/// Tiered qualitative-quantitative scales for the six characteristics.
///
/// Each characteristic holds at least two tiers whose values form the
/// contiguous range 1..n. Labels are unique per characteristic (compared by
/// label_key). Tiers are kept in the order supplied.
class ScaleSet {
public:
    using TierList = std::vector<ScaleTier>;

    explicit ScaleSet(std::array<TierList, kCharacteristicCount> tiers) : tiers_(std::move(tiers)) {
        for (auto id : kAllCharacteristics) check(id, tiers_[index_of(id)]);
    }

    const TierList& tiers(CharacteristicId id) const { return tiers_[index_of(id)]; }

    int min_value(CharacteristicId) const noexcept { return 1; }
    int max_value(CharacteristicId id) const noexcept {
        return static_cast<int>(tiers_[index_of(id)].size());
    }

    bool contains_value(CharacteristicId id, int value) const noexcept {
        return value >= 1 && value <= max_value(id);
    }

    const ScaleTier* find_value(CharacteristicId id, int value) const {
        for (const auto& t : tiers(id)) {
            if (t.value == value) return &t;
        }
        return nullptr;
    }

    const ScaleTier* find_label(CharacteristicId id, std::string_view label) const {
        const auto key = label_key(label);
        for (const auto& t : tiers(id)) {
            if (label_key(t.label) == key) return &t;
        }
        return nullptr;
    }

    /// Attainable probability-sum range [#probability characteristics, sum of maxima].
    std::pair<int, int> attainable_sum_range() const noexcept {
        int hi = 0;
        for (auto id : kProbabilityCharacteristics) hi += max_value(id);
        return {static_cast<int>(kProbabilityCharacteristicCount), hi};
    }

    /// Impact keys ordered by ascending severity value.
    std::vector<std::string> impact_keys() const {
        std::vector<std::string> keys(tiers(CharacteristicId::severity).size());
        for (const auto& t : tiers(CharacteristicId::severity)) {
            keys[static_cast<std::size_t>(t.value - 1)] = label_key(t.label);
        }
        return keys;
    }

    friend bool operator==(const ScaleSet&, const ScaleSet&) = default;

private:
    static void check(CharacteristicId id, const TierList& list) {
        const std::string where{to_string(id)};
        if (list.size() < 2) {
            throw InvariantError("SCALE_TIER_COUNT", where + " must have at least 2 tiers");
        }
        std::set<std::string> labels;
        std::vector<bool> seen(list.size() + 1, false);
        for (const auto& t : list) {
            if (t.value < 1) {
                throw InvariantError("SCALE_TIER_VALUE",
                                     where + " tier '" + t.label + "' has value < 1");
            }
            if (t.label.empty()) {
                throw InvariantError("SCALE_TIER_LABEL", where + " has a tier with an empty label");
            }
            if (!labels.insert(label_key(t.label)).second) {
                throw InvariantError("SCALE_TIER_LABEL",
                                     where + " repeats tier label '" + t.label + "'");
            }
            const auto v = static_cast<std::size_t>(t.value);
            if (v >= seen.size()) {
                throw InvariantError("SCALE_NOT_CONTIGUOUS",
                                     where + " tier values must be exactly 1.." +
                                         std::to_string(list.size()));
            }
            if (seen[v]) {
                throw InvariantError("SCALE_TIER_VALUE",
                                     where + " repeats tier value " + std::to_string(t.value));
            }
            seen[v] = true;
        }
    }

    std::array<TierList, kCharacteristicCount> tiers_;
};

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

/// One assessed tier value per probability characteristic C1..C5. Membership
/// in a particular ScaleSet is checked where a scale is known.
struct ScoreVector {
    std::array<int, kProbabilityCharacteristicCount> values{};

    int operator[](CharacteristicId id) const { return values.at(index_of(id)); }
    int& operator[](CharacteristicId id) { return values.at(index_of(id)); }

    friend bool operator==(const ScoreVector&, const ScoreVector&) = default;
};

// ---------------------------------------------------------------------------
// Probability bins
// ---------------------------------------------------------------------------

struct ProbabilityBin {
    std::string label;  // key form, e.g. "moderate"
    int min = 0;        // inclusive
    int max = 0;        // inclusive

    bool contains(int total) const noexcept { return total >= min && total <= max; }

    friend bool operator==(const ProbabilityBin&, const ProbabilityBin&) = default;
};

/// Ordered, disjoint, ascending inclusive ranges. Whether they cover the
/// attainable range of a particular ScaleSet is a cross-object rule checked by
/// validate_scale_customization.
class ProbabilityBins {
public:
    explicit ProbabilityBins(std::vector<ProbabilityBin> bins) : bins_(std::move(bins)) {
        if (bins_.empty()) throw InvariantError("BINS_EMPTY", "at least one bin is required");
        std::set<std::string> labels;
        for (std::size_t i = 0; i < bins_.size(); ++i) {
            const auto& b = bins_[i];
            if (b.label.empty() || label_key(b.label) != b.label) {
                throw InvariantError("BIN_LABEL",
                                     "bin label '" + b.label + "' must be a non-empty snake_case key");
            }
            if (!labels.insert(b.label).second) {
                throw InvariantError("BIN_LABEL", "bin label '" + b.label + "' repeated");
            }
            if (b.min > b.max) {
                throw InvariantError("BIN_RANGE", "bin '" + b.label + "' has min > max");
            }
            if (i > 0 && b.min <= bins_[i - 1].max) {
                throw InvariantError("BINS_NOT_ASCENDING",
                                     "bin '" + b.label + "' overlaps or precedes '" +
                                         bins_[i - 1].label + "'");
            }
        }
    }

    const std::vector<ProbabilityBin>& bins() const noexcept { return bins_; }
    std::size_t size() const noexcept { return bins_.size(); }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        for (const auto& b : bins_) out.push_back(b.label);
        return out;
    }

    std::optional<std::size_t> index_of_label(std::string_view label) const {
        for (std::size_t i = 0; i < bins_.size(); ++i) {
            if (bins_[i].label == label) return i;
        }
        return std::nullopt;
    }

    friend bool operator==(const ProbabilityBins&, const ProbabilityBins&) = default;

private:
    std::vector<ProbabilityBin> bins_;
};

// ---------------------------------------------------------------------------
// Risk levels
// ---------------------------------------------------------------------------

enum class RiskLevel { very_low, low, moderate, high, very_high };

inline constexpr std::array<RiskLevel, 5> kAllRiskLevels{
    RiskLevel::very_low, RiskLevel::low, RiskLevel::moderate, RiskLevel::high,
    RiskLevel::very_high};

constexpr std::strong_ordering compare_risk(RiskLevel a, RiskLevel b) noexcept {
    return static_cast<int>(a) <=> static_cast<int>(b);
}

constexpr std::string_view to_string(RiskLevel level) noexcept {
    switch (level) {
        case RiskLevel::very_low: return "very_low";
        case RiskLevel::low: return "low";
        case RiskLevel::moderate: return "moderate";
        case RiskLevel::high: return "high";
        case RiskLevel::very_high: return "very_high";
    }
    return "?";
}

inline std::optional<RiskLevel> parse_risk_level(std::string_view text) {
    for (auto level : kAllRiskLevels) {
        if (to_string(level) == text) return level;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Risk matrix
// ---------------------------------------------------------------------------

/// Total, monotone (bin x impact) -> RiskLevel map. Rows follow the bin order,
/// columns follow ascending impact. Risk must not decrease along either axis.
class RiskMatrix {
public:
    RiskMatrix(std::vector<std::string> bin_labels, std::vector<std::string> impact_labels,
               std::vector<std::vector<RiskLevel>> cells)
        : bins_(std::move(bin_labels)), impacts_(std::move(impact_labels)), cells_(std::move(cells)) {
        if (bins_.empty() || impacts_.empty()) {
            throw InvariantError("MATRIX_TOTAL", "matrix needs at least one row and one column");
        }
        if (std::set<std::string>(bins_.begin(), bins_.end()).size() != bins_.size() ||
            std::set<std::string>(impacts_.begin(), impacts_.end()).size() != impacts_.size()) {
            throw InvariantError("MATRIX_LABELS", "row and column labels must be unique");
        }
        if (cells_.size() != bins_.size()) {
            throw InvariantError("MATRIX_TOTAL", "row count does not match bin labels");
        }
        for (std::size_t r = 0; r < cells_.size(); ++r) {
            if (cells_[r].size() != impacts_.size()) {
                throw InvariantError("MATRIX_TOTAL",
                                     "row '" + bins_[r] + "' does not populate every impact column");
            }
            for (std::size_t c = 0; c < cells_[r].size(); ++c) {
                if (c > 0 && cells_[r][c] < cells_[r][c - 1]) {
                    throw InvariantError("MATRIX_NOT_MONOTONE",
                                         "risk decreases along row '" + bins_[r] + "' at impact '" +
                                             impacts_[c] + "'");
                }
                if (r > 0 && cells_[r][c] < cells_[r - 1][c]) {
                    throw InvariantError("MATRIX_NOT_MONOTONE",
                                         "risk decreases down column '" + impacts_[c] + "' at bin '" +
                                             bins_[r] + "'");
                }
            }
        }
    }

    const std::vector<std::string>& bin_labels() const noexcept { return bins_; }
    const std::vector<std::string>& impact_labels() const noexcept { return impacts_; }
    const std::vector<std::vector<RiskLevel>>& cells() const noexcept { return cells_; }

    std::optional<RiskLevel> find(std::string_view bin, std::string_view impact) const {
        const auto r = std::find(bins_.begin(), bins_.end(), bin);
        const auto c = std::find(impacts_.begin(), impacts_.end(), impact);
        if (r == bins_.end() || c == impacts_.end()) return std::nullopt;
        return cells_[static_cast<std::size_t>(r - bins_.begin())]
                     [static_cast<std::size_t>(c - impacts_.begin())];
    }

    friend bool operator==(const RiskMatrix&, const RiskMatrix&) = default;

private:
    std::vector<std::string> bins_;
    std::vector<std::string> impacts_;
    std::vector<std::vector<RiskLevel>> cells_;
};

/// The scoring configuration a document is assessed under.
struct RiskModel {
    ScaleSet scales;
    ProbabilityBins bins;
    RiskMatrix matrix;

    friend bool operator==(const RiskModel&, const RiskModel&) = default;
};

// ---------------------------------------------------------------------------
// Closed enumerations used by documents
// ---------------------------------------------------------------------------

namespace detail {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table,
                           std::string_view text) {
    for (const auto& [value, name] : table) {
        if (name == text) return value;
    }
    return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum e) {
    for (const auto& [value, name] : table) {
        if (value == e) return name;
    }
    return "?";
}

template <typename Enum, std::size_t N>
std::vector<std::string_view> names(const std::array<std::pair<Enum, std::string_view>, N>& table) {
    std::vector<std::string_view> out;
    for (const auto& entry : table) out.push_back(entry.second);
    return out;
}

}  // namespace detail

#define TMODEL_ENUM_STRINGS(Enum, ...)                                                     \
    inline constexpr std::array k##Enum##Names = std::to_array<std::pair<Enum, std::string_view>>( \
        {__VA_ARGS__});                                                                     \
    inline std::string_view to_string(Enum e) { return detail::name_of(k##Enum##Names, e); } \
    inline std::optional<Enum> parse_##Enum(std::string_view s) {                          \
        return detail::lookup(k##Enum##Names, s);                                           \
    }

enum class SecurityProperty { confidentiality, integrity, availability, authenticity, privacy };
TMODEL_ENUM_STRINGS(SecurityProperty,
                    {SecurityProperty::confidentiality, "confidentiality"},
                    {SecurityProperty::integrity, "integrity"},
                    {SecurityProperty::availability, "availability"},
                    {SecurityProperty::authenticity, "authenticity"},
                    {SecurityProperty::privacy, "privacy"})

enum class DeviceCategory { injectable, ingestible, implantable, wearable };
TMODEL_ENUM_STRINGS(DeviceCategory,
                    {DeviceCategory::injectable, "injectable"},
                    {DeviceCategory::ingestible, "ingestible"},
                    {DeviceCategory::implantable, "implantable"},
                    {DeviceCategory::wearable, "wearable"})

enum class PrivacyGoal {
    device_existence,
    device_type,
    unique_device_id,
    measurement_and_log,
    patient,
    patient_location,
};
TMODEL_ENUM_STRINGS(PrivacyGoal,
                    {PrivacyGoal::device_existence, "device_existence"},
                    {PrivacyGoal::device_type, "device_type"},
                    {PrivacyGoal::unique_device_id, "unique_device_id"},
                    {PrivacyGoal::measurement_and_log, "measurement_and_log"},
                    {PrivacyGoal::patient, "patient"},
                    {PrivacyGoal::patient_location, "patient_location"})

enum class AttackerPosition { external, internal };
TMODEL_ENUM_STRINGS(AttackerPosition,
                    {AttackerPosition::external, "external"},
                    {AttackerPosition::internal, "internal"})

enum class AttackerActivity { passive, active };
TMODEL_ENUM_STRINGS(AttackerActivity,
                    {AttackerActivity::passive, "passive"},
                    {AttackerActivity::active, "active"})

enum class AttackerCardinality { individual, group };
TMODEL_ENUM_STRINGS(AttackerCardinality,
                    {AttackerCardinality::individual, "individual"},
                    {AttackerCardinality::group, "group"})

enum class AttackerSophistication { sophisticated, unsophisticated };
TMODEL_ENUM_STRINGS(AttackerSophistication,
                    {AttackerSophistication::sophisticated, "sophisticated"},
                    {AttackerSophistication::unsophisticated, "unsophisticated"})

#undef TMODEL_ENUM_STRINGS

// ---------------------------------------------------------------------------
// Architecture catalog
// ---------------------------------------------------------------------------

inline constexpr int kAttackPointCount = 11;

class AttackPoint {
public:
    AttackPoint(int number, std::string description, std::vector<std::string> example_attacks,
                bool in_scope)
        : number_(number),
          description_(std::move(description)),
          example_attacks_(std::move(example_attacks)),
          in_scope_(in_scope) {
        if (number_ < 1 || number_ > kAttackPointCount) {
            throw InvariantError("ATTACK_POINT_NUMBER",
                                 "attack point number " + std::to_string(number_) +
                                     " outside 1.." + std::to_string(kAttackPointCount));
        }
    }

    int number() const noexcept { return number_; }
    const std::string& description() const noexcept { return description_; }
    const std::vector<std::string>& example_attacks() const noexcept { return example_attacks_; }
    bool in_scope() const noexcept { return in_scope_; }

    friend bool operator==(const AttackPoint&, const AttackPoint&) = default;

private:
    int number_;
    std::string description_;
    std::vector<std::string> example_attacks_;
    bool in_scope_;
};

// ---------------------------------------------------------------------------
// Document entities
//
// Plain aggregates. Referential integrity and id uniqueness are document-level
// rules reported by validate_document so they can be surfaced as findings.
// ---------------------------------------------------------------------------

struct TeamMember {
    std::string name;
    std::string discipline;

    friend bool operator==(const TeamMember&, const TeamMember&) = default;
};

struct Assumptions {
    std::string operational_environment;
    std::vector<std::string> security_boundaries;
    std::vector<std::string> use_scenarios;
    std::vector<std::string> exclusions;

    friend bool operator==(const Assumptions&, const Assumptions&) = default;
};

struct Asset {
    std::string id;
    std::string name;
    bool tangible = true;
    std::string description;
    std::vector<PrivacyGoal> privacy_goals;

    friend bool operator==(const Asset&, const Asset&) = default;
};

struct Device {
    std::string id;
    std::string name;
    DeviceCategory category = DeviceCategory::wearable;
    std::string purpose;
    std::string status;
    std::vector<int> attack_points;
    std::vector<Asset> assets;

    friend bool operator==(const Device&, const Device&) = default;
};

struct AttackerProfile {
    std::string id;
    AttackerPosition position = AttackerPosition::external;
    AttackerActivity activity = AttackerActivity::active;
    AttackerCardinality cardinality = AttackerCardinality::individual;
    AttackerSophistication sophistication = AttackerSophistication::sophisticated;
    std::string description;

    friend bool operator==(const AttackerProfile&, const AttackerProfile&) = default;
};

struct ThreatTarget {
    std::string device;
    std::optional<std::string> impact;  // severity key; absent means unassessed
    std::optional<std::string> impact_rationale;

    friend bool operator==(const ThreatTarget&, const ThreatTarget&) = default;
};

struct Threat {
    std::string id;
    std::string description;
    std::vector<SecurityProperty> violates;
    std::vector<std::string> stride_tags;
    std::vector<std::string> attackers;
    std::vector<ThreatTarget> targets;
    std::optional<ScoreVector> scores;  // absent means unassessed
    std::map<std::string, ScoreVector> score_overrides;

    const ThreatTarget* find_target(std::string_view device_id) const {
        for (const auto& t : targets) {
            if (t.device == device_id) return &t;
        }
        return nullptr;
    }

    /// Per-device override if present, else the shared vector.
    std::optional<ScoreVector> effective_scores(std::string_view device_id) const {
        if (auto it = score_overrides.find(std::string(device_id)); it != score_overrides.end()) {
            return it->second;
        }
        return scores;
    }

    friend bool operator==(const Threat&, const Threat&) = default;
};

/// Computed record for one (threat, device) pair.
struct Assessment {
    std::string threat_id;
    std::string device_id;
    ScoreVector scores;
    int probability_total = 0;
    std::string probability_bin;
    std::string impact;
    int impact_value = 0;
    RiskLevel risk_level = RiskLevel::very_low;

    friend bool operator==(const Assessment&, const Assessment&) = default;
};

inline constexpr std::string_view kSchemaVersion = "1.0";

/// The unit of parsing and validation. `custom_model` is set only when the
/// document supplies its own scales, bins and matrix; otherwise the built-in
/// catalog applies (see effective_model).
struct ThreatModelDocument {
    std::string schema_version{kSchemaVersion};
    std::string title;
    std::vector<TeamMember> team;
    Assumptions assumptions;
    std::optional<RiskModel> custom_model;
    std::vector<Device> devices;
    std::vector<AttackerProfile> attackers;
    std::vector<Threat> threats;

    const Device* find_device(std::string_view id) const {
        for (const auto& d : devices) {
            if (d.id == id) return &d;
        }
        return nullptr;
    }

    const Threat* find_threat(std::string_view id) const {
        for (const auto& t : threats) {
            if (t.id == id) return &t;
        }
        return nullptr;
    }

    friend bool operator==(const ThreatModelDocument&, const ThreatModelDocument&) = default;
};

}  // namespace tmodel
