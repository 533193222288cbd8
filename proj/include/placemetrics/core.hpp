#ifndef PLACEMETRICS_CORE_HPP
#define PLACEMETRICS_CORE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "error.hpp"
#include "stats.hpp"

namespace placemetrics {

/// Institutional placement category, ordered by rank.
enum class PlacementLabel : std::uint8_t { CollegeAlgebra = 0, Precalculus = 1, CalculusI = 2 };

inline constexpr std::size_t kLabelCount = 3;
inline constexpr std::array<PlacementLabel, kLabelCount> kAllLabels = {
    PlacementLabel::CollegeAlgebra, PlacementLabel::Precalculus, PlacementLabel::CalculusI};

/// Per-label tallies indexed by rank.
using LabelCounts = std::array<std::size_t, kLabelCount>;

constexpr std::size_t rank(PlacementLabel label) noexcept { return static_cast<std::size_t>(label); }

inline PlacementLabel label_from_rank(std::size_t r) {
    if (r >= kLabelCount) {
        throw Error(ErrorKind::Domain, "placement rank out of range: " + std::to_string(r));
    }
    return static_cast<PlacementLabel>(r);
}

/// CSV spelling.
constexpr std::string_view to_string(PlacementLabel label) noexcept {
    switch (label) {
    case PlacementLabel::CollegeAlgebra: return "college_algebra";
    case PlacementLabel::Precalculus: return "precalculus";
    case PlacementLabel::CalculusI: return "calculus_1";
    }
    return "college_algebra";
}

inline std::optional<PlacementLabel> parse_label(std::string_view text) {
    for (PlacementLabel label : kAllLabels) {
        if (text == to_string(label)) {
            return label;
        }
    }
    return std::nullopt;
}

struct StudentRecord {
    std::string id;
    std::vector<std::uint8_t> responses;
    std::optional<PlacementLabel> label;

    bool operator==(const StudentRecord&) const = default;
};

/**
 * @brief Binary item-response matrix with student identifiers and optional labels.
 *
 * Rows are validated on construction: equal width, 0/1 cells, unique ids and
 * all-or-nothing labels. Instances are immutable.
 */
class ResponseMatrix {
public:
    ResponseMatrix() = default;

    ResponseMatrix(std::vector<StudentRecord> students, std::size_t item_count)
        : students_(std::move(students)), item_count_(item_count) {
        if (item_count_ == 0) {
            throw Error(ErrorKind::Validation, "item count must be positive");
        }
        std::unordered_set<std::string> ids;
        std::size_t labelled = 0;
        for (std::size_t i = 0; i < students_.size(); ++i) {
            const auto& row = students_[i];
            if (row.responses.size() != item_count_) {
                throw Error(ErrorKind::Validation, "row " + std::to_string(i) + " (" + row.id + ") has " +
                                                       std::to_string(row.responses.size()) + " responses, expected " +
                                                       std::to_string(item_count_));
            }
            for (std::size_t j = 0; j < item_count_; ++j) {
                if (row.responses[j] > 1) {
                    throw Error(ErrorKind::Validation,
                                "row " + std::to_string(i) + " column " + std::to_string(j) + " is not 0/1");
                }
            }
            if (!ids.insert(row.id).second) {
                throw Error(ErrorKind::Validation, "duplicate student id: " + row.id);
            }
            labelled += row.label.has_value() ? 1 : 0;
        }
        if (labelled != 0 && labelled != students_.size()) {
            throw Error(ErrorKind::Validation, "labels must be present for all students or none");
        }
        has_labels_ = labelled != 0;
    }

    std::size_t student_count() const noexcept { return students_.size(); }
    std::size_t item_count() const noexcept { return item_count_; }
    bool has_labels() const noexcept { return has_labels_; }

    const std::vector<StudentRecord>& students() const noexcept { return students_; }
    const StudentRecord& student(std::size_t i) const { return students_.at(i); }

    std::uint8_t at(std::size_t student, std::size_t item) const { return students_[student].responses[item]; }

    std::vector<double> column(std::size_t item) const {
        check_item(item);
        std::vector<double> out(students_.size());
        for (std::size_t i = 0; i < students_.size(); ++i) {
            out[i] = students_[i].responses[item];
        }
        return out;
    }

    /// Label of student i; throws on an unlabelled matrix.
    PlacementLabel label(std::size_t i) const {
        require_labels();
        return *students_[i].label;
    }

    std::vector<PlacementLabel> labels() const {
        require_labels();
        std::vector<PlacementLabel> out;
        out.reserve(students_.size());
        for (const auto& s : students_) {
            out.push_back(*s.label);
        }
        return out;
    }

    LabelCounts label_counts() const {
        require_labels();
        LabelCounts counts{};
        for (const auto& s : students_) {
            ++counts[rank(*s.label)];
        }
        return counts;
    }

    void check_item(std::size_t item) const {
        if (item >= item_count_) {
            throw Error(ErrorKind::Domain, "item index " + std::to_string(item) + " out of range");
        }
    }

    void require_labels() const {
        if (!has_labels_) {
            throw Error(ErrorKind::Validation, "operation requires placement labels");
        }
    }

    /// Subset of rows in the given order (duplicates not allowed: ids must stay unique).
    ResponseMatrix select(std::span<const std::size_t> rows) const {
        std::vector<StudentRecord> picked;
        picked.reserve(rows.size());
        for (std::size_t r : rows) {
            picked.push_back(students_.at(r));
        }
        return ResponseMatrix(std::move(picked), item_count_);
    }

    bool operator==(const ResponseMatrix&) const = default;

private:
    std::vector<StudentRecord> students_;
    std::size_t item_count_ = 0;
    bool has_labels_ = false;
};

struct TotalScore {
    std::size_t raw = 0;
    double percent = 0.0;
};

inline TotalScore total_score(std::span<const std::uint8_t> responses) {
    TotalScore score;
    for (std::uint8_t x : responses) {
        score.raw += x;
    }
    score.percent = responses.empty() ? 0.0
                                      : 100.0 * static_cast<double>(score.raw) / static_cast<double>(responses.size());
    return score;
}

inline TotalScore total_score(const StudentRecord& row) { return total_score(row.responses); }

inline std::vector<double> raw_totals(const ResponseMatrix& matrix) {
    std::vector<double> out;
    out.reserve(matrix.student_count());
    for (const auto& s : matrix.students()) {
        out.push_back(static_cast<double>(total_score(s).raw));
    }
    return out;
}

inline std::vector<double> percent_scores(const ResponseMatrix& matrix) {
    std::vector<double> out;
    out.reserve(matrix.student_count());
    for (const auto& s : matrix.students()) {
        out.push_back(total_score(s).percent);
    }
    return out;
}

/// Institutional cut scores: <= 55 College Algebra, (55, 70] Precalculus, > 70 Calculus I.
inline constexpr double kPrecalculusCut = 55.0;
inline constexpr double kCalculusCut = 70.0;

inline PlacementLabel placement(double percent) {
    if (!(percent >= 0.0 && percent <= 100.0)) {
        throw Error(ErrorKind::Domain, "percent score outside [0, 100]");
    }
    if (percent <= kPrecalculusCut) {
        return PlacementLabel::CollegeAlgebra;
    }
    if (percent <= kCalculusCut) {
        return PlacementLabel::Precalculus;
    }
    return PlacementLabel::CalculusI;
}

struct ScoreSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
    double variance = 0.0;
    double min = 0.0;
    double max = 0.0;
    double range = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    /// Absent for n < 4 or when all scores are equal.
    std::optional<double> skewness;
    std::optional<double> excess_kurtosis;
};

/**
 * Descriptive statistics with sample (n - 1) variance, linearly interpolated
 * quartiles, bias-adjusted skewness G1 and bias-adjusted excess kurtosis G2.
 */
inline ScoreSummary describe(std::span<const double> scores) {
    if (scores.empty()) {
        throw Error(ErrorKind::InsufficientData, "describe requires at least one score");
    }
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());

    ScoreSummary s;
    s.n = sorted.size();
    s.mean = stats::mean(sorted);
    s.variance = stats::sample_variance(sorted);
    s.sd = std::sqrt(s.variance);
    s.min = sorted.front();
    s.max = sorted.back();
    s.range = s.max - s.min;
    s.median = stats::quantile_sorted(sorted, 0.5);
    s.q1 = stats::quantile_sorted(sorted, 0.25);
    s.q3 = stats::quantile_sorted(sorted, 0.75);
    s.iqr = s.q3 - s.q1;

    const double n = static_cast<double>(s.n);
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : sorted) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 0.0 && s.n >= 4) {
        const double g1 = m3 / std::pow(m2, 1.5);
        s.skewness = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
    }
    if (m2 > 0.0 && s.n >= 4) {
        const double g2 = m4 / (m2 * m2) - 3.0;
        s.excess_kurtosis = ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
    }
    return s;
}

} // namespace placemetrics

#endif
