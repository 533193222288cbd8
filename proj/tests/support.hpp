#ifndef PLACEMETRICS_TESTS_SUPPORT_HPP
#define PLACEMETRICS_TESTS_SUPPORT_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <placemetrics/core.hpp>
#include <placemetrics/synth.hpp>

namespace testing_support {

namespace pm = placemetrics;

inline std::size_t draw(std::mt19937_64& gen, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
}

/// Random 0/1 matrix; each row gets its own success rate so totals spread out.
inline pm::ResponseMatrix random_matrix(std::mt19937_64& gen, std::size_t n, std::size_t m, bool labelled) {
    std::vector<pm::StudentRecord> rows;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double rate = unit(gen);
        pm::StudentRecord r;
        r.id = pm::synth::student_id(i);
        for (std::size_t j = 0; j < m; ++j) {
            r.responses.push_back(unit(gen) < rate ? 1 : 0);
        }
        if (labelled) {
            r.label = pm::placement(pm::total_score(r).percent);
        }
        rows.push_back(std::move(r));
    }
    return pm::ResponseMatrix(std::move(rows), m);
}

inline pm::ResponseMatrix from_rows(const std::vector<std::vector<std::uint8_t>>& rows,
                                    const std::vector<pm::PlacementLabel>& labels = {}) {
    std::vector<pm::StudentRecord> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        pm::StudentRecord r{pm::synth::student_id(i), rows[i], std::nullopt};
        if (!labels.empty()) {
            r.label = labels[i];
        }
        out.push_back(std::move(r));
    }
    return pm::ResponseMatrix(std::move(out), rows.empty() ? 1 : rows.front().size());
}

} // namespace testing_support

#endif
