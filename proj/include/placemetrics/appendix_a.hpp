#ifndef PLACEMETRICS_APPENDIX_A_HPP
#define PLACEMETRICS_APPENDIX_A_HPP

#include <array>
#include <cstddef>

// Reference item table of the 40-item placement exam (198 students):
// difficulty p, upper-lower 27% discrimination D, point-biserial r.
// These are calibration targets for the simulator and reference values for tests.

namespace placemetrics::appendix_a {

inline constexpr std::size_t kItems = 40;
inline constexpr std::size_t kStudents = 198;

/// Category counts implied by the Q6 worked example and the k = 2 cluster table.
inline constexpr std::array<std::size_t, 3> kGroupSizes = {118, 59, 21};

/// Q6 (index 5): correct answers per placement group.
inline constexpr std::size_t kQ6Index = 5;
inline constexpr std::array<std::size_t, 3> kQ6GroupCorrect = {1, 59, 21};

inline constexpr std::array<double, kItems> kDifficulty = {
    0.111, 0.419, 0.702, 0.934, 0.101, 0.409, 0.606, 0.040, 0.869, 0.338,  //
    0.571, 0.258, 0.273, 0.848, 0.056, 0.066, 0.197, 0.045, 0.056, 0.894,  //
    0.157, 0.035, 0.934, 0.652, 0.763, 0.505, 0.480, 0.929, 0.879, 0.384,  //
    0.611, 0.934, 0.081, 0.652, 0.687, 0.798, 0.061, 0.040, 0.217, 0.929,
};

inline constexpr std::array<double, kItems> kDiscrimination = {
    0.358, 0.943, 0.906, 0.019, 0.283, 1.000, 0.962, 0.113, 0.208, 0.925,  //
    1.000, 0.849, 0.887, 0.472, 0.151, 0.132, 0.509, 0.094, 0.189, 0.302,  //
    0.453, 0.094, 0.057, 0.925, 0.679, 0.962, 0.925, 0.132, 0.396, 0.943,  //
    0.906, 0.075, 0.226, 0.962, 0.906, 0.585, 0.189, 0.057, 0.679, 0.189,
};

inline constexpr std::array<double, kItems> kPointBiserial = {
    0.501, 0.796, 0.694, 0.070, 0.436, 0.812, 0.800, 0.252, 0.335, 0.730,  //
    0.834, 0.635, 0.662, 0.563, 0.306, 0.233, 0.505, 0.252, 0.393, 0.455,  //
    0.489, 0.248, 0.154, 0.716, 0.591, 0.810, 0.774, 0.268, 0.557, 0.767,  //
    0.781, 0.132, 0.347, 0.782, 0.678, 0.614, 0.310, 0.144, 0.628, 0.358,
};

} // namespace placemetrics::appendix_a

#endif
