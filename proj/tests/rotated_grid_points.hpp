#pragma once

// 5x5 grid at (1..5)^2 rotated by -30 degrees about (3, 3), x varying fastest,
// rounded to four decimals.
namespace grid_points {

inline constexpr double kRotatedPoints[25][2] = {
    {0.2679, 2.2679},
    {1.1340, 1.7679},
    {2.0000, 1.2679},
    {2.8660, 0.7679},
    {3.7321, 0.2679},
    {0.7679, 3.1340},
    {1.6340, 2.6340},
    {2.5000, 2.1340},
    {3.3660, 1.6340},
    {4.2321, 1.1340},
    {1.2679, 4.0000},
    {2.1340, 3.5000},
    {3.0000, 3.0000},
    {3.8660, 2.5000},
    {4.7321, 2.0000},
    {1.7679, 4.8660},
    {2.6340, 4.3660},
    {3.5000, 3.8660},
    {4.3660, 3.3660},
    {5.2321, 2.8660},
    {2.2679, 5.7321},
    {3.1340, 5.2321},
    {4.0000, 4.7321},
    {4.8660, 4.2321},
    {5.7321, 3.7321},
};

}  // namespace grid_points
