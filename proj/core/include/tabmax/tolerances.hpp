#pragma once

namespace tabmax {

// Numeric tolerances shared by the library and its test suites.
inline constexpr double kDistributionSumTolerance = 1e-9;
inline constexpr double kScaleInvarianceTolerance = 1e-12;
inline constexpr double kExampleCheckTolerance = 1e-6;

}  // namespace tabmax
