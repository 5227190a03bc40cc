#pragma once

namespace moransar::tol {

// Exact linear-algebra identities (absolute).
inline constexpr double kExact = 1e-12;
// Data-dependent identities (relative).
inline constexpr double kData = 1e-9;
// Eigen-relation residuals.
inline constexpr double kEigen = 1e-10;
// Relative asymmetry of distance input that triggers a warning or, in strict
// mode, an error.
inline constexpr double kAsymmetry = 1e-6;
// |I| below this is reported as a zero Moran's index.
inline constexpr double kZeroMoran = 1e-12;
// R^2 below this makes I^2/R^2 meaningless.
inline constexpr double kZeroRSquared = 1e-15;

}  // namespace moransar::tol
