#pragma once

// Central numeric tolerances. Dimensions stay small (d <= 16 hard cap,
// d <= 4 in practice), so dense double precision leaves ample headroom.
namespace qmcert::tol {

inline constexpr double hermiticity = 1e-10;
inline constexpr double psd = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double trace_preserving = 1e-9;
inline constexpr double reconstruction = 1e-9;
inline constexpr double rank_cutoff = 1e-10;
inline constexpr double certification_margin = 1e-9;

inline constexpr int dimension_cap = 16;

}  // namespace qmcert::tol
