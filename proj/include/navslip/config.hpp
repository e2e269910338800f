#pragma once

/// @file config.hpp
/// @brief Sectioned key = value configuration files.
///
///   [grid]    nx, ny, lx, ly
///   [physics] viscosity, friction, density_diffusivity (number or auto),
///             density_floor, flux_mode, diffusion (explicit|implicit),
///             eps_compensation, smoothing
///   [solver]  dt, t_end, poisson_tol, viscous_tol, max_iterations
///   [output]  snapshot_every
///
/// '#' starts a comment. Unknown sections or keys are errors.

#include <string>

#include "navslip/scenarios.hpp"

namespace navslip {

/// Applies the settings in `text` on top of `base`; `origin` names the source in errors.
RunSettings parse_settings(const std::string& text, RunSettings base, const std::string& origin = "config");

RunSettings load_settings(const std::string& path, const RunSettings& base);

} // namespace navslip
