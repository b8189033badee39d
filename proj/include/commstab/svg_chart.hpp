#pragma once

#include <string>

#include "commstab/dynamics.hpp"

namespace commstab {

// Self-contained SVG line chart of the four boundary offsets over time.
std::string trajectory_svg(const Trajectory& traj);

}  // namespace commstab
