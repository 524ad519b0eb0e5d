#pragma once

#include "mga/epoch.hpp"
#include "mga/types.hpp"

namespace mga
{

/// Heliocentric position (km) and velocity (km/s) at an epoch.
struct CartesianState
{
    Vec3 r{Vec3::Zero()};
    Vec3 v{Vec3::Zero()};
    Epoch epoch{};
};

}  // namespace mga
