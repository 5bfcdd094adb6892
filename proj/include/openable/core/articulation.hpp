#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "openable/core/types.hpp"

namespace openable {

enum class JointType { kPrismatic, kRevolute };

std::string_view to_string(JointType t);
/// Accepts "prismatic" / "revolute"; throws InvalidInput otherwise.
JointType joint_type_from_string(std::string_view s);

/// Joint tuple (type, origin, axis, range). Range is meters for prismatic,
/// radians for revolute. Prismatic origins are informational only.
struct Articulation {
  JointType type = JointType::kPrismatic;
  Vec3 origin = Vec3::Zero();
  UnitVec3 axis;
  double range = 0.0;
};

}  // namespace openable
