#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

namespace cusp {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

} // namespace cusp
