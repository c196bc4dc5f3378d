#pragma once

#include <Eigen/Dense>

namespace pgg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace pgg
