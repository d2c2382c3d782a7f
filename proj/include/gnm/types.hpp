#ifndef GNM_TYPES_HPP
#define GNM_TYPES_HPP

#include <Eigen/Dense>

namespace gnm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

} // namespace gnm

#endif // GNM_TYPES_HPP
