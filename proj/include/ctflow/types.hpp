#ifndef CTFLOW_TYPES_HPP
#define CTFLOW_TYPES_HPP

#include <Eigen/Core>

namespace ctflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Parameter blocks are row-major views into the flat store, so that the
// entry W(i,j) sits at offset + i*cols + j.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatView = Eigen::Map<RowMat>;
using ConstMatView = Eigen::Map<const RowMat>;
using VecView = Eigen::Map<Vec>;
using ConstVecView = Eigen::Map<const Vec>;

enum class Scheme { euler, rk4 };

}  // namespace ctflow

#endif
