#pragma once

#include <Eigen/Core>

namespace hybrid {

// Momentum update v <- alpha v - epsilon g, p <- p + v. Works for any
// conformable Eigen expressions (real or complex).
template <typename Param, typename Grad, typename Velocity>
void sgd_momentum_step(Eigen::MatrixBase<Param>& params, const Eigen::MatrixBase<Grad>& grads,
                       Eigen::MatrixBase<Velocity>& velocity, double alpha, double epsilon) {
    eigen_assert(params.rows() == grads.rows() && params.cols() == grads.cols());
    eigen_assert(params.rows() == velocity.rows() && params.cols() == velocity.cols());
    velocity = alpha * velocity - epsilon * grads;
    params += velocity;
}

} // namespace hybrid
