#pragma once

#include <Eigen/Core>
#include <complex>

namespace irsim {

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexArrayX = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>;

using ArrayXd = ArrayX<double>;
using ArrayXi = Eigen::ArrayXi;

inline constexpr double kTwoPi = 6.28318530717958647692528676656;

enum class Scenario {
  kNoDirectLink,    // users reached through their surface only
  kWithDirectLink,  // base-station-to-user path present as well
};

enum class MultipleAccess { kNoma, kOma };

}  // namespace irsim
