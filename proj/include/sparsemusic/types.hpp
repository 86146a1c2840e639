#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sparsemusic {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// Sorted, duplicate-free list of grid (column) indices.
using IndexSet = std::vector<std::size_t>;

// Raised when a problem is well-formed but numerically or physically
// unsolvable: resonance, rank loss, empty noise space, vanishing kernels.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace sparsemusic
