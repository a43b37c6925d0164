#pragma once

#include <complex>
#include <string>

#include <Eigen/Core>

namespace angsparse {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// Scalar field of channels, pilots and Gaussian test vectors. Real data is
// stored in complex containers with zero imaginary parts.
enum class Field { complex, real };

const char* to_string(Field field);
Field field_from_string(const std::string& name);

}  // namespace angsparse
