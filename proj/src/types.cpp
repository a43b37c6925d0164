#include "angsparse/types.hpp"

#include <cmath>

#include "angsparse/error.hpp"
#include "angsparse/rng.hpp"

namespace angsparse {

const char* to_string(Field field) {
  return field == Field::real ? "real" : "complex";
}

Field field_from_string(const std::string& name) {
  if (name == "complex") return Field::complex;
  if (name == "real") return Field::real;
  throw ConfigError("unknown field '" + name + "' (expected complex|real)");
}

CVector gaussian_vector(Eigen::Index size, Field field, Rng& rng,
                        bool per_component_unit) {
  CVector out(size);
  if (field == Field::real) {
    for (Eigen::Index i = 0; i < size; ++i) out[i] = Complex(standard_normal(rng), 0.0);
    return out;
  }
  const double scale = per_component_unit ? 1.0 : std::sqrt(0.5);
  for (Eigen::Index i = 0; i < size; ++i) {
    const double re = standard_normal(rng);
    const double im = standard_normal(rng);
    out[i] = Complex(scale * re, scale * im);
  }
  return out;
}

CMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Field field, Rng& rng) {
  CMatrix out(rows, cols);
  // Row-major fill so that the first k rows of an (m+1) x n draw equal an m x n
  // draw from the same seed.
  for (Eigen::Index r = 0; r < rows; ++r) {
    out.row(r) = gaussian_vector(cols, field, rng).transpose();
  }
  return out;
}

CVector uniform_sphere(Eigen::Index size, Field field, Rng& rng) {
  CVector c;
  double norm = 0.0;
  do {
    c = gaussian_vector(size, field, rng);
    norm = c.norm();
  } while (norm == 0.0);
  return c / norm;
}

}  // namespace angsparse
