#include "l1dom/realiso.hpp"

#include "l1dom/errors.hpp"

namespace l1dom {

bool all_finite(const ComplexMatrix& x) {
  return x.real().allFinite() && x.imag().allFinite();
}

bool all_finite(const RealMatrix& x) { return x.allFinite(); }

RealVector vector_to_real(const ComplexVector& v) {
  if (!all_finite(ComplexMatrix(v))) {
    throw DomainError("vector_to_real: non-finite entry");
  }
  const Eigen::Index r = v.size();
  RealVector out(2 * r);
  out.head(r) = v.real();
  out.tail(r) = v.imag();
  return out;
}

RealMatrix matrix_to_real(const ComplexMatrix& x) {
  if (!all_finite(x)) {
    throw DomainError("matrix_to_real: non-finite entry");
  }
  const Eigen::Index r = x.rows();
  const Eigen::Index s = x.cols();
  RealMatrix out(2 * r, 2 * s);
  out.topLeftCorner(r, s) = x.real();
  out.topRightCorner(r, s) = -x.imag();
  out.bottomLeftCorner(r, s) = x.imag();
  out.bottomRightCorner(r, s) = x.real();
  return out;
}

ComplexVector real_to_vector(const RealVector& w) {
  if (w.size() % 2 != 0) {
    throw DimensionError("real_to_vector: odd length " +
                         std::to_string(w.size()));
  }
  const Eigen::Index r = w.size() / 2;
  ComplexVector out(r);
  for (Eigen::Index i = 0; i < r; ++i) out(i) = Complex(w(i), w(r + i));
  return out;
}

ComplexMatrix real_to_matrix(const RealMatrix& w) {
  if (w.rows() % 2 != 0 || w.cols() % 2 != 0) {
    throw DimensionError("real_to_matrix: odd dimension");
  }
  const Eigen::Index r = w.rows() / 2;
  const Eigen::Index s = w.cols() / 2;
  ComplexMatrix out(r, s);
  out.real() = w.topLeftCorner(r, s);
  out.imag() = w.bottomLeftCorner(r, s);
  return out;
}

}  // namespace l1dom
