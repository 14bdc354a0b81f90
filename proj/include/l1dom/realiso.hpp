#pragma once

// Real isomorph of complex vectors and matrices.
//
//   x in C^r      ->  [Re x; Im x]                 in R^{2r}
//   X in C^{r x s} -> [Re X, -Im X; Im X, Re X]    in R^{2r x 2s}
//
// The map commutes with products, so every solver in this library works on
// the real image. Note that the l1 norm of the image is
// sum(|Re x_i| + |Im x_i|), not the sum of complex moduli; the estimators
// minimize the former.

#include "l1dom/types.hpp"

namespace l1dom {

RealVector vector_to_real(const ComplexVector& v);
RealMatrix matrix_to_real(const ComplexMatrix& x);

/// Inverse of vector_to_real. Throws DimensionError on odd length.
ComplexVector real_to_vector(const RealVector& w);

/// Inverse of matrix_to_real; only the left block column is read.
ComplexMatrix real_to_matrix(const RealMatrix& w);

bool all_finite(const ComplexMatrix& x);
bool all_finite(const RealMatrix& x);

}  // namespace l1dom
