#pragma once

/// @file linear_solver.hpp
/// @brief Thin wrapper over the sparse direct solvers used by the Newton mass
/// update and the pressure Poisson problem. UMFPACK is used when the build
/// defines APMAC_HAVE_UMFPACK, Eigen's SparseLU otherwise.

#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#ifdef APMAC_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace apmac {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vector = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double, int>;

/// Factorises matrices that share one sparsity pattern; the symbolic analysis
/// is done once and reused for every subsequent factorisation.
class SparseDirectSolver {
 public:
  void factorize(const SparseMatrix& a) {
    // UmfPackLU keeps a reference to the matrix, so hold our own copy.
    a_ = a;
    a_.makeCompressed();
    if (!analyzed_ || a_.rows() != rows_) {
      lu_.analyzePattern(a_);
      analyzed_ = true;
      rows_ = a_.rows();
    }
    lu_.factorize(a_);
    if (lu_.info() != Eigen::Success) throw std::runtime_error("sparse factorisation failed");
  }

  Vector solve(const Vector& b) const {
    Vector x = lu_.solve(b);
    if (lu_.info() != Eigen::Success) throw std::runtime_error("sparse solve failed");
    return x;
  }

  void reset() { analyzed_ = false; }

 private:
#ifdef APMAC_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu_;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
#endif
  SparseMatrix a_;
  bool analyzed_ = false;
  Eigen::Index rows_ = -1;
};

}  // namespace apmac
