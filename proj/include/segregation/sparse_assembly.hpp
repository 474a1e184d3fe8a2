#pragma once

// Compressed interior numbering and Eigen-backed direct solves for the
// indefinite and nonsymmetric Newton systems.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid_domain.hpp"

namespace segregation {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Interior nodes numbered 0..n-1 in ascending grid order.
struct InteriorIndex {
  std::vector<std::size_t> nodes;
  std::vector<int> index;  ///< per grid node, -1 outside

  explicit InteriorIndex(const GridDomain& d) : index(d.size(), -1) {
    nodes.reserve(d.interior_count());
    for (std::size_t p = 0; p < d.size(); ++p) {
      if (d.interior(p)) {
        index[p] = static_cast<int>(nodes.size());
        nodes.push_back(p);
      }
    }
  }

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Adds the 5-point stencil of every block (species) to a node-major system
/// where unknown (n, i) sits at row n * blocks + i.
inline void add_laplacian(const GridDomain& d, const InteriorIndex& ix, int blocks,
                          std::vector<Triplet>& out) {
  const double inv_h2 = 1.0 / (d.h() * d.h());
  for (std::size_t n = 0; n < ix.size(); ++n) {
    const auto p = ix.nodes[n];
    for (int b = 0; b < blocks; ++b) {
      const int row = static_cast<int>(n) * blocks + b;
      out.emplace_back(row, row, 4.0 * inv_h2);
      for (auto q : d.neighbours(p)) {
        if (ix.index[q] >= 0) out.emplace_back(row, ix.index[q] * blocks + b, -inv_h2);
      }
    }
  }
}

/// Sparse LU with the symbolic analysis reused across factorizations of a
/// fixed sparsity pattern.
class DirectSolver {
public:
  void factorize(const SparseMatrix& m) {
    if (!analyzed_ || m.rows() != rows_ || m.nonZeros() != nnz_) {
      lu_.analyzePattern(m);
      analyzed_ = true;
      rows_ = m.rows();
      nnz_ = m.nonZeros();
    }
    lu_.factorize(m);
    if (lu_.info() != Eigen::Success)
      throw LinearSolveError("sparse LU factorization failed: " + lu_.lastErrorMessage(), -1.0, 0);
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) {
    Eigen::VectorXd x = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success) throw LinearSolveError("sparse LU solve failed", -1.0, 0);
    return x;
  }

private:
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
  Eigen::Index rows_ = 0;
  Eigen::Index nnz_ = 0;
};

}  // namespace segregation
