#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "grid.hpp"

namespace qmcap {

enum class KernelKind { storage, total, product };

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::storage: return "storage";
    case KernelKind::total: return "total";
    case KernelKind::product: return "product";
  }
  return "?";
}

struct DiscretizedKernel {
  Eigen::MatrixXcd values;
  Grid row_grid;
  Grid col_grid;
  KernelKind kind = KernelKind::storage;
  std::string provenance;

  bool all_finite() const { return values.allFinite(); }

  // Largest |K - K^dagger| relative to max |K|.
  double hermitian_defect() const {
    if (values.rows() != values.cols()) return INFINITY;
    double scale = values.cwiseAbs().maxCoeff();
    if (scale == 0) return 0.0;
    return (values - values.adjoint()).cwiseAbs().maxCoeff() / scale;
  }

  void validate() const {
    require(values.rows() == Eigen::Index(row_grid.size()) && values.cols() == Eigen::Index(col_grid.size()),
            "kernel: matrix dimensions match grids");
    require(all_finite(), "kernel: entries finite");
    if (kind == KernelKind::product) {
      require(row_grid == col_grid, "kernel: product kernel has row_grid == col_grid");
      require(hermitian_defect() <= 1e-10, "kernel: product kernel Hermitian within 1e-10");
    }
  }
};

}  // namespace qmcap
