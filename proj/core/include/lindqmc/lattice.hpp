#pragma once

#include <Eigen/Dense>

namespace lindqmc {

/// Periodic lx x ly square lattice with row-major site ordering.
///
/// Both extents must be >= 2. The single-site lattice (1 x 1) is accepted as a
/// degenerate case without bonds; it is what the one-site closed forms use.
class Lattice {
 public:
  Lattice(int lx, int ly);

  int lx() const { return lx_; }
  int ly() const { return ly_; }
  int volume() const { return lx_ * ly_; }

  /// x + lx * y. Throws std::invalid_argument for coordinates off the lattice.
  int site(int x, int y) const;

  /// Bond-count matrix of sum_{x, i=x,y} (c+_x c_{x+i} + h.c.).
  ///
  /// With an extent of 2 the forward and wrapped bonds coincide, so the
  /// corresponding entries are 2.
  Eigen::MatrixXd adjacency() const;

 private:
  int lx_;
  int ly_;
};

}  // namespace lindqmc
