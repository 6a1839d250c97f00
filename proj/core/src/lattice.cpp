#include "lindqmc/lattice.hpp"

#include <stdexcept>
#include <string>

namespace lindqmc {

Lattice::Lattice(int lx, int ly) : lx_(lx), ly_(ly) {
  const bool single_site = lx == 1 && ly == 1;
  if (!single_site && (lx < 2 || ly < 2)) {
    throw std::invalid_argument("lattice extents must be >= 2 (got " +
                                std::to_string(lx) + "x" + std::to_string(ly) +
                                ")");
  }
}

int Lattice::site(int x, int y) const {
  if (x < 0 || x >= lx_ || y < 0 || y >= ly_) {
    throw std::invalid_argument("site (" + std::to_string(x) + "," +
                                std::to_string(y) + ") outside " +
                                std::to_string(lx_) + "x" +
                                std::to_string(ly_) + " lattice");
  }
  return x + lx_ * y;
}

Eigen::MatrixXd Lattice::adjacency() const {
  const int v = volume();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(v, v);
  if (v == 1) return a;
  for (int y = 0; y < ly_; ++y) {
    for (int x = 0; x < lx_; ++x) {
      const int here = site(x, y);
      const int right = site((x + 1) % lx_, y);
      const int up = site(x, (y + 1) % ly_);
      a(here, right) += 1.0;
      a(right, here) += 1.0;
      a(here, up) += 1.0;
      a(up, here) += 1.0;
    }
  }
  return a;
}

}  // namespace lindqmc
