#pragma once

#include <vector>

#include <Eigen/Dense>

namespace liesphere {

/// Jacobian of fn at b by central differences with one Richardson step,
/// D = (4 D(h/2) - D(h)) / 3, accurate to O(h^4).
template <class Fn>
Eigen::MatrixXd fd_jacobian(Fn&& fn, const Eigen::VectorXd& b, double h) {
  const Eigen::Index k = b.size();
  Eigen::MatrixXd jac;
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd step = Eigen::VectorXd::Zero(k);
    step[j] = h;
    const Eigen::VectorXd coarse = (fn(Eigen::VectorXd(b + step)) - fn(Eigen::VectorXd(b - step))) / (2.0 * h);
    const Eigen::VectorXd fine =
        (fn(Eigen::VectorXd(b + 0.5 * step)) - fn(Eigen::VectorXd(b - 0.5 * step))) / h;
    if (j == 0) jac.resize(coarse.size(), k);
    jac.col(j) = (4.0 * fine - coarse) / 3.0;
  }
  return jac;
}

/// Second partials of fn at b, one matrix per output component (k x k), by
/// Richardson-extrapolated central differences.
template <class Fn>
std::vector<Eigen::MatrixXd> fd_hessians(Fn&& fn, const Eigen::VectorXd& b, double h) {
  const Eigen::Index k = b.size();
  auto second = [&](Eigen::Index i, Eigen::Index j, double s) -> Eigen::VectorXd {
    Eigen::VectorXd ei = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(k);
    ei[i] = s;
    ej[j] = s;
    if (i == j) {
      return (fn(Eigen::VectorXd(b + ei)) - 2.0 * fn(b) + fn(Eigen::VectorXd(b - ei))) / (s * s);
    }
    return (fn(Eigen::VectorXd(b + ei + ej)) - fn(Eigen::VectorXd(b + ei - ej)) -
            fn(Eigen::VectorXd(b - ei + ej)) + fn(Eigen::VectorXd(b - ei - ej))) /
           (4.0 * s * s);
  };
  std::vector<Eigen::MatrixXd> out;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) {
      const Eigen::VectorXd d = (4.0 * second(i, j, 0.5 * h) - second(i, j, h)) / 3.0;
      if (out.empty()) out.assign(static_cast<std::size_t>(d.size()), Eigen::MatrixXd::Zero(k, k));
      for (Eigen::Index c = 0; c < d.size(); ++c) {
        out[static_cast<std::size_t>(c)](i, j) = d[c];
        out[static_cast<std::size_t>(c)](j, i) = d[c];
      }
    }
  }
  return out;
}

}  // namespace liesphere
