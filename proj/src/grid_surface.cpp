#include "liesphere/grid_surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace liesphere {

namespace {

// Tensor-product natural cubic spline in moment form. tables[S] holds the data
// with the moment operator applied along every axis in the bit set S.
class TensorSpline {
 public:
  explicit TensorSpline(const SampledGrid& g) : axes_(g.axes), n_(g.n) {
    const int k = static_cast<int>(axes_.size());
    sizes_.resize(static_cast<std::size_t>(k));
    strides_.assign(static_cast<std::size_t>(k), 1);
    for (int a = k - 1; a >= 0; --a) {
      sizes_[static_cast<std::size_t>(a)] = static_cast<int>(axes_[static_cast<std::size_t>(a)].size());
      if (a + 1 < k) strides_[static_cast<std::size_t>(a)] = strides_[static_cast<std::size_t>(a) + 1] * sizes_[static_cast<std::size_t>(a) + 1];
    }
    total_ = static_cast<int>(g.positions.size());
    Eigen::MatrixXd base(n_, total_);
    for (int i = 0; i < total_; ++i) base.col(i) = g.positions[static_cast<std::size_t>(i)];
    tables_.resize(std::size_t{1} << k);
    tables_[0] = base;
    for (std::size_t s = 1; s < tables_.size(); ++s) {
      int a = 0;
      while (!(s & (std::size_t{1} << a))) ++a;
      tables_[s] = moments(tables_[s & ~(std::size_t{1} << a)], a);
    }
  }

  // Value (deriv = -1) or partial derivative along axis `deriv`.
  Eigen::VectorXd eval(const Eigen::VectorXd& b, int deriv = -1) const {
    const int k = static_cast<int>(axes_.size());
    std::vector<int> cell(static_cast<std::size_t>(k));
    std::vector<std::array<double, 2>> wv(static_cast<std::size_t>(k)), wm(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) {
      const auto& x = axes_[static_cast<std::size_t>(a)];
      const int m = static_cast<int>(x.size());
      int i = static_cast<int>(std::upper_bound(x.begin(), x.end(), b[a]) - x.begin()) - 1;
      i = std::clamp(i, 0, m - 2);
      cell[static_cast<std::size_t>(a)] = i;
      const double h = x[static_cast<std::size_t>(i) + 1] - x[static_cast<std::size_t>(i)];
      const double A = (x[static_cast<std::size_t>(i) + 1] - b[a]) / h;
      const double B = 1.0 - A;
      auto& v = wv[static_cast<std::size_t>(a)];
      auto& mo = wm[static_cast<std::size_t>(a)];
      if (a == deriv) {
        v = {-1.0 / h, 1.0 / h};
        mo = {-(3 * A * A - 1) * h / 6.0, (3 * B * B - 1) * h / 6.0};
      } else {
        v = {A, B};
        mo = {(A * A * A - A) * h * h / 6.0, (B * B * B - B) * h * h / 6.0};
      }
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
    const std::size_t corners = std::size_t{1} << k;
    for (std::size_t c = 0; c < corners; ++c) {
      int flat = 0;
      for (int a = 0; a < k; ++a) {
        flat += (cell[static_cast<std::size_t>(a)] + static_cast<int>((c >> a) & 1)) * strides_[static_cast<std::size_t>(a)];
      }
      for (std::size_t s = 0; s < tables_.size(); ++s) {
        double w = 1.0;
        for (int a = 0; a < k; ++a) {
          const int side = static_cast<int>((c >> a) & 1);
          w *= (s >> a) & 1 ? wm[static_cast<std::size_t>(a)][static_cast<std::size_t>(side)]
                            : wv[static_cast<std::size_t>(a)][static_cast<std::size_t>(side)];
        }
        out += w * tables_[s].col(flat);
      }
    }
    return out;
  }

 private:
  Eigen::MatrixXd moments(const Eigen::MatrixXd& data, int axis) const {
    const auto& x = axes_[static_cast<std::size_t>(axis)];
    const int m = static_cast<int>(x.size());
    const int stride = strides_[static_cast<std::size_t>(axis)];
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, total_);
    if (m < 3) return out;
    std::vector<double> diag(static_cast<std::size_t>(m)), upper(static_cast<std::size_t>(m));
    std::vector<Eigen::VectorXd> rhs(static_cast<std::size_t>(m));
    for (int start = 0; start < total_; ++start) {
      if ((start / stride) % m != 0) continue;
      auto y = [&](int j) { return data.col(start + j * stride); };
      // Thomas algorithm on the interior unknowns M_1 .. M_{m-2}.
      for (int j = 1; j <= m - 2; ++j) {
        const double h0 = x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j) - 1];
        const double h1 = x[static_cast<std::size_t>(j) + 1] - x[static_cast<std::size_t>(j)];
        double d = 2.0 * (h0 + h1);
        Eigen::VectorXd r = 6.0 * ((y(j + 1) - y(j)) / h1 - (y(j) - y(j - 1)) / h0);
        if (j > 1) {
          const double f = h0 / diag[static_cast<std::size_t>(j) - 1];
          d -= f * upper[static_cast<std::size_t>(j) - 1];
          r -= f * rhs[static_cast<std::size_t>(j) - 1];
        }
        diag[static_cast<std::size_t>(j)] = d;
        upper[static_cast<std::size_t>(j)] = h1;
        rhs[static_cast<std::size_t>(j)] = r;
      }
      Eigen::VectorXd next = Eigen::VectorXd::Zero(n_);
      for (int j = m - 2; j >= 1; --j) {
        Eigen::VectorXd mj = (rhs[static_cast<std::size_t>(j)] - (j < m - 2 ? upper[static_cast<std::size_t>(j)] : 0.0) * next) /
                             diag[static_cast<std::size_t>(j)];
        out.col(start + j * stride) = mj;
        next = mj;
      }
    }
    return out;
  }

  std::vector<std::vector<double>> axes_;
  int n_;
  std::vector<int> sizes_;
  std::vector<int> strides_;
  int total_ = 0;
  std::vector<Eigen::MatrixXd> tables_;
};

std::string next_data_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  }
  throw Error(ErrorKind::InvalidArgument, "grid file ends early");
}

}  // namespace

SampledGrid read_grid(std::istream& in) {
  std::istringstream header(next_data_line(in));
  int n = 0;
  int k = 0;
  if (!(header >> n >> k) || n < 2 || k < 1) throw Error(ErrorKind::InvalidArgument, "bad grid header");
  std::vector<int> sizes(static_cast<std::size_t>(k));
  std::size_t total = 1;
  for (auto& s : sizes) {
    if (!(header >> s) || s < 2) throw Error(ErrorKind::InvalidArgument, "bad grid size in header");
    total *= static_cast<std::size_t>(s);
  }
  SampledGrid g;
  g.n = n;
  g.axes.resize(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) g.axes[static_cast<std::size_t>(a)].resize(static_cast<std::size_t>(sizes[static_cast<std::size_t>(a)]));
  g.positions.reserve(total);
  std::vector<std::vector<bool>> seen(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) seen[static_cast<std::size_t>(a)].assign(g.axes[static_cast<std::size_t>(a)].size(), false);
  for (std::size_t row = 0; row < total; ++row) {
    std::istringstream ls(next_data_line(in));
    std::vector<double> params(static_cast<std::size_t>(k));
    Eigen::VectorXd x(n);
    for (auto& p : params) {
      if (!(ls >> p)) throw Error(ErrorKind::InvalidArgument, "grid row " + std::to_string(row) + " is short");
    }
    for (int i = 0; i < n; ++i) {
      if (!(ls >> x[i])) throw Error(ErrorKind::InvalidArgument, "grid row " + std::to_string(row) + " is short");
    }
    std::size_t rest = row;
    for (int a = k - 1; a >= 0; --a) {
      const auto ua = static_cast<std::size_t>(a);
      const std::size_t idx = rest % g.axes[ua].size();
      rest /= g.axes[ua].size();
      const double p = params[ua];
      if (!seen[ua][idx]) {
        g.axes[ua][idx] = p;
        seen[ua][idx] = true;
      } else if (std::abs(g.axes[ua][idx] - p) > 1e-12 * (1.0 + std::abs(p))) {
        throw Error(ErrorKind::InvalidArgument, "grid parameters are not a tensor grid at row " + std::to_string(row));
      }
    }
    g.positions.push_back(std::move(x));
  }
  for (const auto& axis : g.axes) {
    for (std::size_t i = 1; i < axis.size(); ++i) {
      if (!(axis[i] > axis[i - 1])) throw Error(ErrorKind::InvalidArgument, "grid knots must increase");
    }
  }
  return g;
}

SampledGrid read_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open grid file " + path);
  return read_grid(in);
}

SampledGrid sample_grid(const ImmersionOracle& f, std::vector<std::vector<double>> axes) {
  SampledGrid g;
  g.axes = std::move(axes);
  const int k = static_cast<int>(g.axes.size());
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Eigen::VectorXd b(k);
    for (int a = 0; a < k; ++a) b[a] = g.axes[static_cast<std::size_t>(a)][idx[static_cast<std::size_t>(a)]];
    g.positions.push_back(f.eval(b));
    int a = k - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == g.axes[static_cast<std::size_t>(a)].size()) {
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  g.n = static_cast<int>(g.positions.front().size());
  return g;
}

void write_grid(std::ostream& out, const SampledGrid& g) {
  out.precision(17);
  out << g.n << ' ' << g.axes.size();
  for (const auto& a : g.axes) out << ' ' << a.size();
  out << '\n';
  const int k = static_cast<int>(g.axes.size());
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  for (const auto& x : g.positions) {
    for (int a = 0; a < k; ++a) out << g.axes[static_cast<std::size_t>(a)][idx[static_cast<std::size_t>(a)]] << ' ';
    for (Eigen::Index i = 0; i < x.size(); ++i) out << x[i] << (i + 1 < x.size() ? ' ' : '\n');
    int a = k - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == g.axes[static_cast<std::size_t>(a)].size()) {
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
  }
}

Eigen::VectorXd generalized_cross(const Eigen::MatrixXd& d) {
  const Eigen::Index n = d.rows();
  if (d.cols() != n - 1) throw Error(ErrorKind::InvalidArgument, "generalized cross product needs n - 1 vectors");
  Eigen::VectorXd out(n);
  Eigen::MatrixXd minor(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index r = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) minor.row(r++) = d.row(j);
    }
    out[i] = ((i % 2 == 0) ? 1.0 : -1.0) * minor.determinant();
  }
  return out;
}

SurfaceData grid_surface(const SampledGrid& grid) {
  const int k = static_cast<int>(grid.axes.size());
  if (k != grid.n - 1) throw Error(ErrorKind::InvalidArgument, "grid surface must be a hypersurface (k = n - 1)");
  for (const auto& a : grid.axes) {
    if (a.size() < 3) throw Error(ErrorKind::InvalidArgument, "each grid axis needs at least 3 knots");
  }
  auto spline = std::make_shared<const TensorSpline>(grid);
  Eigen::VectorXd lo(k);
  Eigen::VectorXd hi(k);
  for (int a = 0; a < k; ++a) {
    lo[a] = grid.axes[static_cast<std::size_t>(a)].front();
    hi[a] = grid.axes[static_cast<std::size_t>(a)].back();
  }
  ImmersionOracle f;
  f.eval = [spline](const Eigen::VectorXd& b) { return spline->eval(b); };
  f.domain = ParamDomain::box(lo, hi);
  const int n = grid.n;
  VectorField xi = [spline, k, n](const Eigen::VectorXd& b) {
    Eigen::MatrixXd d(n, k);
    for (int a = 0; a < k; ++a) d.col(a) = spline->eval(b, a);
    const Eigen::VectorXd c = generalized_cross(d);
    const double len = c.norm();
    if (!(len > 0)) throw Error(ErrorKind::NotAnImmersion, "grid surface is singular");
    return Eigen::VectorXd(c / len);
  };
  f.normal = xi;
  return SurfaceData{std::move(f), std::move(xi)};
}

}  // namespace liesphere
