#include "wedge/recon/poisson.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "wedge/core/error.hpp"

namespace wedge::recon {
namespace {

// FFTW's planner is not thread-safe; execution on a private plan is.
std::mutex planner_mutex;

class Dst2d {
 public:
  Dst2d(int rows, int cols) : rows_(rows), cols_(cols), buf_(static_cast<std::size_t>(rows) * cols) {
    std::lock_guard lock(planner_mutex);
    plan_ = fftw_plan_r2r_2d(rows, cols, buf_.data(), buf_.data(), FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  }
  ~Dst2d() {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(plan_);
  }
  Dst2d(const Dst2d&) = delete;
  Dst2d& operator=(const Dst2d&) = delete;

  double* data() { return buf_.data(); }
  void run() { fftw_execute(plan_); }

 private:
  int rows_, cols_;
  std::vector<double> buf_;
  fftw_plan plan_;
};

}  // namespace

Eigen::MatrixXd poisson_solve_f64(const GradientField& grads) {
  const int h = grads.height(), w = grads.width();
  if (h < 4 || w < 4) throw InvalidArgument("poisson_solve: gradient field must be at least 4x4");
  const int n = h - 2, m = w - 2;

  Dst2d dst(n, m);
  double* f = dst.data();
  for (int r = 1; r <= n; ++r)
    for (int c = 1; c <= m; ++c) {
      const double dgx = 0.5 * (static_cast<double>(grads.at(r, c + 1, 0)) - grads.at(r, c - 1, 0));
      const double dgy = 0.5 * (static_cast<double>(grads.at(r + 1, c, 1)) - grads.at(r - 1, c, 1));
      f[(r - 1) * m + (c - 1)] = dgx + dgy;
    }
  dst.run();

  const double pi = std::numbers::pi;
  std::vector<double> sy(static_cast<std::size_t>(n)), sx(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) sy[i] = std::pow(std::sin(pi * (i + 1) / (h - 1)), 2);
  for (int j = 0; j < m; ++j) sx[j] = std::pow(std::sin(pi * (j + 1) / (w - 1)), 2);
  // Unnormalised RODFT00 round trip scales by 2(n+1) * 2(m+1).
  const double norm = 4.0 * (h - 1) * (w - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) f[i * m + j] /= -(sy[i] + sx[j]) * norm;
  dst.run();

  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(h, w);
  for (int r = 1; r <= n; ++r)
    for (int c = 1; c <= m; ++c) z(r, c) = f[(r - 1) * m + (c - 1)];
  return z;
}

DepthMap poisson_solve(const GradientField& grads) {
  const Eigen::MatrixXd z = poisson_solve_f64(grads);
  DepthMap out(grads.height(), grads.width());
  for (int r = 0; r < out.height(); ++r)
    for (int c = 0; c < out.width(); ++c) out.at(r, c) = static_cast<float>(z(r, c));
  return out;
}

DepthMap poisson_solve(const GradientField& grads, double ppmm) {
  if (!(ppmm > 0.0)) throw InvalidArgument("poisson_solve: ppmm must be positive");
  const Eigen::MatrixXd z = poisson_solve_f64(grads);
  DepthMap out(grads.height(), grads.width());
  for (int r = 0; r < out.height(); ++r)
    for (int c = 0; c < out.width(); ++c) out.at(r, c) = static_cast<float>(z(r, c) / ppmm);
  return out;
}

}  // namespace wedge::recon
