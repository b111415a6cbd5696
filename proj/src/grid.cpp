#include "nehari/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>
#include <vector>

#include "nehari/error.hpp"

namespace nehari {
namespace {

// FFTW's planner is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int signed_frequency(int j, int n) { return j <= n / 2 ? j : j - n; }

}  // namespace

double GridSpec::cell_volume() const noexcept { return std::pow(spacing(), dim); }

std::size_t GridSpec::size() const noexcept {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(points_per_axis);
  return total;
}

double GridSpec::box_volume() const noexcept { return std::pow(2.0 * half_width, dim); }

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw PreconditionError("grid.dim must be 1 or 2");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw PreconditionError("grid.half_width must be positive");
  if (points_per_axis < 16 || !is_power_of_two(points_per_axis))
    throw PreconditionError("grid.points must be a power of two >= 16");
  if (!(s > 0.0 && s < 1.0)) throw PreconditionError("grid.s must lie in (0, 1)");
}

struct Grid::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

Grid::Grid(const GridSpec& spec) : spec_(spec), plans_(std::make_unique<Plans>()) {
  spec_.validate();
  const int n = spec_.points_per_axis;
  const int half = n / 2 + 1;
  size_ = spec_.size();
  spectral_size_ = spec_.dim == 1 ? static_cast<std::size_t>(half)
                                  : static_cast<std::size_t>(n) * half;

  const double h = spec_.spacing();
  const double L = spec_.half_width;
  x_.resize(size_);
  y_.setZero(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    if (spec_.dim == 1) {
      x_[i] = -L + h * static_cast<double>(i);
    } else {
      x_[i] = -L + h * static_cast<double>(i / n);
      y_[i] = -L + h * static_cast<double>(i % n);
    }
  }

  const double dk = M_PI / L;
  symbol_.resize(spectral_size_);
  herm_.resize(spectral_size_);
  for (std::size_t m = 0; m < spectral_size_; ++m) {
    const int j_last = static_cast<int>(m % half);
    double k2 = std::pow(dk * j_last, 2);
    if (spec_.dim == 2) k2 += std::pow(dk * signed_frequency(static_cast<int>(m / half), n), 2);
    symbol_[m] = k2 == 0.0 ? 0.0 : std::pow(k2, spec_.s);
    herm_[m] = (j_last == 0 || j_last == n / 2) ? 1.0 : 2.0;
  }

  std::vector<double> real(size_);
  std::vector<std::complex<double>> cplx(spectral_size_);
  auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (spec_.dim == 1) {
    plans_->forward = fftw_plan_dft_r2c_1d(n, real.data(), c, flags);
    plans_->backward = fftw_plan_dft_c2r_1d(n, c, real.data(), flags);
  } else {
    plans_->forward = fftw_plan_dft_r2c_2d(n, n, real.data(), c, flags);
    plans_->backward = fftw_plan_dft_c2r_2d(n, n, c, real.data(), flags);
  }
  if (!plans_->forward || !plans_->backward) throw NumericError("FFTW plan creation failed");
}

Grid::~Grid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

std::shared_ptr<const Grid> Grid::make(const GridSpec& spec) {
  return std::make_shared<const Grid>(spec);
}

double Grid::coordinate(std::size_t index, int axis) const {
  if (index >= size_ || axis < 0 || axis >= spec_.dim)
    throw PreconditionError("grid coordinate out of range");
  return axis == 0 ? x_[index] : y_[index];
}

template <class Mult>
void Grid::filter(const double* u, double* out, Mult&& mult) const {
  std::vector<double> in(u, u + size_);
  std::vector<std::complex<double>> spec(spectral_size_);
  auto* c = reinterpret_cast<fftw_complex*>(spec.data());
  fftw_execute_dft_r2c(plans_->forward, in.data(), c);
  const double norm = 1.0 / static_cast<double>(size_);
  for (std::size_t m = 0; m < spectral_size_; ++m) spec[m] *= mult(symbol_[m]) * norm;
  fftw_execute_dft_c2r(plans_->backward, c, out);
}

void Grid::apply_symbol(const double* u, double* out, double scale, double shift) const {
  filter(u, out, [&](double sym) { return scale * sym + shift; });
}

void Grid::apply_inverse_symbol(const double* u, double* out, double scale, double shift) const {
  if (!(shift > 0.0)) throw PreconditionError("inverse symbol needs a positive shift");
  filter(u, out, [&](double sym) { return 1.0 / (scale * sym + shift); });
}

double Grid::spectral_seminorm_sq(const double* u) const {
  std::vector<double> in(u, u + size_);
  std::vector<std::complex<double>> spec(spectral_size_);
  fftw_execute_dft_r2c(plans_->forward, in.data(), reinterpret_cast<fftw_complex*>(spec.data()));
  double sum = 0.0;
  for (std::size_t m = 0; m < spectral_size_; ++m)
    sum += herm_[m] * symbol_[m] * std::norm(spec[m]);
  return sum * cell_volume() / static_cast<double>(size_);
}

}  // namespace nehari
