#pragma once

// Uniform periodic grid on [-L, L)^dim and the spectral fractional Laplacian
// with symbol |xi|^{2s}.

#include <cstddef>
#include <memory>

#include <Eigen/Core>

namespace nehari {

struct GridSpec {
  int dim = 1;
  double half_width = 3.141592653589793;
  int points_per_axis = 128;
  double s = 0.5;

  double spacing() const noexcept { return 2.0 * half_width / points_per_axis; }
  double cell_volume() const noexcept;
  std::size_t size() const noexcept;
  // Side length 2L raised to dim.
  double box_volume() const noexcept;

  // dim in {1, 2}, L > 0, n a power of two >= 16, s in (0, 1). The N > 2s
  // hypothesis is left to ProblemConfig.
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

// Immutable grid with cached coordinates, Fourier symbol and FFT plans. Shared
// between fields through shared_ptr; every method is safe to call
// concurrently.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  static std::shared_ptr<const Grid> make(const GridSpec& spec);

  const GridSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return size_; }
  double cell_volume() const noexcept { return spec_.cell_volume(); }

  // Coordinate `axis` of node `index` (row-major, last axis fastest).
  double coordinate(std::size_t index, int axis) const;
  const Eigen::VectorXd& x() const noexcept { return x_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }

  // out = multiplier(|xi|) applied to u, where the multiplier is
  // scale * |xi|^{2s} + shift. With scale = 1, shift = 0 this is (-Delta)^s.
  void apply_symbol(const double* u, double* out, double scale, double shift) const;
  // out = u / (scale * |xi|^{2s} + shift); requires shift > 0.
  void apply_inverse_symbol(const double* u, double* out, double scale, double shift) const;
  // sum_xi |xi|^{2s} |u_hat(xi)|^2 * cell weight, i.e. the spectral seminorm.
  double spectral_seminorm_sq(const double* u) const;

  // |xi|^{2s} per retained complex coefficient, with the Hermitian weight
  // (1 or 2) each coefficient carries in Parseval sums.
  const Eigen::VectorXd& symbol() const noexcept { return symbol_; }
  const Eigen::VectorXd& hermitian_weight() const noexcept { return herm_; }

 private:
  struct Plans;
  template <class Mult>
  void filter(const double* u, double* out, Mult&& mult) const;

  GridSpec spec_;
  std::size_t size_;
  std::size_t spectral_size_;
  Eigen::VectorXd x_, y_;
  Eigen::VectorXd symbol_, herm_;
  std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace nehari
