#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chmhd {

/// Raised for inconsistent user input: bad grid sizes, mismatched boundary
/// rules, invalid physical parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform rectangular mesh on [0, lx] x [0, ly].
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double lx = 1.0;
  double ly = 1.0;

  GridSpec() = default;
  GridSpec(int nx, int ny, double lx = 1.0, double ly = 1.0);

  double dx() const noexcept { return lx / nx; }
  double dy() const noexcept { return ly / ny; }
  double cell_area() const noexcept { return dx() * dy(); }
  double area() const noexcept { return lx * ly; }
  std::size_t cells() const noexcept { return static_cast<std::size_t>(nx) * ny; }

  bool operator==(const GridSpec&) const = default;
};

/// Sample location of a grid function.
///   cell  : ((i+1/2)dx, (j+1/2)dy), i < nx,  j < ny
///   node  : (i dx, j dy),           i <= nx, j <= ny
///   xface : (i dx, (j+1/2)dy),      i <= nx, j < ny
///   yface : ((i+1/2)dx, j dy),      i < nx,  j <= ny
enum class Location { cell, node, xface, yface };

const char* to_string(Location loc);

/// Two-dimensional grid function with one ghost layer on every side.
/// Indices run from -1 to ni() (resp. nj()) inclusive.
class Field {
 public:
  Field() = default;
  Field(const GridSpec& grid, Location loc, double value = 0.0);

  const GridSpec& grid() const noexcept { return grid_; }
  Location location() const noexcept { return loc_; }
  int ni() const noexcept { return ni_; }
  int nj() const noexcept { return nj_; }
  std::size_t interior_size() const noexcept { return static_cast<std::size_t>(ni_) * nj_; }

  double& operator()(int i, int j) noexcept { return data_[index(i, j)]; }
  double operator()(int i, int j) const noexcept { return data_[index(i, j)]; }

  double x(int i) const noexcept;
  double y(int j) const noexcept;

  std::span<double> storage() noexcept { return data_; }
  std::span<const double> storage() const noexcept { return data_; }

  /// Interior values, row-major with i fastest.
  std::vector<double> interior() const;
  void set_interior(std::span<const double> values);

  void fill(double value);

  template <class Fn>
  void sample(Fn&& fn) {
    for (int j = 0; j < nj_; ++j)
      for (int i = 0; i < ni_; ++i) (*this)(i, j) = fn(x(i), y(j));
  }

  bool same_shape(const Field& other) const noexcept {
    return loc_ == other.loc_ && grid_ == other.grid_;
  }

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j + 1) * stride_ + static_cast<std::size_t>(i + 1);
  }

  GridSpec grid_;
  Location loc_ = Location::cell;
  int ni_ = 0;
  int nj_ = 0;
  std::size_t stride_ = 0;
  std::vector<double> data_;
};

using ScalarField = Field;

enum class VectorKind { mac, cell };

/// Two-component vector field. `mac` stores x on xfaces and y on yfaces;
/// `cell` stores both components at cell centres.
struct VectorField {
  VectorKind kind = VectorKind::mac;
  Field x;
  Field y;

  static VectorField mac(const GridSpec& grid);
  static VectorField cell(const GridSpec& grid);
};

enum class Side { left = 0, right = 1, bottom = 2, top = 3 };

/// Boundary datum as a function of the coordinate along the side and time.
using BoundaryData = std::function<double(double s, double t)>;

struct SideRule {
  enum class Kind { periodic, neumann, dirichlet };

  Kind kind = Kind::neumann;
  /// Outward normal derivative (neumann) or boundary value (dirichlet);
  /// empty means homogeneous.
  BoundaryData data;

  static SideRule periodic() { return {Kind::periodic, {}}; }
  static SideRule neumann(BoundaryData flux = {}) { return {Kind::neumann, std::move(flux)}; }
  static SideRule dirichlet(BoundaryData value = {}) { return {Kind::dirichlet, std::move(value)}; }

  double value(double s, double t) const { return data ? data(s, t) : 0.0; }
};

/// Per-side rule set for one scalar grid function.
struct BoundaryRule {
  std::array<SideRule, 4> sides{};

  static BoundaryRule neumann();
  static BoundaryRule dirichlet();
  static BoundaryRule periodic();

  const SideRule& operator[](Side s) const { return sides[static_cast<int>(s)]; }
  SideRule& operator[](Side s) { return sides[static_cast<int>(s)]; }

  bool periodic_x() const;
  bool periodic_y() const;
  bool homogeneous() const;

  /// Throws ConfigError when periodicity is declared on one side only.
  void validate() const;
};

/// Tangential boundary data for a cell-centred magnetic field: the
/// tangential component is Dirichlet, the normal component Neumann.
struct SideData {
  BoundaryData left;
  BoundaryData right;
  BoundaryData bottom;
  BoundaryData top;
};

struct MagneticRule {
  BoundaryRule bx;
  BoundaryRule by;

  /// `tangential` holds b_y on left/right and b_x on bottom/top;
  /// `normal_flux` holds the outward normal derivative of the normal
  /// component (zero when omitted, i.e. a mirror ghost).
  static MagneticRule tangential(SideData tangential = {}, SideData normal_flux = {});
};

enum class Wall { no_slip, free_slip };

/// Impermeable walls on all four sides; the tangential component is
/// either clamped (no-slip) or stress-free (free-slip).
struct VelocityRule {
  std::array<Wall, 4> walls{Wall::no_slip, Wall::no_slip, Wall::no_slip, Wall::no_slip};

  static VelocityRule no_slip() { return {}; }
  Wall operator[](Side s) const { return walls[static_cast<int>(s)]; }
};

/// Fill the ghost layer of a cell or node field.
void apply_boundary(Field& field, const BoundaryRule& rule, double time);

/// Fill ghosts of a cell-centred magnetic field.
void apply_boundary(VectorField& b, const MagneticRule& rule, double time);

/// Zero the wall-normal faces of a MAC velocity and fill tangential ghosts.
void apply_boundary(VectorField& v, const VelocityRule& rule);

/// Midpoint quadrature of a cell-centred field.
double integrate(const Field& f);

/// Weighted L2 inner product. Cells carry weight dx*dy; boundary faces and
/// boundary nodes carry the trapezoidal fraction of it.
double inner(const Field& a, const Field& b);
double inner(const VectorField& a, const VectorField& b);

double norm_l2(const Field& f);
double norm_l2(const VectorField& f);
double max_abs(const Field& f);

/// Quadrature weight of interior sample (i, j) relative to dx*dy.
double weight(const Field& f, int i, int j) noexcept;

}  // namespace chmhd
