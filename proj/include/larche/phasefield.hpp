#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "larche/dct.hpp"
#include "larche/elastic_solver.hpp"
#include "larche/elasticity.hpp"
#include "larche/geometry.hpp"
#include "larche/grid.hpp"
#include "larche/potential.hpp"
#include "larche/profile.hpp"

namespace larche {

struct ElasticSetup {
  ElasticityTensor C;
  Eigenstrain E;
};

/// five_point: 5-point stencil with mirror ghosts. spectral: the same DCT-I
/// eigenvectors with the continuum eigenvalues (pi k / L)^2, i.e. a cosine
/// pseudo-spectral Laplacian.
enum class LaplacianKind { five_point, spectral };

struct PFConfig {
  double epsilon = 0.04;
  double tau = 0.0;             ///< 0 selects tau_factor * epsilon^3
  double tau_factor = 1.0;
  double stabilization = 14.0;  ///< s
  double cg_tol = 1e-10;
  double end_time = 0.0;
  LaplacianKind laplacian = LaplacianKind::five_point;
  std::optional<ElasticSetup> elasticity;

  double time_step() const { return tau > 0.0 ? tau : tau_factor * epsilon * epsilon * epsilon; }
  /// Throws std::invalid_argument for out-of-range values or a grid that
  /// violates epsilon >= 2 h_max or has fewer than 32 nodes per direction.
  void validate(const Grid2D& g) const;
};

struct PFState {
  Field c;
  Field mu;
  VectorField u;
  double time = 0.0;
};

/// Smooth even cutoff: 1 for |z| <= 1, 0 for |z| >= 2, monotone in |z|.
double cutoff(double z);

/// Value of the glued profile at a point with distance sample s (see init_glued).
double glued_value(const SdfSample& s, double epsilon, double delta, const ProfileTable& theta0,
                   const ProfileTable& theta1, bool first_order);

/// Glued initial data around the zero set of the distance map. The inner
/// profile theta0(d/eps) (+ eps p theta1(d/eps) at first order, p the
/// curvature at the projection) is blended with the outer values
/// sign(d) (+ eps p theta1(+-inf)) by cutoff(d/delta).
/// Requires delta >= 4 eps and every point with |d| < 2 delta inside the domain.
Field init_glued(const Grid2D& g, const SignedDistanceMap& d, double epsilon, double delta,
                 const ProfileTable& theta0, const ProfileTable& theta1, bool first_order);

/// eps * theta0^{-1}(c): a distance-like field whose zero set is the
/// interface and whose level sets are nearly parallel.
Field distance_from_phase(const Field& c, const ProfileTable& theta0, double epsilon);

/// eps * z with theta0(z) + eps p theta1(z) = c, p a nodal field (the
/// first-order inner profile); falls back to theta0 alone where c is outside the range of that profile on the table.
Field distance_from_phase(const Field& c, const ProfileTable& theta0, const ProfileTable& theta1, const Field& p,
                          double epsilon);

/// Zero contour of c with curvature taken from the level sets of
/// distance_from_phase (much less sensitive to contour jitter than
/// differentiating the polyline). With theta1 a second pass inverts the
/// first-order profile using p = -kappa from the first pass.
InterfacePolyline interface_from_phase(const Field& c, const ProfileTable& theta0, double epsilon,
                                       const ProfileTable* theta1 = nullptr);

struct EnergyParts {
  double E1 = 0.0;
  double E2 = 0.0;
  double total() const { return E1 + E2; }
};

/// Eigenvalues of -Delta_h for the chosen Laplacian, indexed like NeumannSpectral.
std::vector<double> laplacian_eigenvalues(const NeumannSpectral& sp, LaplacianKind kind);

/// Discrete Dirichlet energy 1/2 <c, -Delta_h c> with trapezoid weights
/// (an edge sum for the 5-point stencil).
double dirichlet_energy(const Field& c, LaplacianKind kind = LaplacianKind::five_point);

/// out = Delta_h c.
void apply_laplacian(const Field& c, Field& out, LaplacianKind kind = LaplacianKind::five_point);

/// Linearly stabilized semi-implicit Cahn-Larche stepper. The fourth-order
/// update is diagonal in the DCT-I basis:
///   dc_k (1 + tau eps l^2 + tau l s / eps) = -tau l (eps l c_k + g_k),
/// l the eigenvalues of -Delta_h and g = f(c)/eps + W_c(c, u).
class CahnLarcheStepper {
 public:
  CahnLarcheStepper(const Grid2D& g, PFConfig cfg, DoubleWell potential);
  ~CahnLarcheStepper();

  const PFConfig& config() const { return cfg_; }
  const Grid2D& grid() const { return grid_; }
  double time_step() const { return tau_; }
  bool has_elasticity() const { return static_cast<bool>(elastic_); }

  /// Equilibrates u for c and sets mu = -eps Delta_h c + f(c)/eps + W_c.
  PFState make_state(Field c, double time = 0.0);
  /// One step of length time_step(). Throws std::runtime_error on CG
  /// failure, non-finite values or |c| > 1.5.
  void step(PFState& s);
  EnergyParts energy(const PFState& s) const;

  /// W_c at the nodes (zero field without elasticity).
  Field elastic_chemical_potential(const PFState& s) const;
  VectorField equilibrate(const Field& c, const VectorField* guess = nullptr);
  int last_cg_iterations() const { return last_cg_; }

 private:
  void set_tau(double tau);
  void laplacian(const Field& c, Field& out) const;

  Grid2D grid_;
  PFConfig cfg_;
  DoubleWell potential_;
  double tau_ = 0.0;
  NeumannSpectral spectral_;
  std::unique_ptr<ElasticSolver> elastic_;
  std::vector<double> lambda_, num_, den_;
  std::vector<double> work_a_, work_b_, work_c_;
  int last_cg_ = 0;
};

struct Trajectory {
  std::vector<double> t, mass, E1, E2, Etot, max_abs_c;
  std::vector<PFState> frames;  ///< states at the requested sample times
  std::vector<InterfacePolyline> contours;
  PFState final_state;
};

struct RunOptions {
  std::vector<double> sample_times;
  bool extract_contours = false;
  /// Record diagnostics every this many steps (the first and last step are always recorded).
  int diagnostics_every = 1;
  std::function<void(const PFState&, long step)> on_step;
};

/// Steps from init until cfg.end_time; the step is shortened uniformly so
/// an integer number of steps reaches end_time.
Trajectory run(const Grid2D& g, const PFConfig& cfg, const DoubleWell& potential, const Field& c0,
               const RunOptions& opts = {});

}  // namespace larche
