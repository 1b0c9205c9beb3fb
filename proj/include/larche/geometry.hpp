#pragma once

#include <string>
#include <vector>

#include "larche/grid.hpp"

namespace larche {

enum class ShapeKind { circle, ellipse, polyline };

/// Closed curve bounding the inner phase. Ellipse semi-axes a (x) and b (y).
struct Shape {
  ShapeKind kind = ShapeKind::circle;
  Vec2 center;
  double R = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::vector<Vec2> points;  ///< polyline vertices (closed, no repeated end point)

  static Shape circle(Vec2 c, double R);
  static Shape ellipse(Vec2 c, double a, double b);
  static Shape from_polyline(std::vector<Vec2> pts);
  /// Smallest radius of curvature of the analytic shapes (0 for polylines).
  double min_radius_of_curvature() const;
};

struct SdfSample {
  double d = 0.0;       ///< signed distance, < 0 inside
  Vec2 projection;      ///< closest point on the curve
  Vec2 normal;          ///< grad d (outward unit normal at the projection)
  double curvature = 0.0;  ///< div nu at the projection (= 1/R for a circle)
  /// Laplacian of d at the query point: k / (1 + k d) in 2D.
  double laplacian() const { return curvature / (1.0 + curvature * d); }
};

class SignedDistanceMap {
 public:
  explicit SignedDistanceMap(Shape s);
  const Shape& shape() const { return shape_; }
  SdfSample eval(Vec2 x) const;
  double operator()(Vec2 x) const { return eval(x).d; }

 private:
  SdfSample eval_ellipse(Vec2 x) const;
  SdfSample eval_polyline(Vec2 x) const;
  Shape shape_;
  std::vector<double> poly_curv_;
};

SignedDistanceMap sdf(const Shape& s);

/// Ordered closed contour. Normals point from the negative into the positive
/// phase; curvature follows kappa = -Laplacian(d) (a circle around the negative
/// phase has kappa = -1/R).
struct InterfacePolyline {
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> curvature;
  std::vector<double> arclength;  ///< cumulative, starting at 0
  double perimeter = 0.0;

  std::size_t size() const { return points.size(); }
  double signed_area() const;
  /// Mean distance of the points to c.
  double mean_radius(Vec2 c) const;
  double max_radius_error(Vec2 c, double R) const;
};

/// Marching squares on the zero level set with linear edge interpolation.
/// Throws std::runtime_error for no interface, several components, or a
/// contour that reaches the boundary.
InterfacePolyline extract_zero_contour(const Field& field);

/// Tangent, normal = (-t_y, t_x) and kappa from a least-squares circle fit
/// over a window of about four point spacings on each side. Requires >= 16
/// points; throws on repeated consecutive points.
InterfacePolyline curvature_normals(InterfacePolyline poly);

/// Orients the loop clockwise (positive phase on the left, outward normals) and
/// recomputes normals and curvature.
InterfacePolyline canonicalize(InterfacePolyline poly);

struct OneSided {
  double plus = 0.0;
  double minus = 0.0;
  double normal_derivative_jump = 0.0;
};

/// Bilinear samples at p +- offset nu and p +- (offset + h) nu with h the
/// larger grid spacing; jump = (d/dnu)_plus - (d/dnu)_minus.
OneSided one_sided_sample(const Field& field, Vec2 p, Vec2 nu, double offset);

/// Nodal curvature -div(grad f / |grad f|) of the level sets of f by centered
/// differences; boundary nodes copy their inward neighbour.
Field level_set_curvature(const Field& f);

/// Replaces the polyline curvature by cubic interpolation of a nodal curvature field.
InterfacePolyline attach_curvature(InterfacePolyline poly, const Field& kappa);

/// Crude C3 proxy: max |kappa| + max |d kappa / ds|.
double curvature_proxy(const InterfacePolyline& poly);

/// Writes x,y,nx,ny,kappa,s.
void write_polyline_csv(const InterfacePolyline& poly, const std::string& path);

}  // namespace larche
