#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include <overtake/polynomial.hpp>

namespace overtake
{

/// One pose sample on the road centerline.
struct CenterlineSample
{
    double x = 0.0;
    double y = 0.0;
    double s = 0.0;
    double heading = 0.0;
};

/// A constant-curvature piece used to assemble a centerline (curvature 0 = straight).
struct CenterlinePiece
{
    double length = 0.0;
    double curvature = 0.0;
};

/**
 * Road reference line parameterized by arc length.
 *
 * Stored as samples no farther apart than `max_spacing`; between two samples
 * the line is a circular arc (or straight) of the recorded curvature, so
 * analytic straights and arcs are represented exactly.
 */
class Centerline
{
  public:
    static Centerline from_pieces (std::span<const CenterlinePiece> pieces, double max_spacing = 0.5,
                                   CenterlineSample origin = {});
    static Centerline straight (double length, double max_spacing = 0.5, CenterlineSample origin = {});
    /// Arc of `radius` turning through `angle` (positive = left turn).
    static Centerline arc (double radius, double angle, double max_spacing = 0.5, CenterlineSample origin = {});
    /// Polyline through the given points, densified to `max_spacing`.
    static Centerline from_waypoints (std::span<const Eigen::Vector2d> points, double max_spacing = 0.5);

    const std::vector<CenterlineSample> &samples () const { return samples_; }
    double total_length () const { return samples_.back ().s; }
    double max_spacing () const { return max_spacing_; }

    /// Interpolated pose at arc length s; s is clamped to [0, total_length].
    CenterlineSample pose_at (double s) const;
    /// Pose reached `ds` along segment i (between samples i and i+1).
    CenterlineSample advance (std::size_t i, double ds) const;
    double segment_curvature (std::size_t i) const { return curvature_[i]; }

  private:
    Centerline () = default;

    std::vector<CenterlineSample> samples_;
    std::vector<double> curvature_; ///< per segment, size samples_ - 1
    double max_spacing_ = 0.5;
};

/// Road-aligned coordinates: s along the centerline, l to the left.
struct FrenetPose
{
    double s = 0.0;
    double l = 0.0;
};

struct FrenetProjection
{
    FrenetPose pose;
    /// Set when the point was equidistant from two distinct stretches; the smaller s was kept.
    bool ambiguous = false;
};

/// Throws DomainError when s lies outside [0, total_length].
Eigen::Vector2d frenet_to_cartesian (FrenetPose pose, const Centerline &line);
FrenetProjection cartesian_to_frenet (double x, double y, const Centerline &line);

struct RoadBounds
{
    double half_width = 0.0;
    double s_min = 0.0;
    double s_max = 0.0;
};

struct Pose2
{
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
};

/// Timestamped obstacle state.
struct ObstacleState
{
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
};

/// A moving vehicle: timestamped poses plus a rectangular footprint.
class ObstacleTrajectory
{
  public:
    ObstacleTrajectory (std::vector<ObstacleState> states, double length, double width);

    struct PoseAt
    {
        Pose2 pose;
        bool clamped = false; ///< t was outside the recorded horizon
    };

    /// Linear position and shortest-arc heading interpolation; clamps outside the horizon.
    PoseAt pose_at (double t) const;

    const std::vector<ObstacleState> &states () const { return states_; }
    double length () const { return length_; }
    double width () const { return width_; }

  private:
    std::vector<ObstacleState> states_;
    double length_;
    double width_;
};

/// Oriented rectangle with center, heading and half extents.
struct OrientedRect
{
    double cx = 0.0;
    double cy = 0.0;
    double heading = 0.0;
    double half_length = 0.0;
    double half_width = 0.0;

    std::array<Eigen::Vector2d, 4> corners () const;
};

OrientedRect footprint_at (const ObstacleTrajectory &obs, double t, double inflation = 0.0);

/// Euclidean distance from a point to a rectangle (0 inside or on the boundary).
double point_rect_distance (const Eigen::Vector2d &p, const OrientedRect &r);
/// Separation between two rectangles (0 when they touch or overlap).
double rect_distance (const OrientedRect &a, const OrientedRect &b);

/// A node in s-l-t space.
struct SltPoint
{
    double s = 0.0;
    double l = 0.0;
    double t = 0.0;
};

/// Collision settings for point-robot checks in s-l-t space.
struct VisibilityParams
{
    double margin = 0.2;          ///< extra clearance, m
    double ego_half_diagonal = 0; ///< ego footprint radius folded into the obstacle, m
    double dt_check = 0.05;       ///< temporal sampling step, s
    double ds_check = 0.5;        ///< spatial sampling step, m

    double inflation () const { return margin + ego_half_diagonal; }
};

/// True when (s, l) at time t lies outside every inflated obstacle footprint.
bool point_free (const SltPoint &p, std::span<const ObstacleTrajectory> obstacles, const Centerline &line,
                 const VisibilityParams &vis);

/// Distance from (s, l, t) to the nearest inflated footprint (0 inside); +inf with no obstacles.
double point_clearance (const SltPoint &p, std::span<const ObstacleTrajectory> obstacles,
                        const Centerline &line, const VisibilityParams &vis);

/**
 * Straight-segment check in s-l-t space.
 *
 * Samples the segment so that consecutive samples are at most dt_check apart
 * in time and ds_check apart in the s-l plane; any sample inside an inflated
 * footprint blocks the segment. Time need not increase along the segment.
 */
bool segment_clear (const SltPoint &a, const SltPoint &b, std::span<const ObstacleTrajectory> obstacles,
                    const Centerline &line, const VisibilityParams &vis);

/// Visibility between two nodes; requires a.t < b.t unless the segment is degenerate.
bool segment_visible (const SltPoint &a, const SltPoint &b, std::span<const ObstacleTrajectory> obstacles,
                      const Centerline &line, const VisibilityParams &vis);

struct Footprint
{
    double length = 4.3;
    double width = 1.9;
};

struct ObstacleDistance
{
    double d_min = std::numeric_limits<double>::infinity ();
    double close_ratio = 0.0; ///< R_o, fraction of arc length closer than r_th
};

/**
 * Footprint-to-footprint clearance along a trajectory.
 *
 * The ego rectangle is centered on the trajectory point and aligned with the
 * velocity. Distances are sampled every `dt`; an interval counts toward R_o
 * when the clearance at its midpoint is below `r_th`.
 */
ObstacleDistance min_obstacle_distance (const PolynomialTrajectory &traj, std::span<const ObstacleTrajectory> obstacles,
                                        const Footprint &ego, double r_th, double dt = 0.01);

} // namespace overtake
