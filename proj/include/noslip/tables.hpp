#pragma once

#include "noslip/geometry.hpp"

namespace noslip::tables {

/// Parallel walls y = 0 and y = width, cut off at |x| = half_length.
Table strip(double width, double half_length = 1e3);

/// Corner at the origin with angle 2*phi opening toward +x. Piece 0 is the
/// lower arm, piece 1 the upper arm.
Table wedge(double phi, double arm_length = 10.0);

/// Closed polygon from counterclockwise vertices; piece k joins vertex k to k+1.
Table polygon(const std::vector<Vec2>& vertices);

/// Regular n-gon centered at the origin with a horizontal bottom edge.
Table regular_polygon(int n, double circumradius = 1.0);

/// Circular scatterer of radius R centered in the torus [0, Lx] x [0, Ly].
Table sinai(double radius, double period_x = 1.0, double period_y = 1.0);

/// Two congruent circular caps bulging outward, meeting at (0, +-chord/2).
/// cap_angle is the angle each arc subtends at its center, in (0, pi].
/// Piece 0 is the right cap, piece 1 the left.
Table two_arc_lens(double cap_angle, double chord = 1.0);

/// Radius of the lens arcs.
double lens_radius(double cap_angle, double chord = 1.0);

}  // namespace noslip::tables
