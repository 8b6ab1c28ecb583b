#pragma once

#include "epochgd/core.hpp"
#include "epochgd/vec.hpp"

namespace epochgd {

struct BallSpec {
    Vec center;
    double radius = 0.0;  // radius 0 is legal and projects to the center
};

// Exact Euclidean projections.
Vec project_whole_space(const Vec& y);
Vec project_ball(const Vec& y, const BallSpec& ball);
Vec project_box(const Vec& y, const Vec& lo, const Vec& hi);
Vec project_simplex(const Vec& y);

// Nearest point of inner-domain ∩ ball via Dykstra's alternating corrected
// projections. Short-circuits to project_ball when inner is the whole space.
// Throws NoConvergence when the stopping criterion (successive-iterate change
// < tol and feasibility within tol) is unmet after max_iters cycles.
Vec project_intersection_ball(const Domain& inner, const BallSpec& ball,
                              const Vec& y, double tol = 1e-10,
                              long long max_iters = 10000);

// Allocation-free form used by the optimizer hot path.
void project_intersection_ball_into(const Domain& inner, const BallSpec& ball,
                                    const Vec& y, Vec& out, double tol = 1e-10,
                                    long long max_iters = 10000);

// Domain factories. Samplers draw verification points: uniform on balls,
// boxes and the simplex, standard normal on the whole space, rejection from
// the ball for intersections.
Domain make_whole_space(int dim);
Domain make_ball_domain(BallSpec ball);
Domain make_box_domain(Vec lo, Vec hi);
Domain make_simplex_domain(int dim);
Domain make_intersection_ball_domain(Domain inner, BallSpec ball,
                                     double tol = 1e-10,
                                     long long max_iters = 10000);

}  // namespace epochgd
