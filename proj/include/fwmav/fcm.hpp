#ifndef FWMAV_FCM_HPP
#define FWMAV_FCM_HPP

#include "fwmav/types.hpp"

#include <vector>

namespace fwmav {

// Batch fuzzy C-means.
//
// Conventions: data is n x p (one sample per row), cluster centers are c x p,
// and a partition is c x n where column j holds sample j's membership degrees
// across the c clusters. Every partition column sums to 1.

struct FcmConfig {
    int clusters = 1;
    double fuzzifier = 2.0;  // m; must be > 1, the update law is singular at 1
    double tol = 1e-6;       // stop once the cost improves by less than this
    int max_iter = 200;
    std::uint64_t seed = 0;
    int restarts = 1;        // independent seeded inits, best final cost wins
};

struct FcmModel {
    Matrix centers;    // c x p
    Matrix partition;  // c x n
    double final_cost = 0.0;
    int iterations_used = 0;
    std::vector<double> cost_history;  // one entry per iteration, non-increasing
};

// Random membership matrix with unit column sums, deterministic per seed.
Matrix init_partition(Index n, int clusters, std::uint64_t seed);

// Weighted within-cluster scatter: sum_ij mu_ij^m * |y_i - x_j|^2.
double fcm_cost(const Matrix& data, const Matrix& centers,
                const Matrix& partition, double fuzzifier);

// Membership-weighted means. Throws NumericError if a cluster has no mass.
Matrix update_centers(const Matrix& data, const Matrix& partition, double fuzzifier);

// Inverse-distance memberships. A sample coinciding with a center gets crisp
// membership there (ties to the lowest cluster index).
Matrix update_memberships(const Matrix& data, const Matrix& centers, double fuzzifier);

// Alternate update_centers / update_memberships from a random (or supplied)
// initial partition until the cost decrease drops below tol.
FcmModel fcm_fit(const Matrix& data, const FcmConfig& config,
                 const Matrix* initial_partition = nullptr);

} // namespace fwmav

#endif // FWMAV_FCM_HPP
