#include "fwmav/fcm.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fwmav {

namespace {

void check_config(const FcmConfig& cfg, Index n) {
    if (cfg.clusters < 1)
        throw ConfigError("fcm: clusters must be >= 1");
    if (cfg.clusters > n)
        throw ConfigError("fcm: more clusters (" + std::to_string(cfg.clusters) +
                          ") than samples (" + std::to_string(n) + ")");
    if (!(cfg.fuzzifier > 1.0))
        throw ConfigError("fcm: fuzzifier must be > 1");
    if (!(cfg.tol > 0.0))
        throw ConfigError("fcm: tol must be > 0");
    if (cfg.max_iter < 1)
        throw ConfigError("fcm: max_iter must be >= 1");
    if (cfg.restarts < 1)
        throw ConfigError("fcm: restarts must be >= 1");
}

// Squared Euclidean distances, c x n.
Matrix squared_distances(const Matrix& data, const Matrix& centers) {
    const Index c = centers.rows();
    const Index n = data.rows();
    Matrix d2(c, n);
    for (Index i = 0; i < c; ++i)
        for (Index j = 0; j < n; ++j)
            d2(i, j) = (centers.row(i) - data.row(j)).squaredNorm();
    return d2;
}

} // namespace

Matrix init_partition(Index n, int clusters, std::uint64_t seed) {
    if (clusters < 1)
        throw ConfigError("init_partition: clusters must be >= 1");
    if (clusters > n)
        throw ConfigError("init_partition: more clusters (" + std::to_string(clusters) +
                          ") than samples (" + std::to_string(n) + ")");
    Rng rng(seed);
    Matrix u(clusters, n);
    for (Index j = 0; j < n; ++j) {
        double sum = 0.0;
        for (Index i = 0; i < clusters; ++i) {
            u(i, j) = rng.uniform_pos();
            sum += u(i, j);
        }
        u.col(j) /= sum;
    }
    return u;
}

double fcm_cost(const Matrix& data, const Matrix& centers,
                const Matrix& partition, double fuzzifier) {
    if (centers.cols() != data.cols())
        throw ConfigError("fcm_cost: centers/data feature dimension mismatch");
    if (partition.rows() != centers.rows() || partition.cols() != data.rows())
        throw ConfigError("fcm_cost: partition shape mismatch");
    if (!(fuzzifier > 1.0))
        throw ConfigError("fcm_cost: fuzzifier must be > 1");

    double cost = 0.0;
    for (Index i = 0; i < centers.rows(); ++i)
        for (Index j = 0; j < data.rows(); ++j)
            cost += std::pow(partition(i, j), fuzzifier) *
                    (centers.row(i) - data.row(j)).squaredNorm();
    return cost;
}

Matrix update_centers(const Matrix& data, const Matrix& partition, double fuzzifier) {
    if (partition.cols() != data.rows())
        throw ConfigError("update_centers: partition/data sample count mismatch");

    const Index c = partition.rows();
    const Index p = data.cols();
    Matrix centers = Matrix::Zero(c, p);
    for (Index i = 0; i < c; ++i) {
        double mass = 0.0;
        for (Index j = 0; j < data.rows(); ++j) {
            double w = std::pow(partition(i, j), fuzzifier);
            centers.row(i) += w * data.row(j);
            mass += w;
        }
        if (mass <= 0.0)
            throw NumericError("update_centers: cluster " + std::to_string(i) +
                               " has zero membership mass");
        centers.row(i) /= mass;
    }
    return centers;
}

Matrix update_memberships(const Matrix& data, const Matrix& centers, double fuzzifier) {
    if (centers.cols() != data.cols())
        throw ConfigError("update_memberships: centers/data feature dimension mismatch");
    if (!(fuzzifier > 1.0))
        throw ConfigError("update_memberships: fuzzifier must be > 1");

    const Index c = centers.rows();
    const Index n = data.rows();
    const double expo = 1.0 / (fuzzifier - 1.0);
    const Matrix d2 = squared_distances(data, centers);

    Matrix u(c, n);
    for (Index j = 0; j < n; ++j) {
        // A sample sitting exactly on a center gets crisp membership there.
        Index on_center = -1;
        for (Index i = 0; i < c; ++i) {
            if (d2(i, j) == 0.0) {
                on_center = i;
                break;
            }
        }
        if (on_center >= 0) {
            u.col(j).setZero();
            u(on_center, j) = 1.0;
            continue;
        }
        for (Index i = 0; i < c; ++i) {
            double sum = 0.0;
            for (Index k = 0; k < c; ++k)
                sum += std::pow(d2(i, j) / d2(k, j), expo);
            u(i, j) = 1.0 / sum;
        }
    }
    return u;
}

FcmModel fcm_fit(const Matrix& data, const FcmConfig& config,
                 const Matrix* initial_partition) {
    if (data.rows() < 1 || data.cols() < 1)
        throw ConfigError("fcm_fit: empty data");
    if (!data.allFinite())
        throw ConfigError("fcm_fit: data contains non-finite values");
    check_config(config, data.rows());
    if (initial_partition &&
        (initial_partition->rows() != config.clusters ||
         initial_partition->cols() != data.rows()))
        throw ConfigError("fcm_fit: initial partition shape mismatch");

    FcmModel best;
    best.final_cost = std::numeric_limits<double>::infinity();

    const int restarts = initial_partition ? 1 : config.restarts;
    for (int r = 0; r < restarts; ++r) {
        Matrix u = initial_partition ? *initial_partition
                                     : init_partition(data.rows(), config.clusters,
                                                      config.seed + static_cast<std::uint64_t>(r));
        FcmModel run;
        double prev_cost = std::numeric_limits<double>::infinity();
        for (int it = 0; it < config.max_iter; ++it) {
            run.centers = update_centers(data, u, config.fuzzifier);
            u = update_memberships(data, run.centers, config.fuzzifier);
            double cost = fcm_cost(data, run.centers, u, config.fuzzifier);
            run.cost_history.push_back(cost);
            if (prev_cost - cost < config.tol) {
                prev_cost = cost;
                break;
            }
            prev_cost = cost;
        }
        run.partition = u;
        run.final_cost = run.cost_history.back();
        run.iterations_used = static_cast<int>(run.cost_history.size());
        if (run.final_cost < best.final_cost)
            best = std::move(run);
    }
    return best;
}

} // namespace fwmav
