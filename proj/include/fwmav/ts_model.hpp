#ifndef FWMAV_TS_MODEL_HPP
#define FWMAV_TS_MODEL_HPP

#include "fwmav/fcm.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace fwmav {

struct GaussianMf {
    double center = 0.0;
    double width = 1.0;  // standard-deviation-like spread, > 0
};

// exp(-(x - center)^2 / (2 width^2)), in (0, 1], 1 exactly at the center.
double mf_degree(double x, const GaussianMf& mf);

struct TsRule {
    std::vector<GaussianMf> antecedent;  // one MF per input channel
    Matrix consequent;                   // output_dim x (input_dim + 1), col 0 = bias
};

struct ChannelScaling {
    double offset = 0.0;
    double scale = 1.0;  // nonzero

    bool operator==(const ChannelScaling&) const = default;
};

// Takagi-Sugeno rule base with Gaussian antecedents, product AND, affine
// consequents and firing-strength-weighted averaging. Inputs are normalized
// with input_scaling before they touch antecedents or consequents.
struct TsModel {
    int input_dim = 0;
    int output_dim = 0;
    std::vector<TsRule> rules;
    std::vector<ChannelScaling> input_scaling;

    Vector normalize(const Vector& inputs) const;
};

// Rule firing strengths (product of antecedent degrees), length rules.size().
Vector fire_rules(const Vector& inputs, const TsModel& model);

// Strength-weighted mean of per-rule outputs (rows of rule_outputs). Falls
// back to the plain mean when the total strength underflows.
Vector weighted_average(const Vector& strengths, const Matrix& rule_outputs);

// Model output, length output_dim.
Vector infer(const Vector& inputs, const TsModel& model);

// Input/output records sampled at a fixed interval.
struct IoDataset {
    Matrix inputs;   // n x 4, flapping amplitudes in degrees
    Matrix outputs;  // n x 6, body velocities (m/s, rad/s)
    double dt = 0.0;
};

struct IdentifyOptions {
    // Refit with one more cluster while the final FCM cost stays above this.
    double rule_add_threshold = std::numeric_limits<double>::infinity();
    int max_clusters = 10;
};

struct IdentifyInfo {
    int clusters_used = 0;
    double fcm_cost = 0.0;
    int fcm_iterations = 0;
    bool rank_deficient = false;  // some consequent regression leaned on the ridge
};

// Cluster the joint input/output space with FCM and turn each cluster into
// one rule: antecedents from the cluster's input coordinates and spread,
// consequents from membership-weighted ridge least squares.
TsModel identify_ts_model(const IoDataset& data, int clusters, const FcmConfig& fcm,
                          const IdentifyOptions& options = {},
                          IdentifyInfo* info = nullptr,
                          const Matrix* initial_partition = nullptr);

// Per-output-channel RMSE of model predictions against the dataset.
Vector evaluate_fit(const TsModel& model, const IoDataset& data);

// Versioned plain-text serialization; doubles round-trip bit-exactly.
void save_ts_model(const TsModel& model, std::ostream& out);
void save_ts_model(const TsModel& model, const std::string& path);
TsModel load_ts_model(std::istream& in);
TsModel load_ts_model(const std::string& path);

} // namespace fwmav

#endif // FWMAV_TS_MODEL_HPP
