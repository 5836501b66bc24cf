#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "evkit/errors.hpp"
#include "evkit/geometry.hpp"

namespace evkit {

enum class UpAxis { Y, Z };

std::string to_string(UpAxis axis);
UpAxis up_axis_from_string(const std::string& name);

struct JointTrajectory {
    std::size_t joints = 0;
    double fps = 0.0;
    UpAxis up_axis = UpAxis::Z;
    std::vector<std::string> joint_names; // empty, or one per joint
    std::vector<Vec3> positions;          // frames*joints, frame-major, millimeters

    std::size_t frames() const { return joints ? positions.size() / joints : 0; }
    const Vec3& at(std::size_t t, std::size_t j) const { return positions[t * joints + j]; }
    Vec3& at(std::size_t t, std::size_t j) { return positions[t * joints + j]; }
};

struct HeadPoseSequence {
    std::vector<Mat3> rotations;
    std::vector<Vec3> translations; // millimeters

    std::size_t frames() const { return rotations.size(); }
};

struct MetricConfig {
    std::vector<std::size_t> foot_joints; // empty: resolve via joint names
    double fs_h_thresh_mm = 50.0;
    double floor_mm = 0.0;
};

struct MetricReport {
    double mpjpe_mm = 0.0;
    double o_head = 0.0;
    double t_head_mm = 0.0;
    double accel_mm_s2 = 0.0;
    double fs_mm = 0.0;

    std::vector<double> mpjpe_mm_per_frame;
    std::vector<double> o_head_per_frame;
    std::vector<double> t_head_mm_per_frame;
    std::vector<double> accel_mm_s2_per_frame; // frames 1..T-2
    std::vector<double> fs_mm_per_step;        // summed qualifying contributions

    // Weights for exact aggregation across sequences.
    std::size_t n_frames = 0;
    std::size_t n_joints = 0;
    std::size_t n_accel_terms = 0;
    std::size_t n_fs_qualifying = 0;
};

// Mean over all (frame, joint) of the Euclidean prediction error.
double mpjpe(const JointTrajectory& pred, const JointTrajectory& gt);

// Mean over frames of ||R_pred * R_gt^T - I||_F. Inputs must be rotations.
double head_orientation_error(const HeadPoseSequence& pred, const HeadPoseSequence& gt);

// Mean over frames of the Euclidean translation error.
double head_translation_error(const HeadPoseSequence& pred, const HeadPoseSequence& gt);

// Central second differences scaled by fps^2 (mm/s^2), frames 1..T-2; mean
// Euclidean difference between predicted and ground-truth accelerations.
double accel_error(const JointTrajectory& pred, const JointTrajectory& gt);

// Per foot joint and consecutive-frame step: planar Manhattan displacement
// v_t, weighted by 2 - 2^(h_t / h_thresh) when the height at the step start
// is below h_thresh. Mean over qualifying (joint, step) pairs, 0 if none.
double foot_skating(const JointTrajectory& traj, std::span<const std::size_t> foot_joints,
                    double h_thresh_mm = 50.0, double floor_mm = 0.0);

// All five metrics; scalar fields equal the standalone operations. Foot
// skating is computed on the prediction, with foot joints taken from the
// config or matched by "toe"/"ankle" in the joint names.
MetricReport evaluate_all(const JointTrajectory& pred, const JointTrajectory& gt,
                          const HeadPoseSequence& pred_head, const HeadPoseSequence& gt_head,
                          const MetricConfig& config = {});

// Per-frame-weighted mean of per-sequence reports; breakdown arrays are
// concatenated in input order.
MetricReport aggregate_reports(std::span<const MetricReport> reports);

} // namespace evkit
