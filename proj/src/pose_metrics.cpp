#include "evkit/pose_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace evkit {

namespace {

void check_trajectory(const JointTrajectory& traj, const char* label) {
    const std::string who(label);
    if (traj.joints == 0) throw ValidationError(who + ": joint count is zero");
    if (!(traj.fps > 0.0)) throw ValidationError(who + ": fps must be > 0");
    if (traj.positions.size() % traj.joints != 0 || traj.positions.empty()) {
        throw ShapeError(who + ": positions are not a whole number of frames");
    }
    if (!traj.joint_names.empty() && traj.joint_names.size() != traj.joints) {
        throw ShapeError(who + ": joint name count does not match joint count");
    }
    for (const Vec3& p : traj.positions) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
            throw ValidationError(who + ": non-finite joint position");
        }
    }
}

void check_pair(const JointTrajectory& pred, const JointTrajectory& gt) {
    check_trajectory(pred, "pred");
    check_trajectory(gt, "gt");
    if (pred.joints != gt.joints || pred.frames() != gt.frames()) {
        throw ShapeError("pred/gt trajectory shapes differ");
    }
}

void check_head(const HeadPoseSequence& seq, const char* label) {
    if (seq.rotations.size() != seq.translations.size()) {
        throw ShapeError(std::string(label) + ": rotation/translation count mismatch");
    }
    if (seq.rotations.empty()) throw ShapeError(std::string(label) + ": empty sequence");
}

std::vector<Vec3> accelerations(const JointTrajectory& traj) {
    const std::size_t t_count = traj.frames();
    const double f2 = traj.fps * traj.fps;
    std::vector<Vec3> out((t_count - 2) * traj.joints);
    for (std::size_t t = 1; t + 1 < t_count; ++t) {
        for (std::size_t j = 0; j < traj.joints; ++j) {
            const Vec3 a =
                (traj.at(t + 1, j) - traj.at(t, j) * 2.0 + traj.at(t - 1, j)) * f2;
            out[(t - 1) * traj.joints + j] = a;
        }
    }
    return out;
}

void planar_and_height(const Vec3& p, UpAxis axis, double floor_mm, double& u, double& w,
                       double& h) {
    if (axis == UpAxis::Z) {
        u = p.x;
        w = p.y;
        h = p.z - floor_mm;
    } else {
        u = p.x;
        w = p.z;
        h = p.y - floor_mm;
    }
}

struct FsDetail {
    std::vector<double> per_step_sum;
    std::size_t qualifying = 0;
    double mean = 0.0;
};

FsDetail fs_detail(const JointTrajectory& traj, std::span<const std::size_t> foot_joints,
                   double h_thresh_mm, double floor_mm) {
    check_trajectory(traj, "trajectory");
    if (foot_joints.empty()) throw InvalidArgument("no foot joints given");
    if (!(h_thresh_mm > 0.0)) throw InvalidArgument("height threshold must be > 0");
    const std::size_t t_count = traj.frames();
    if (t_count < 2) throw InvalidArgument("foot skating needs at least 2 frames");
    for (std::size_t j : foot_joints) {
        if (j >= traj.joints) {
            throw ShapeError("foot joint index " + std::to_string(j) + " out of range");
        }
    }

    FsDetail detail;
    detail.per_step_sum.assign(t_count - 1, 0.0);
    double total = 0.0;
    for (std::size_t j : foot_joints) {
        for (std::size_t t = 0; t + 1 < t_count; ++t) {
            double u0, w0, h0, u1, w1, h1;
            planar_and_height(traj.at(t, j), traj.up_axis, floor_mm, u0, w0, h0);
            planar_and_height(traj.at(t + 1, j), traj.up_axis, floor_mm, u1, w1, h1);
            if (h0 >= h_thresh_mm) continue;
            const double v = std::abs(u1 - u0) + std::abs(w1 - w0);
            const double contribution = v * (2.0 - std::exp2(h0 / h_thresh_mm));
            detail.per_step_sum[t] += contribution;
            total += contribution;
            ++detail.qualifying;
        }
    }
    detail.mean = detail.qualifying ? total / double(detail.qualifying) : 0.0;
    return detail;
}

bool name_matches_foot(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return name.find("toe") != std::string::npos || name.find("ankle") != std::string::npos;
}

} // namespace

std::string to_string(UpAxis axis) { return axis == UpAxis::Y ? "y" : "z"; }

UpAxis up_axis_from_string(const std::string& name) {
    if (name == "y") return UpAxis::Y;
    if (name == "z") return UpAxis::Z;
    throw InvalidArgument("unknown up axis '" + name + "' (expected y or z)");
}

double mpjpe(const JointTrajectory& pred, const JointTrajectory& gt) {
    check_pair(pred, gt);
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.positions.size(); ++i) {
        sum += norm(pred.positions[i] - gt.positions[i]);
    }
    return sum / double(pred.positions.size());
}

double head_orientation_error(const HeadPoseSequence& pred, const HeadPoseSequence& gt) {
    check_head(pred, "pred");
    check_head(gt, "gt");
    if (pred.frames() != gt.frames()) throw ShapeError("pred/gt frame counts differ");
    for (std::size_t t = 0; t < pred.frames(); ++t) {
        if (!is_rotation(pred.rotations[t]) || !is_rotation(gt.rotations[t])) {
            throw ValidationError("non-orthonormal rotation at frame " + std::to_string(t));
        }
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < pred.frames(); ++t) {
        sum += frobenius_distance(pred.rotations[t] * transpose(gt.rotations[t]),
                                  Mat3::identity());
    }
    return sum / double(pred.frames());
}

double head_translation_error(const HeadPoseSequence& pred, const HeadPoseSequence& gt) {
    check_head(pred, "pred");
    check_head(gt, "gt");
    if (pred.frames() != gt.frames()) throw ShapeError("pred/gt frame counts differ");
    double sum = 0.0;
    for (std::size_t t = 0; t < pred.frames(); ++t) {
        sum += norm(pred.translations[t] - gt.translations[t]);
    }
    return sum / double(pred.frames());
}

double accel_error(const JointTrajectory& pred, const JointTrajectory& gt) {
    check_pair(pred, gt);
    if (pred.frames() < 3) throw InvalidArgument("acceleration needs at least 3 frames");
    if (pred.fps != gt.fps) throw InvalidArgument("pred/gt fps differ");
    const std::vector<Vec3> ap = accelerations(pred);
    const std::vector<Vec3> ag = accelerations(gt);
    double sum = 0.0;
    for (std::size_t i = 0; i < ap.size(); ++i) sum += norm(ap[i] - ag[i]);
    return sum / double(ap.size());
}

double foot_skating(const JointTrajectory& traj, std::span<const std::size_t> foot_joints,
                    double h_thresh_mm, double floor_mm) {
    return fs_detail(traj, foot_joints, h_thresh_mm, floor_mm).mean;
}

MetricReport evaluate_all(const JointTrajectory& pred, const JointTrajectory& gt,
                          const HeadPoseSequence& pred_head, const HeadPoseSequence& gt_head,
                          const MetricConfig& config) {
    check_pair(pred, gt);
    check_head(pred_head, "pred head");
    check_head(gt_head, "gt head");

    std::vector<std::size_t> feet = config.foot_joints;
    if (feet.empty()) {
        for (std::size_t j = 0; j < pred.joint_names.size(); ++j) {
            if (name_matches_foot(pred.joint_names[j])) feet.push_back(j);
        }
        if (feet.empty()) {
            throw InvalidArgument(
                "no foot joints configured and none identifiable from joint names");
        }
    }

    MetricReport report;
    report.mpjpe_mm = mpjpe(pred, gt);
    report.o_head = head_orientation_error(pred_head, gt_head);
    report.t_head_mm = head_translation_error(pred_head, gt_head);
    report.accel_mm_s2 = accel_error(pred, gt);
    report.fs_mm = foot_skating(pred, feet, config.fs_h_thresh_mm, config.floor_mm);

    const std::size_t t_count = pred.frames();
    report.n_frames = t_count;
    report.n_joints = pred.joints;
    report.n_accel_terms = (t_count - 2) * pred.joints;

    report.mpjpe_mm_per_frame.resize(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        double s = 0.0;
        for (std::size_t j = 0; j < pred.joints; ++j) s += norm(pred.at(t, j) - gt.at(t, j));
        report.mpjpe_mm_per_frame[t] = s / double(pred.joints);
    }
    report.o_head_per_frame.resize(t_count);
    report.t_head_mm_per_frame.resize(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        report.o_head_per_frame[t] = frobenius_distance(
            pred_head.rotations[t] * transpose(gt_head.rotations[t]), Mat3::identity());
        report.t_head_mm_per_frame[t] = norm(pred_head.translations[t] - gt_head.translations[t]);
    }
    const std::vector<Vec3> ap = accelerations(pred);
    const std::vector<Vec3> ag = accelerations(gt);
    report.accel_mm_s2_per_frame.resize(t_count - 2);
    for (std::size_t t = 0; t + 2 < t_count; ++t) {
        double s = 0.0;
        for (std::size_t j = 0; j < pred.joints; ++j) {
            s += norm(ap[t * pred.joints + j] - ag[t * pred.joints + j]);
        }
        report.accel_mm_s2_per_frame[t] = s / double(pred.joints);
    }
    const FsDetail fs = fs_detail(pred, feet, config.fs_h_thresh_mm, config.floor_mm);
    report.fs_mm_per_step = fs.per_step_sum;
    report.n_fs_qualifying = fs.qualifying;
    return report;
}

MetricReport aggregate_reports(std::span<const MetricReport> reports) {
    if (reports.empty()) throw InvalidArgument("no reports to aggregate");
    MetricReport out;
    double mpjpe_sum = 0.0, o_sum = 0.0, t_sum = 0.0, a_sum = 0.0, fs_sum = 0.0;
    std::size_t mpjpe_w = 0, head_w = 0, accel_w = 0, fs_w = 0;
    for (const MetricReport& r : reports) {
        mpjpe_sum += r.mpjpe_mm * double(r.n_frames * r.n_joints);
        mpjpe_w += r.n_frames * r.n_joints;
        o_sum += r.o_head * double(r.n_frames);
        t_sum += r.t_head_mm * double(r.n_frames);
        head_w += r.n_frames;
        a_sum += r.accel_mm_s2 * double(r.n_accel_terms);
        accel_w += r.n_accel_terms;
        fs_sum += r.fs_mm * double(r.n_fs_qualifying);
        fs_w += r.n_fs_qualifying;

        auto append = [](std::vector<double>& dst, const std::vector<double>& src) {
            dst.insert(dst.end(), src.begin(), src.end());
        };
        append(out.mpjpe_mm_per_frame, r.mpjpe_mm_per_frame);
        append(out.o_head_per_frame, r.o_head_per_frame);
        append(out.t_head_mm_per_frame, r.t_head_mm_per_frame);
        append(out.accel_mm_s2_per_frame, r.accel_mm_s2_per_frame);
        append(out.fs_mm_per_step, r.fs_mm_per_step);
        out.n_frames += r.n_frames;
        out.n_joints = std::max(out.n_joints, r.n_joints);
        out.n_accel_terms += r.n_accel_terms;
        out.n_fs_qualifying += r.n_fs_qualifying;
    }
    out.mpjpe_mm = mpjpe_w ? mpjpe_sum / double(mpjpe_w) : 0.0;
    out.o_head = head_w ? o_sum / double(head_w) : 0.0;
    out.t_head_mm = head_w ? t_sum / double(head_w) : 0.0;
    out.accel_mm_s2 = accel_w ? a_sum / double(accel_w) : 0.0;
    out.fs_mm = fs_w ? fs_sum / double(fs_w) : 0.0;
    return out;
}

} // namespace evkit
