// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Checks are property- and oracle-based and sized to finish in minutes.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "evkit/dataset_io.hpp"
#include "evkit/event_core.hpp"
#include "evkit/event_synth.hpp"
#include "evkit/geometry.hpp"
#include "evkit/mask_gen.hpp"
#include "evkit/motion_seg.hpp"
#include "evkit/pose_metrics.hpp"
#include "evkit/testing.hpp"
#include "evkit/voxelizer.hpp"
#include "oracles.hpp"
#include "util.hpp"

using namespace evkit;

namespace {

int failures = 0;
const std::chrono::steady_clock::time_point suite_start = std::chrono::steady_clock::now();

double elapsed_s(std::chrono::steady_clock::time_point from) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - from).count();
}

template <typename Body>
void criterion(int number, const char* label, Body&& body) {
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("unexpected exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, label,
                detail.empty() ? "" : " | ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

Mat3 exact_z_rotation(int quarter_turns) {
    static const Mat3 quarter{{0, -1, 0, 1, 0, 0, 0, 0, 1}};
    Mat3 r;
    for (int i = 0; i < ((quarter_turns % 4) + 4) % 4; ++i) r = quarter * r;
    return r;
}

Mat3 random_rotation(std::mt19937_64& rng) {
    const double a = testutil::uniform(rng, 0.0, 6.283);
    const double b = testutil::uniform(rng, 0.0, 6.283);
    Mat3 rz, rx;
    rz.m = {std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1};
    rx.m = {1, 0, 0, 0, std::cos(b), -std::sin(b), 0, std::sin(b), std::cos(b)};
    return rz * rx;
}

JointTrajectory random_trajectory(std::mt19937_64& rng, std::size_t frames, std::size_t joints) {
    JointTrajectory traj;
    traj.joints = joints;
    traj.fps = 30.0;
    traj.positions.resize(frames * joints);
    for (Vec3& p : traj.positions) {
        p = {testutil::uniform(rng, -800, 800), testutil::uniform(rng, -800, 800),
             testutil::uniform(rng, -800, 800)};
    }
    return traj;
}

// ---- criterion bodies -------------------------------------------------------

bool polarity_conservation(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    const std::size_t bin_choices[] = {1, 2, 3, 5};
    double worst = 0.0;
    std::size_t total_events = 0;

    for (int rep = 0; rep < 1000; ++rep) {
        RandomStreamSpec spec;
        spec.width = std::uint16_t(1 + rng() % 64);
        spec.height = std::uint16_t(1 + rng() % 64);
        spec.count = rng() % 100'001;
        const EventStream stream = make_random_stream(spec, rng());
        total_events += stream.size();

        VoxelizeOptions opts;
        opts.bins = bin_choices[rng() % 4];
        opts.normalize = false;
        const VoxelGrid grid = voxelize(stream, opts);

        const auto starts = oracle::frame_starts(stream.t_begin, stream.t_end, opts.fps);
        std::vector<double> expected(starts.size(), 0.0);
        std::vector<std::size_t> per_frame_events(starts.size(), 0);
        std::size_t k = 0;
        for (const Event& e : stream.events) {
            while (k + 1 < starts.size() && e.t >= starts[k + 1]) ++k;
            expected[k] += e.p;
            ++per_frame_events[k];
        }

        for (std::size_t f = 0; f < grid.frames; ++f) {
            double sum = 0.0;
            for (const float v : grid.frame(f)) sum += v;
            const double err = std::abs(sum - expected[f]);
            worst = std::max(worst, err);
            if (err > 1e-6 * double(per_frame_events[f])) {
                detail = fmt("stream %d frame %zu: sum error %.3g over %zu events", rep, f, err,
                             per_frame_events[f]);
                return false;
            }
        }
    }

    const double secs = elapsed_s(t0);
    detail = fmt("1000 streams, %zu events, worst error %.2e, %.1f s", total_events, worst, secs);
    return secs < 30.0;
}

bool voxelizer_oracle(std::string& detail) {
    std::mt19937_64 rng(202);
    const std::size_t bin_choices[] = {1, 2, 3, 5};
    double worst = 0.0;

    for (int rep = 0; rep < 200; ++rep) {
        RandomStreamSpec spec;
        spec.width = std::uint16_t(1 + rng() % 64);
        spec.height = std::uint16_t(1 + rng() % 64);
        spec.count = rng() % 20'001;
        const EventStream stream = make_random_stream(spec, rng());

        VoxelizeOptions opts;
        opts.bins = bin_choices[rng() % 4];
        opts.normalize = false;
        const VoxelGrid grid = voxelize(stream, opts);
        const std::vector<float> reference =
            oracle::voxelize_by_event(stream, opts.fps, opts.bins);

        if (grid.values.size() != reference.size()) {
            detail = fmt("case %d: shape mismatch", rep);
            return false;
        }
        for (std::size_t i = 0; i < reference.size(); ++i) {
            worst = std::max(worst, std::abs(double(grid.values[i]) - double(reference[i])));
        }
        if (worst > 1e-9) {
            detail = fmt("case %d: max deviation %.3g from per-event reference", rep, worst);
            return false;
        }

        for (const std::size_t jobs : {4u, 8u}) {
            VoxelizeOptions par = opts;
            par.jobs = jobs;
            if (voxelize(stream, par).values != grid.values) {
                detail = fmt("case %d: jobs=%zu differs from jobs=1", rep, jobs);
                return false;
            }
        }
    }
    detail = fmt("200 cases, max deviation %.2e, parallel runs bit-identical", worst);
    return true;
}

bool rotation_analytics(std::string& detail) {
    HeadPoseSequence identity;
    identity.rotations = {Mat3::identity()};
    identity.translations = {{0, 0, 0}};
    if (head_orientation_error(identity, identity) != 0.0) {
        detail = "identity error is not exactly 0";
        return false;
    }

    HeadPoseSequence quarter = identity;
    quarter.rotations = {exact_z_rotation(1)};
    const double e90 = head_orientation_error(quarter, identity);

    HeadPoseSequence half = identity;
    half.rotations = {exact_z_rotation(2)};
    const double e180 = head_orientation_error(half, identity);

    detail = fmt("90deg -> %.12f, 180deg -> %.12f", e90, e180);
    return std::abs(e90 - 2.0) <= 1e-9 && std::abs(e180 - std::sqrt(8.0)) <= 1e-9;
}

bool bce_analytics(std::string& detail) {
    std::mt19937_64 rng(303);

    BinaryMask gt = make_empty_mask(16, 16);
    for (auto& v : gt.values) v = rng() & 1;
    SoftMask half;
    half.width = 16;
    half.height = 16;
    half.values.assign(256, 0.5f);
    const double loss_half = bce_loss(half, gt);
    if (std::abs(loss_half - std::log(2.0)) > 1e-6) {
        detail = fmt("uniform 0.5 loss %.9f is not ln 2", loss_half);
        return false;
    }

    SoftMask perfect;
    perfect.width = 16;
    perfect.height = 16;
    for (const auto v : gt.values) perfect.values.push_back(v ? 1.0f : 0.0f);
    const double loss_perfect = bce_loss(perfect, gt);
    if (loss_perfect < 0.0 || loss_perfect > 2e-7) {
        detail = fmt("perfect-prediction loss %.3g outside [0, 2e-7]", loss_perfect);
        return false;
    }

    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        SoftMask pred;
        pred.width = 8;
        pred.height = 8;
        for (int i = 0; i < 64; ++i) pred.values.push_back(float(testutil::uniform(rng, 0, 1)));
        BinaryMask target = make_empty_mask(8, 8);
        for (auto& v : target.values) v = rng() & 1;
        worst = std::max(worst, std::abs(bce_loss(pred, target) -
                                         oracle::bce_by_sum(pred, target)));
    }
    detail = fmt("ln2 %.2e off, perfect %.2e, 100 direct-sum cases max %.2e",
                 std::abs(loss_half - std::log(2.0)), loss_perfect, worst);
    return worst <= 1e-9;
}

bool synth_analytics(std::string& detail) {
    std::mt19937_64 rng(404);

    // Linear log ramp crossing the 0.2 threshold 2.5 times over one interval.
    FrameSequence ramp;
    ramp.width = 1;
    ramp.height = 1;
    ramp.timestamps = {0, 1'000'000};
    const double l0 = std::log(0.2 + 1e-3);
    ramp.frames = {{0.2f}, {float(std::exp(l0 + 0.5) - 1e-3)}};
    const EventStream events = generate_events(ramp);
    if (events.size() != 2 || std::abs(events.events[0].t - 400'000) > 1 ||
        std::abs(events.events[1].t - 800'000) > 1 || events.events[0].p != 1 ||
        events.events[1].p != 1) {
        detail = fmt("ramp emitted %zu events", events.size());
        return false;
    }

    FrameSequence flat;
    flat.width = 3;
    flat.height = 2;
    flat.timestamps = {0, 500, 1000};
    std::vector<float> image(6);
    for (float& v : image) v = float(testutil::uniform(rng, 0, 1));
    flat.frames = {image, image, image};
    if (!generate_events(flat).empty()) {
        detail = "constant sequence emitted events";
        return false;
    }

    for (int rep = 0; rep < 30; ++rep) {
        FrameSequence seq;
        seq.width = 4;
        seq.height = 4;
        seq.timestamps = {0, std::int64_t(testutil::uniform_i64(rng, 1000, 2'000'000))};
        std::vector<float> a(16), b(16);
        for (float& v : a) v = float(testutil::uniform(rng, 0, 1));
        for (float& v : b) v = float(testutil::uniform(rng, 0, 1));
        seq.frames = {a, b};
        FrameSequence mirrored = seq;
        std::swap(mirrored.frames[0], mirrored.frames[1]);

        const EventStream fwd = generate_events(seq);
        const EventStream rev = generate_events(mirrored);
        if (fwd.size() != rev.size()) {
            detail = fmt("mirror case %d: %zu vs %zu events", rep, fwd.size(), rev.size());
            return false;
        }
        for (std::size_t i = 0; i < fwd.size(); ++i) {
            const Event& f = fwd.events[i];
            const Event& r = rev.events[i];
            if (f.t != r.t || f.x != r.x || f.y != r.y || f.p != -r.p) {
                detail = fmt("mirror case %d: event %zu not polarity-mirrored", rep, i);
                return false;
            }
        }
    }
    detail = "ramp 2 events at 400000/800000 ns, constants silent, 30 exact mirrors";
    return true;
}

bool masking_consistency(std::string& detail) {
    std::mt19937_64 rng(505);
    for (int rep = 0; rep < 100; ++rep) {
        RandomStreamSpec spec;
        spec.width = std::uint16_t(1 + rng() % 32);
        spec.height = std::uint16_t(1 + rng() % 32);
        spec.count = rng() % 5001;
        const EventStream stream = make_random_stream(spec, rng());

        BinaryMask mask = make_empty_mask(spec.width, spec.height);
        for (auto& v : mask.values) v = rng() % 10 < 3;
        BinaryMask other = make_empty_mask(spec.width, spec.height);
        for (auto& v : other.values) v = rng() % 10 < 3;

        EventStream kept = stream;
        kept.events.clear();
        for (const Event& e : stream.events) {
            if (!mask.at(e.y, e.x)) kept.events.push_back(e);
        }

        VoxelizeOptions opts;
        opts.bins = 3;
        opts.normalize = false;
        VoxelGrid masked = voxelize(stream, opts);
        const BinaryMask one[] = {mask};
        apply_masks(masked, one);
        const VoxelGrid direct = voxelize(kept, opts);
        if (masked.values != direct.values || !masked.mask_applied) {
            detail = fmt("case %d: masked grid differs from masked-event grid", rep);
            return false;
        }

        VoxelGrid twice = masked;
        apply_masks(twice, one);
        if (twice.values != masked.values) {
            detail = fmt("case %d: apply_mask is not idempotent", rep);
            return false;
        }

        VoxelGrid sequential = voxelize(stream, opts);
        apply_masks(sequential, one);
        const BinaryMask two[] = {other};
        apply_masks(sequential, two);
        BinaryMask unioned = mask;
        for (std::size_t i = 0; i < unioned.values.size(); ++i) {
            unioned.values[i] = unioned.values[i] || other.values[i];
        }
        VoxelGrid at_once = voxelize(stream, opts);
        const BinaryMask both[] = {unioned};
        apply_masks(at_once, both);
        if (sequential.values != at_once.values) {
            detail = fmt("case %d: sequential masks differ from their union", rep);
            return false;
        }
    }
    detail = "100 cases: removal equivalence, idempotence, union composition all exact";
    return true;
}

bool rasterizer_oracle(std::string& detail) {
    std::mt19937_64 rng(606);
    for (int rep = 0; rep < 500; ++rep) {
        ScreenTriangle tri;
        tri.a = {testutil::uniform(rng, -16, 80), testutil::uniform(rng, -16, 80)};
        tri.b = {testutil::uniform(rng, -16, 80), testutil::uniform(rng, -16, 80)};
        tri.c = {testutil::uniform(rng, -16, 80), testutil::uniform(rng, -16, 80)};
        if (rep % 50 == 0) tri.c = tri.a; // degenerate
        const ScreenTriangle tris[] = {tri};
        if (rasterize_mask(tris, 64, 64) != oracle::rasterize_by_scan({tri}, 64, 64)) {
            detail = fmt("triangle %d differs from brute-force scan", rep);
            return false;
        }
    }
    detail = "500 triangles at 64x64 mask-identical to per-pixel scan";
    return true;
}

bool metric_invariances(std::string& detail) {
    std::mt19937_64 rng(707);

    // Identical inputs: construct feet that stay put so every metric is zero.
    JointTrajectory traj = random_trajectory(rng, 8, 5);
    for (std::size_t t = 0; t < 8; ++t) {
        traj.at(t, 1) = {100, 200, 0};
        traj.at(t, 3) = {-50, 75, 0};
    }
    HeadPoseSequence head;
    for (std::size_t t = 0; t < 8; ++t) {
        head.rotations.push_back(exact_z_rotation(int(t)));
        head.translations.push_back({testutil::uniform(rng, -500, 500),
                                     testutil::uniform(rng, -500, 500),
                                     testutil::uniform(rng, -500, 500)});
    }
    MetricConfig config;
    config.foot_joints = {1, 3};
    const MetricReport same = evaluate_all(traj, traj, head, head, config);
    if (same.mpjpe_mm != 0.0 || same.o_head != 0.0 || same.t_head_mm != 0.0 ||
        same.accel_mm_s2 != 0.0 || same.fs_mm != 0.0) {
        detail = fmt("identical inputs gave %.3g/%.3g/%.3g/%.3g/%.3g", same.mpjpe_mm,
                     same.o_head, same.t_head_mm, same.accel_mm_s2, same.fs_mm);
        return false;
    }

    // Common rotation leaves MPJPE and T_head unchanged.
    const JointTrajectory pred = random_trajectory(rng, 10, 6);
    const JointTrajectory gt = random_trajectory(rng, 10, 6);
    const double base_mpjpe = mpjpe(pred, gt);
    const Mat3 r = random_rotation(rng);
    JointTrajectory pred_r = pred, gt_r = gt;
    for (Vec3& p : pred_r.positions) p = r * p;
    for (Vec3& p : gt_r.positions) p = r * p;
    const double rot_mpjpe = mpjpe(pred_r, gt_r);

    HeadPoseSequence hp, hg;
    for (int t = 0; t < 10; ++t) {
        hp.rotations.push_back(random_rotation(rng));
        hg.rotations.push_back(random_rotation(rng));
        hp.translations.push_back({testutil::uniform(rng, -500, 500),
                                   testutil::uniform(rng, -500, 500),
                                   testutil::uniform(rng, -500, 500)});
        hg.translations.push_back({testutil::uniform(rng, -500, 500),
                                   testutil::uniform(rng, -500, 500),
                                   testutil::uniform(rng, -500, 500)});
    }
    const double base_t = head_translation_error(hp, hg);
    HeadPoseSequence hp_r = hp, hg_r = hg;
    for (int t = 0; t < 10; ++t) {
        hp_r.translations[t] = r * hp.translations[t];
        hg_r.translations[t] = r * hg.translations[t];
    }
    const double rot_t = head_translation_error(hp_r, hg_r);
    if (std::abs(rot_mpjpe - base_mpjpe) > 1e-9 || std::abs(rot_t - base_t) > 1e-9) {
        detail = fmt("rotation moved MPJPE by %.3g, T_head by %.3g",
                     std::abs(rot_mpjpe - base_mpjpe), std::abs(rot_t - base_t));
        return false;
    }

    // Adding the same affine-in-time motion to both inputs preserves accel.
    const double base_accel = accel_error(pred, gt);
    JointTrajectory pred_a = pred, gt_a = gt;
    for (std::size_t j = 0; j < pred.joints; ++j) {
        const Vec3 a = {testutil::uniform(rng, -100, 100), testutil::uniform(rng, -100, 100),
                        testutil::uniform(rng, -100, 100)};
        const Vec3 b = {testutil::uniform(rng, -20, 20), testutil::uniform(rng, -20, 20),
                        testutil::uniform(rng, -20, 20)};
        for (std::size_t t = 0; t < pred.frames(); ++t) {
            const Vec3 shift = a + b * double(t);
            pred_a.at(t, j) = pred.at(t, j) + shift;
            gt_a.at(t, j) = gt.at(t, j) + shift;
        }
    }
    const double affine_accel = accel_error(pred_a, gt_a);
    if (std::abs(affine_accel - base_accel) > 1e-6) {
        detail = fmt("affine warp moved accel by %.3g", std::abs(affine_accel - base_accel));
        return false;
    }

    // Foot-skating weight decreases strictly with start height.
    const std::size_t foot[] = {0};
    double previous = 8.0; // above the h=0 value of 7
    for (double h = 0.0; h < 50.0; h += 5.0) {
        JointTrajectory step;
        step.joints = 1;
        step.fps = 30.0;
        step.positions = {{0, 0, h}, {3, 4, h}};
        const double fs = foot_skating(step, foot, 50.0, 0.0);
        if (h == 0.0 && fs != 7.0) {
            detail = fmt("ground-level step weight is %.12f, want 7", fs);
            return false;
        }
        if (!(fs > 0.0 && fs < previous)) {
            detail = fmt("weight not strictly decreasing at h=%g (%.12f vs %.12f)", h, fs,
                         previous);
            return false;
        }
        previous = fs;
    }

    detail = "zeros exact, rotation/affine invariance hold, FS weight monotone";
    return true;
}

bool dataset_arithmetic(std::string& detail) {
    std::vector<SequenceManifest> manifests;
    for (int i = 0; i < 966 + 301; ++i) {
        SequenceManifest m;
        m.sequence_id = "seq_" + std::to_string(i);
        m.split = i < 966 ? Split::Train : Split::Test;
        m.frame_count = 150;
        m.fps = 30.0;
        m.events_path = "events/" + m.sequence_id + ".evt1";
        m.masks_path = "masks/" + m.sequence_id;
        m.poses_path = "poses/" + m.sequence_id + ".json";
        m.meshes_path = "meshes/" + m.sequence_id + ".obj";
        manifests.push_back(m);
    }
    const DatasetStats stats = dataset_stats(manifests);
    detail = fmt("%llu sequences, %llu frames (train %llu / test %llu)",
                 (unsigned long long)stats.n_sequences, (unsigned long long)stats.n_frames,
                 (unsigned long long)stats.n_train, (unsigned long long)stats.n_test);
    return stats == DatasetStats{1267, 190050, 966, 301};
}

bool format_robustness(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(808);
    testutil::TempDir dir;

    // Round-trips first: write, read, write again, compare bytes.
    RandomStreamSpec spec;
    spec.count = 500;
    EventStream stream = make_random_stream(spec, 9);
    stream.t_begin = stream.events.front().t;
    stream.t_end = stream.events.back().t + 1;
    write_events(dir.file("seed.evt1"), stream);
    write_events(dir.file("rt.evt1"), read_events(dir.file("seed.evt1")));
    if (read_file(dir.file("seed.evt1")) != read_file(dir.file("rt.evt1"))) {
        detail = "event round-trip is not byte-identical";
        return false;
    }

    VoxelGrid grid;
    grid.frames = 2;
    grid.bins = 3;
    grid.height = 4;
    grid.width = 5;
    grid.fps = 30;
    grid.provenance = {"voxelize(fps=30,bins=3)"};
    grid.values.resize(grid.frames * grid.frame_size());
    for (float& v : grid.values) v = float(testutil::uniform(rng, -2, 2));
    write_voxel_grid(dir.file("seed.vox"), grid);
    write_voxel_grid(dir.file("rt.vox"), read_voxel_grid(dir.file("seed.vox")));
    if (read_file(dir.file("seed.vox")) != read_file(dir.file("rt.vox")) ||
        read_file(dir.file("seed.vox.json")) != read_file(dir.file("rt.vox.json"))) {
        detail = "voxel round-trip is not byte-identical";
        return false;
    }

    BinaryMask bmask = make_empty_mask(9, 7);
    for (auto& v : bmask.values) v = rng() & 1;
    write_mask(dir.file("seed.pbm"), bmask);
    write_mask(dir.file("rt.pbm"), read_binary_mask(dir.file("seed.pbm")));

    SoftMask smask;
    smask.width = 9;
    smask.height = 7;
    smask.values.resize(63);
    for (float& v : smask.values) v = float(testutil::uniform(rng, 0, 1));
    write_mask(dir.file("seed.pgm"), smask);
    write_mask(dir.file("rt.pgm"), read_soft_mask(dir.file("seed.pgm")));

    TriangleMesh mesh;
    for (int i = 0; i < 8; ++i) {
        mesh.vertices.push_back({testutil::uniform(rng, -5, 5), testutil::uniform(rng, -5, 5),
                                 testutil::uniform(rng, -5, 5)});
    }
    for (int i = 0; i < 6; ++i) {
        mesh.faces.push_back(
            {std::uint32_t(rng() % 8), std::uint32_t(rng() % 8), std::uint32_t(rng() % 8)});
    }
    write_mesh(dir.file("seed.obj"), mesh);
    write_mesh(dir.file("rt.obj"), read_mesh(dir.file("seed.obj")));

    PoseFile poses;
    poses.fps = 30.0;
    JointTrajectory traj;
    traj.joints = 2;
    traj.fps = 30.0;
    traj.positions = {{1.5, -2.25, 3.125}, {4, 5, 6}, {7, 8, 9}, {-1, -2, -3}};
    poses.joints = traj;
    write_poses(dir.file("seed_poses.json"), poses);
    write_poses(dir.file("rt_poses.json"), read_poses(dir.file("seed_poses.json")));

    SequenceManifest manifest;
    manifest.sequence_id = "seq_0";
    manifest.split = Split::Train;
    manifest.frame_count = 150;
    manifest.fps = 30.0;
    manifest.events_path = "e.evt1";
    manifest.masks_path = "m";
    manifest.poses_path = "p.json";
    manifest.meshes_path = "g.obj";
    write_manifest(dir.file("seed_manifest.json"), manifest);
    write_manifest(dir.file("rt_manifest.json"), read_manifest(dir.file("seed_manifest.json")));

    for (const char* name : {"pbm", "pgm", "obj"}) {
        if (read_file(dir.file(std::string("seed.") + name)) !=
            read_file(dir.file(std::string("rt.") + name))) {
            detail = std::string(name) + " round-trip is not byte-identical";
            return false;
        }
    }
    for (const char* name : {"poses", "manifest"}) {
        if (read_file(dir.file(std::string("seed_") + name + ".json")) !=
            read_file(dir.file(std::string("rt_") + name + ".json"))) {
            detail = std::string(name) + " round-trip is not byte-identical";
            return false;
        }
    }

    // Gray frames have no writer; keep fixed seeds for fuzzing only.
    const std::string gray_p5 = "P5\n4 3\n255\n" + std::string(12, '\x40');
    const std::string gray_p3 = "P3\n2 2\n255\n1 2 3 4 5 6 7 8 9 10 11 12\n";
    write_file_atomic(dir.file("seed_p5.pgm"), gray_p5);
    write_file_atomic(dir.file("seed_p3.ppm"), gray_p3);

    // Fuzz: truncations and bit flips must yield structured errors, never
    // crashes or foreign exception types.
    struct Target {
        std::string seed;        // bytes to mutate
        std::string mutate_path; // where the mutant is written
        int reader;              // dispatch index
    };
    const std::vector<Target> targets = {
        {read_file(dir.file("seed.evt1")), dir.file("fz.evt1").string(), 0},
        {read_file(dir.file("seed.vox")), dir.file("seed.vox").string(), 1},
        {read_file(dir.file("seed.vox.json")), dir.file("seed.vox.json").string(), 1},
        {read_file(dir.file("seed.pbm")), dir.file("fz.pbm").string(), 2},
        {read_file(dir.file("seed.pgm")), dir.file("fz.pgm").string(), 3},
        {gray_p5, dir.file("fz_p5.pgm").string(), 4},
        {gray_p3, dir.file("fz_p3.ppm").string(), 4},
        {read_file(dir.file("seed.obj")), dir.file("fz.obj").string(), 5},
        {read_file(dir.file("seed_poses.json")), dir.file("fz_poses.json").string(), 6},
        {read_file(dir.file("seed_manifest.json")), dir.file("fz_manifest.json").string(), 7},
    };
    const std::string vox_payload = targets[1].seed;
    const std::string vox_sidecar = targets[2].seed;

    std::size_t survived = 0;
    const std::size_t total_cases = 10'000;
    for (std::size_t i = 0; i < total_cases; ++i) {
        const Target& target = targets[i % targets.size()];
        std::string bytes = target.seed;
        switch (rng() % 3) {
        case 0:
            bytes.resize(rng() % (bytes.size() + 1));
            break;
        case 1: {
            const int flips = 1 + int(rng() % 16);
            for (int f = 0; f < flips && !bytes.empty(); ++f) {
                bytes[rng() % bytes.size()] ^= char(1 << (rng() % 8));
            }
            break;
        }
        default:
            bytes.resize(rng() % (bytes.size() + 1));
            for (int f = 0; f < 4 && !bytes.empty(); ++f) {
                bytes[rng() % bytes.size()] ^= char(1 << (rng() % 8));
            }
            break;
        }
        write_file_atomic(target.mutate_path, bytes);

        try {
            switch (target.reader) {
            case 0: read_events(target.mutate_path); break;
            case 1: read_voxel_grid(dir.file("seed.vox")); break;
            case 2: read_binary_mask(target.mutate_path); break;
            case 3: read_soft_mask(target.mutate_path); break;
            case 4: read_gray_frame(target.mutate_path); break;
            case 5: read_mesh(target.mutate_path); break;
            case 6: read_poses(target.mutate_path); break;
            default: read_manifest(target.mutate_path); break;
            }
        } catch (const Error&) {
            // structured rejection is the expected outcome
        } catch (const std::exception& e) {
            detail = fmt("case %zu leaked a foreign exception: %s", i, e.what());
            return false;
        }
        ++survived;

        if (target.reader == 1) { // restore the voxel pair for the next case
            write_file_atomic(dir.file("seed.vox"), vox_payload);
            write_file_atomic(dir.file("seed.vox.json"), vox_sidecar);
        }
    }

    const double secs = elapsed_s(t0);
    const double total = elapsed_s(suite_start);
    detail = fmt("%zu fuzz cases survived, round-trips byte-exact, %.1f s (suite %.1f s)",
                 survived, secs, total);
    return survived == total_cases && total < 300.0;
}

bool throughput(std::string& detail) {
    const BenchResult result = bench_voxelize(8'000'000, 640, 480, 3);
    detail = fmt("%.3g events/s over %zu events (%.2f s)", result.events_per_second,
                 result.events, result.seconds);
    return result.events_per_second >= 5e6;
}

} // namespace

int main() {
    criterion(1, "per-frame voxel sums conserve polarity", polarity_conservation);
    criterion(2, "voxelizer matches per-event reference, parallel-invariant", voxelizer_oracle);
    criterion(3, "orientation error analytics (identity, 90deg, 180deg)", rotation_analytics);
    criterion(4, "BCE analytics and direct-sum agreement", bce_analytics);
    criterion(5, "threshold-crossing synthesis analytics", synth_analytics);
    criterion(6, "mask application equals event removal", masking_consistency);
    criterion(7, "rasterizer matches brute-force point-in-triangle", rasterizer_oracle);
    criterion(8, "metric zeros and invariances", metric_invariances);
    criterion(9, "dataset statistics arithmetic", dataset_arithmetic);
    criterion(10, "reader fuzz robustness and byte-exact round-trips", format_robustness);
    criterion(11, "voxelizer throughput", throughput);

    std::printf("acceptance: %d/11 passed in %.1f s\n", 11 - failures, elapsed_s(suite_start));
    return failures == 0 ? 0 : 1;
}
