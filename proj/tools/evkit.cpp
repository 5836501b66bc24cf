#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evkit/dataset_io.hpp"
#include "evkit/event_synth.hpp"
#include "evkit/mask_gen.hpp"
#include "evkit/motion_seg.hpp"
#include "evkit/pose_metrics.hpp"
#include "evkit/testing.hpp"
#include "evkit/voxelizer.hpp"

namespace fs = std::filesystem;

namespace {

struct PipelineConfig {
    std::uint32_t fps = 30;
    std::size_t bins = 3;
    std::string norm = "frame";
    double c_pos = 0.2;
    double c_neg = 0.2;
    int dilate = 2;
    double fs_thresh_mm = 50.0;
    double floor_mm = 0.0;
    std::string up = "z";
    unsigned jobs = 1;
};

void echo_config(const PipelineConfig& cfg) {
    std::fprintf(stderr,
                 "effective-config: fps=%u bins=%zu norm=%s c-pos=%g c-neg=%g dilate=%d "
                 "fs-thresh-mm=%g floor-mm=%g up=%s jobs=%u\n",
                 cfg.fps, cfg.bins, cfg.norm.c_str(), cfg.c_pos, cfg.c_neg, cfg.dilate,
                 cfg.fs_thresh_mm, cfg.floor_mm, cfg.up.c_str(), cfg.jobs);
}

std::vector<fs::path> list_files(const fs::path& dir, std::initializer_list<const char*> exts) {
    if (!fs::is_directory(dir)) throw evkit::IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (std::any_of(exts.begin(), exts.end(),
                        [&](const char* e) { return ext == e; })) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<std::int64_t> read_timestamps(const fs::path& path) {
    const std::string text = evkit::read_file(path);
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos >= text.size()) break;
        std::size_t end = pos;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
        try {
            out.push_back(std::stoll(text.substr(pos, end - pos)));
        } catch (const std::exception&) {
            throw evkit::FormatError("bad timestamp '" + text.substr(pos, end - pos) + "'",
                                     pos);
        }
        pos = end;
    }
    return out;
}

int run_synth(const PipelineConfig& cfg, const std::string& frames_dir,
              const std::string& out_path, double eps_log, std::int64_t refractory_ns,
              double jitter, std::uint64_t seed) {
    const fs::path dir(frames_dir);
    const std::vector<fs::path> frame_files = list_files(dir, {".pgm", ".ppm"});
    if (frame_files.empty()) {
        throw evkit::InvalidArgument("no .pgm/.ppm frames in " + dir.string());
    }
    const std::vector<std::int64_t> timestamps = read_timestamps(dir / "timestamps.txt");
    if (timestamps.size() != frame_files.size()) {
        throw evkit::InvalidArgument("found " + std::to_string(frame_files.size()) +
                                     " frames but " + std::to_string(timestamps.size()) +
                                     " timestamps");
    }

    evkit::FrameSequence seq;
    seq.timestamps = timestamps;
    for (const fs::path& file : frame_files) {
        evkit::GrayFrame frame = evkit::read_gray_frame(file);
        if (seq.frames.empty()) {
            seq.width = frame.width;
            seq.height = frame.height;
        } else if (frame.width != seq.width || frame.height != seq.height) {
            throw evkit::ShapeError("frame " + file.string() + " has mismatched dimensions");
        }
        seq.frames.push_back(std::move(frame.values));
    }

    evkit::SynthConfig synth;
    synth.c_pos = cfg.c_pos;
    synth.c_neg = cfg.c_neg;
    synth.eps_log = eps_log;
    synth.refractory_ns = refractory_ns;
    synth.threshold_jitter = jitter;
    synth.seed = seed;

    const evkit::EventStream stream = evkit::generate_events(seq, synth);
    evkit::write_events(out_path, stream);
    std::printf("%zu\n", stream.size());
    std::fprintf(stderr, "wrote %zu events to %s\n", stream.size(), out_path.c_str());
    return 0;
}

int run_voxelize(const PipelineConfig& cfg, const std::string& events_path,
                 const std::string& out_path, bool raw, std::int64_t t_begin,
                 std::int64_t t_end, bool has_begin, bool has_end) {
    evkit::EventStream stream = evkit::read_events(events_path);
    if (has_begin || has_end) {
        stream = evkit::slice_time(stream, has_begin ? t_begin : stream.t_begin,
                                   has_end ? t_end : stream.t_end);
    }
    evkit::VoxelizeOptions opts;
    opts.fps = cfg.fps;
    opts.bins = cfg.bins;
    opts.normalize = !raw;
    opts.norm_mode = evkit::norm_mode_from_string(cfg.norm);
    opts.jobs = cfg.jobs;
    const evkit::VoxelGrid grid = evkit::voxelize(stream, opts);
    evkit::write_voxel_grid(out_path, grid);
    std::fprintf(stderr, "grid: t=%zu b=%zu h=%zu w=%zu normalized=%d\n", grid.frames,
                 grid.bins, grid.height, grid.width, int(grid.normalized));
    return 0;
}

int run_maskgen(const PipelineConfig& cfg, const std::string& mesh_path,
                const std::string& poses_path, const evkit::CameraIntrinsics& intrinsics,
                const std::string& out_dir, const std::string& prefix) {
    const evkit::TriangleMesh mesh = evkit::read_mesh(mesh_path);
    const evkit::PoseFile poses = evkit::read_poses(poses_path);
    if (!poses.head) {
        throw evkit::InvalidArgument("pose file has no head track: " + poses_path);
    }
    fs::create_directories(out_dir);

    const evkit::HeadPoseSequence& head = *poses.head;
    for (std::size_t t = 0; t < head.frames(); ++t) {
        evkit::RigidTransform world_to_camera;
        world_to_camera.rotation = head.rotations[t];
        // Pose translations are millimeters; mesh vertices are meters.
        world_to_camera.translation = head.translations[t] * 1e-3;
        const evkit::BinaryMask mask =
            evkit::make_dynamic_mask(mesh, world_to_camera, intrinsics, cfg.dilate);
        char name[64];
        std::snprintf(name, sizeof(name), "%s_%05zu.pbm", prefix.c_str(), t);
        evkit::write_mask(fs::path(out_dir) / name, mask);
    }
    std::fprintf(stderr, "wrote %zu masks to %s\n", head.frames(), out_dir.c_str());
    return 0;
}

int run_segment(const PipelineConfig& cfg, const std::string& voxels_path,
                const std::vector<std::string>& mask_paths,
                const std::vector<std::string>& pred_paths, const std::string& out_path,
                const std::string& report_path, bool renormalize) {
    evkit::VoxelGrid grid = evkit::read_voxel_grid(voxels_path);
    std::vector<evkit::BinaryMask> masks;
    masks.reserve(mask_paths.size());
    for (const std::string& p : mask_paths) masks.push_back(evkit::read_binary_mask(p));
    evkit::apply_masks(grid, masks);
    if (renormalize) {
        evkit::normalize_grid(grid, evkit::norm_mode_from_string(cfg.norm));
    }
    if (!out_path.empty()) {
        evkit::write_voxel_grid(out_path, grid);
        std::fprintf(stderr, "wrote masked grid to %s\n", out_path.c_str());
    }

    if (!pred_paths.empty()) {
        if (pred_paths.size() != mask_paths.size()) {
            throw evkit::InvalidArgument("need one predicted mask per ground-truth mask");
        }
        double bce_sum = 0.0, iou_sum = 0.0;
        nlohmann::json per_frame = nlohmann::json::array();
        for (std::size_t i = 0; i < pred_paths.size(); ++i) {
            const evkit::SoftMask pred = evkit::read_soft_mask(pred_paths[i]);
            const double bce = evkit::bce_loss(pred, masks[i]);
            const double iou = evkit::mask_iou(evkit::threshold_mask(pred), masks[i]);
            bce_sum += bce;
            iou_sum += iou;
            per_frame.push_back({{"BCE", bce}, {"IoU", iou}});
        }
        const double bce = bce_sum / double(pred_paths.size());
        const double iou = iou_sum / double(pred_paths.size());
        std::printf("BCE: %.9g\nIoU: %.9g\n", bce, iou);
        if (!report_path.empty()) {
            nlohmann::json j;
            j["BCE"] = bce;
            j["IoU"] = iou;
            j["per_frame"] = std::move(per_frame);
            evkit::write_file_atomic(report_path, j.dump(2) + "\n");
        }
    }
    return 0;
}

int run_evaluate(const PipelineConfig& cfg, const std::vector<std::string>& pred_paths,
                 const std::vector<std::string>& gt_paths,
                 const std::vector<std::size_t>& foot_joints, const std::string& report_path,
                 bool override_up) {
    if (pred_paths.size() != gt_paths.size() || pred_paths.empty()) {
        throw evkit::InvalidArgument("need equal, non-zero numbers of --pred and --gt files");
    }
    evkit::MetricConfig metric_cfg;
    metric_cfg.foot_joints = foot_joints;
    metric_cfg.fs_h_thresh_mm = cfg.fs_thresh_mm;
    metric_cfg.floor_mm = cfg.floor_mm;

    std::vector<std::pair<std::string, evkit::MetricReport>> per_sequence;
    std::vector<evkit::MetricReport> reports;
    for (std::size_t i = 0; i < pred_paths.size(); ++i) {
        evkit::PoseFile pred = evkit::read_poses(pred_paths[i]);
        evkit::PoseFile gt = evkit::read_poses(gt_paths[i]);
        if (!pred.joints || !pred.head || !gt.joints || !gt.head) {
            throw evkit::InvalidArgument("pose files must carry both joints and head: " +
                                         pred_paths[i] + ", " + gt_paths[i]);
        }
        if (override_up) {
            pred.joints->up_axis = evkit::up_axis_from_string(cfg.up);
            gt.joints->up_axis = pred.joints->up_axis;
        }
        reports.push_back(
            evkit::evaluate_all(*pred.joints, *gt.joints, *pred.head, *gt.head, metric_cfg));
        per_sequence.emplace_back(fs::path(pred_paths[i]).stem().string(), reports.back());
    }
    const evkit::MetricReport aggregate = evkit::aggregate_reports(reports);
    std::fputs(evkit::format_report_text(aggregate).c_str(), stdout);
    if (!report_path.empty()) {
        evkit::write_report(report_path, aggregate, per_sequence);
        std::fprintf(stderr, "wrote report to %s\n", report_path.c_str());
    }
    return 0;
}

int run_stats(const std::string& manifest_dir, const std::string& json_path) {
    const std::vector<fs::path> files = list_files(manifest_dir, {".json"});
    std::vector<evkit::SequenceManifest> manifests;
    manifests.reserve(files.size());
    for (const fs::path& p : files) manifests.push_back(evkit::read_manifest(p));
    const evkit::DatasetStats stats = evkit::dataset_stats(manifests);
    std::printf("sequences: %llu\nframes: %llu\ntrain: %llu\ntest: %llu\n",
                (unsigned long long)stats.n_sequences, (unsigned long long)stats.n_frames,
                (unsigned long long)stats.n_train, (unsigned long long)stats.n_test);
    if (!json_path.empty()) {
        nlohmann::json j;
        j["n_sequences"] = stats.n_sequences;
        j["n_frames"] = stats.n_frames;
        j["n_train"] = stats.n_train;
        j["n_test"] = stats.n_test;
        evkit::write_file_atomic(json_path, j.dump(2) + "\n");
    }
    return 0;
}

int run_selftest(bool bench) {
    int failed = 0;
    auto check = [&](const char* name, bool ok, const std::string& detail = "") {
        if (ok) {
            std::printf("[PASS] %s\n", name);
        } else {
            const std::string suffix = detail.empty() ? "" : " (" + detail + ")";
            std::printf("[FAIL] %s%s\n", name, suffix.c_str());
            ++failed;
        }
    };

    {
        evkit::EventStream s;
        s.width = s.height = 4;
        s.t_begin = 0;
        s.t_end = 10;
        s.events = {{1, 0, 0, 1}, {2, 1, 1, 1}, {3, 2, 2, -1}};
        const evkit::EventStream cut = evkit::slice_time(s, 2, 3);
        check("slice keeps half-open window", cut.size() == 1 && cut.events[0].t == 2);
    }
    {
        // t* = (t - s)/(e - s) * (B - 1) = 0.25 * 2 = 0.5
        const evkit::Event e{250'000, 1, 1, 1};
        const std::vector<float> block =
            evkit::accumulate_frame({&e, 1}, 0, 1'000'000, 3, 4, 4);
        check("bilinear midpoint splits 0.5/0.5",
              block[0 * 16 + 5] == 0.5f && block[1 * 16 + 5] == 0.5f);
    }
    {
        std::vector<float> v = {-2.0f, 0.0f, 2.0f};
        evkit::normalize_frame(v);
        check("min-max normalization", v[0] == 0.0f && v[1] == 0.5f && v[2] == 1.0f);
    }
    {
        evkit::FrameSequence seq;
        seq.width = seq.height = 1;
        const double eps = 1e-3;
        const float i0 = 0.3f - float(eps);
        const float i1 = float(0.3 * std::exp(0.5) - eps);
        seq.frames = {{i0}, {i1}};
        seq.timestamps = {0, 1'000'000};
        evkit::SynthConfig scfg;
        scfg.eps_log = eps;
        const evkit::EventStream ev = evkit::generate_events(seq, scfg);
        const bool ok = ev.size() == 2 && std::llabs(ev.events[0].t - 400'000) <= 1 &&
                        std::llabs(ev.events[1].t - 800'000) <= 1 && ev.events[0].p == 1;
        check("threshold crossings on a log ramp", ok,
              "got " + std::to_string(ev.size()) + " events");
    }
    {
        evkit::HeadPoseSequence pred, gt;
        evkit::Mat3 rot90; // 90 degrees about z
        rot90.m = {0, -1, 0, 1, 0, 0, 0, 0, 1};
        pred.rotations = {rot90};
        pred.translations = {{0, 0, 0}};
        gt.rotations = {evkit::Mat3::identity()};
        gt.translations = {{0, 0, 0}};
        const double err = evkit::head_orientation_error(pred, gt);
        check("orientation error of a quarter turn", std::abs(err - 2.0) < 1e-12);
    }
    {
        evkit::SoftMask pred;
        pred.width = pred.height = 4;
        pred.values.assign(16, 0.5f);
        const evkit::BinaryMask gt = evkit::make_empty_mask(4, 4);
        check("uniform-0.5 cross-entropy is ln 2",
              std::abs(evkit::bce_loss(pred, gt) - std::log(2.0)) < 1e-6);
    }
    {
        evkit::BinaryMask m = evkit::make_empty_mask(5, 5);
        m.at(2, 2) = 1;
        const evkit::BinaryMask d = evkit::dilate_mask(m, 1);
        const long set = std::count(d.values.begin(), d.values.end(), std::uint8_t(1));
        check("radius-1 dilation is a plus shape", set == 5 && d.at(2, 1) && d.at(1, 2));
    }
    {
        std::vector<evkit::SequenceManifest> manifests;
        for (int i = 0; i < 1267; ++i) {
            evkit::SequenceManifest m;
            m.sequence_id = "seq" + std::to_string(i);
            m.split = i < 966 ? evkit::Split::Train : evkit::Split::Test;
            m.frame_count = 150;
            m.fps = 30.0;
            manifests.push_back(m);
        }
        const evkit::DatasetStats st = evkit::dataset_stats(manifests);
        check("dataset counts add up",
              st.n_sequences == 1267 && st.n_frames == 190050 && st.n_train == 966 &&
                  st.n_test == 301);
    }

    if (bench) {
        const evkit::BenchResult r = evkit::bench_voxelize(10'000'000, 640, 480, 3);
        std::printf("voxelize throughput: %.3e events/s (%zu events in %.3f s)\n",
                    r.events_per_second, r.events, r.seconds);
        check("throughput of at least 5e6 events/s", r.events_per_second >= 5e6);
    }

    std::printf("selftest: %s\n", failed == 0 ? "PASS" : "FAIL");
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evkit: event-camera voxel pipeline and pose-metric toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Config file with key = value lines; flags override it");

    PipelineConfig cfg;
    app.add_option("--fps", cfg.fps, "Frame rate for segmentation")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--bins", cfg.bins, "Temporal bins per frame")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--norm", cfg.norm, "Min-max normalization scope")
        ->capture_default_str()
        ->check(CLI::IsMember({"frame", "bin", "grid"}));
    app.add_option("--c-pos", cfg.c_pos, "Positive contrast threshold [tool default]")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--c-neg", cfg.c_neg, "Negative contrast threshold [tool default]")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--dilate", cfg.dilate, "Mask dilation radius in pixels [tool default]")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--fs-thresh-mm", cfg.fs_thresh_mm,
                   "Foot-skating height threshold [tool default]")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--floor-mm", cfg.floor_mm, "Ground-plane height [tool default]")
        ->capture_default_str();
    auto* up_opt = app.add_option("--up", cfg.up, "Up axis for ground-plane metrics "
                                                  "[tool default]")
                       ->capture_default_str()
                       ->check(CLI::IsMember({"y", "z"}));
    app.add_option("--jobs", cfg.jobs, "Worker threads for per-frame stages")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    // synth
    auto* synth = app.add_subcommand("synth", "Turn a frame directory into an event file");
    std::string frames_dir, out_path;
    double eps_log = 1e-3, jitter = 0.0;
    std::int64_t refractory_ns = 0;
    std::uint64_t seed = 0;
    synth->add_option("--frames", frames_dir,
                      "Directory of .pgm/.ppm frames plus timestamps.txt")
        ->required();
    synth->add_option("--out", out_path, "Output event file")->required();
    synth->add_option("--eps-log", eps_log, "Additive constant before the log")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    synth->add_option("--refractory-ns", refractory_ns, "Per-pixel dead time")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--jitter", jitter, "Per-pixel threshold jitter stddev")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", seed, "Jitter seed")->capture_default_str();

    // voxelize
    auto* vox = app.add_subcommand("voxelize", "Turn an event file into a voxel grid");
    std::string events_path, vox_out;
    bool raw = false;
    std::int64_t t_begin = 0, t_end = 0;
    vox->add_option("--events", events_path, "Input event file")->required();
    vox->add_option("--out", vox_out, "Output voxel file (sidecar written alongside)")
        ->required();
    vox->add_flag("--raw", raw, "Skip normalization");
    auto* tb = vox->add_option("--t-begin", t_begin,
                               "Override the derived window start (ns)");
    auto* te = vox->add_option("--t-end", t_end, "Override the derived window end (ns)");

    // maskgen
    auto* maskgen = app.add_subcommand("maskgen", "Project a mesh into per-frame masks");
    std::string mesh_path, poses_path, mask_out_dir, mask_prefix = "mask";
    evkit::CameraIntrinsics intrinsics;
    maskgen->add_option("--mesh", mesh_path, "Mesh file (v/f lines, meters)")->required();
    maskgen->add_option("--poses", poses_path,
                        "Pose file; the head track provides world-to-camera transforms")
        ->required();
    maskgen->add_option("--fx", intrinsics.fx, "Focal length x (pixels)")->required();
    maskgen->add_option("--fy", intrinsics.fy, "Focal length y (pixels)")->required();
    maskgen->add_option("--cx", intrinsics.cx, "Principal point x")->required();
    maskgen->add_option("--cy", intrinsics.cy, "Principal point y")->required();
    maskgen->add_option("--width", intrinsics.width, "Sensor width")->required();
    maskgen->add_option("--height", intrinsics.height, "Sensor height")->required();
    maskgen->add_option("--out-dir", mask_out_dir, "Output directory")->required();
    maskgen->add_option("--prefix", mask_prefix, "Mask filename prefix")
        ->capture_default_str();

    // segment
    auto* segment = app.add_subcommand("segment", "Apply dynamic masks to a voxel grid");
    std::string voxels_path, seg_out, seg_report;
    std::vector<std::string> mask_paths, pred_paths;
    bool renormalize = false;
    segment->add_option("--voxels", voxels_path, "Input voxel file")->required();
    segment->add_option("--masks", mask_paths, "Mask files, one per frame or a single one")
        ->required();
    segment->add_option("--out", seg_out, "Output voxel file");
    segment->add_option("--pred", pred_paths, "Predicted soft masks for the quality report");
    segment->add_option("--report", seg_report, "Write the BCE/IoU report here");
    segment->add_flag("--normalize", renormalize, "Re-normalize after masking");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score predicted against ground-truth poses");
    std::vector<std::string> eval_pred, eval_gt;
    std::vector<std::size_t> foot_joints;
    std::string eval_report;
    evaluate->add_option("--pred", eval_pred, "Predicted pose files")->required();
    evaluate->add_option("--gt", eval_gt, "Ground-truth pose files")->required();
    evaluate->add_option("--foot-joints", foot_joints,
                         "Joint indices for foot skating (default: names containing "
                         "toe/ankle)");
    evaluate->add_option("--report", eval_report, "Write the structured report here");

    // stats
    auto* stats = app.add_subcommand("stats", "Summarize a directory of sequence manifests");
    std::string manifest_dir, stats_json;
    stats->add_option("--manifests", manifest_dir, "Directory of manifest .json files")
        ->required();
    stats->add_option("--json", stats_json, "Write the counts as JSON here");

    // selftest
    auto* selftest = app.add_subcommand("selftest", "Run built-in analytic fixtures");
    bool bench = false;
    selftest->add_flag("--bench", bench, "Also measure voxelize throughput");

    CLI11_PARSE(app, argc, argv);

    try {
        echo_config(cfg);
        if (*synth) {
            return run_synth(cfg, frames_dir, out_path, eps_log, refractory_ns, jitter, seed);
        }
        if (*vox) {
            return run_voxelize(cfg, events_path, vox_out, raw, t_begin, t_end,
                                tb->count() > 0, te->count() > 0);
        }
        if (*maskgen) {
            return run_maskgen(cfg, mesh_path, poses_path, intrinsics, mask_out_dir,
                               mask_prefix);
        }
        if (*segment) {
            return run_segment(cfg, voxels_path, mask_paths, pred_paths, seg_out, seg_report,
                               renormalize);
        }
        if (*evaluate) {
            return run_evaluate(cfg, eval_pred, eval_gt, foot_joints, eval_report,
                                up_opt->count() > 0);
        }
        if (*stats) return run_stats(manifest_dir, stats_json);
        if (*selftest) return run_selftest(bench);
    } catch (const evkit::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 0;
}
