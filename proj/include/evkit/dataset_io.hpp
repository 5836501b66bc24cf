#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evkit/errors.hpp"
#include "evkit/event_core.hpp"
#include "evkit/mask_gen.hpp"
#include "evkit/motion_seg.hpp"
#include "evkit/pose_metrics.hpp"
#include "evkit/voxelizer.hpp"

namespace evkit {

enum class Split { Train, Test };

std::string to_string(Split split);
Split split_from_string(const std::string& name);

struct SequenceManifest {
    std::string sequence_id;
    Split split = Split::Train;
    std::uint64_t frame_count = 0;
    double fps = 0.0;
    // All paths are relative to the dataset root.
    std::string events_path;
    std::string masks_path;
    std::string poses_path;
    std::string meshes_path;
};

struct DatasetStats {
    std::uint64_t n_sequences = 0;
    std::uint64_t n_frames = 0;
    std::uint64_t n_train = 0;
    std::uint64_t n_test = 0;

    bool operator==(const DatasetStats&) const = default;
};

DatasetStats dataset_stats(std::span<const SequenceManifest> manifests);

// EVT1 container: 16-byte header (magic "EVT1", u16 width, u16 height,
// u64 event count), then fixed 16-byte records (u16 x, u16 y, i64 t, i8 p,
// 3 zero pad bytes). Everything little-endian. The file stores no validity
// window; the reader derives [t_first, t_last + 1), or [0, 0) when empty.
EventStream read_events(const std::filesystem::path& path);
void write_events(const std::filesystem::path& path, const EventStream& stream);

// Raw little-endian float32 payload in [T][B][H][W] order; shape and flags
// live in a JSON sidecar at <path>.json.
VoxelGrid read_voxel_grid(const std::filesystem::path& path);
void write_voxel_grid(const std::filesystem::path& path, const VoxelGrid& grid);

// Binary masks as plain PBM (P1); soft masks as plain PGM (P2) with maxval
// 65535 (values quantized to v/65535).
BinaryMask read_binary_mask(const std::filesystem::path& path);
SoftMask read_soft_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);
void write_mask(const std::filesystem::path& path, const SoftMask& mask);

struct GrayFrame {
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<float> values; // row-major, in [0,1]
};

// ITU-R BT.601 luma weights 0.299/0.587/0.114.
double rgb_to_gray(double r, double g, double b);

// PGM (P2/P5) read directly, PPM (P3/P6) converted through rgb_to_gray;
// samples are scaled by the file's maxval into [0,1].
GrayFrame read_gray_frame(const std::filesystem::path& path);

// Minimal OBJ subset: comments, `v x y z`, and `f i j k` with plain 1-based
// indices. Anything else is rejected.
TriangleMesh read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh);

struct PoseFile {
    double fps = 0.0;
    UpAxis up_axis = UpAxis::Z;
    std::optional<JointTrajectory> joints;
    std::optional<HeadPoseSequence> head;
};

// JSON with required "units": "mm" and "fps" fields; joint positions as a
// T x J x 3 array, head rotations as row-major 9-vectors.
PoseFile read_poses(const std::filesystem::path& path);
void write_poses(const std::filesystem::path& path, const PoseFile& poses);

SequenceManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const SequenceManifest& manifest);

// Key-value text record with headers O_head, T_head, MPJPE, Accel, FS.
std::string format_report_text(const MetricReport& report);

// JSON report: aggregate metrics plus an optional per-sequence breakdown.
void write_report(const std::filesystem::path& path, const MetricReport& aggregate,
                  std::span<const std::pair<std::string, MetricReport>> per_sequence = {});

std::string read_file(const std::filesystem::path& path);

// Canonical writers go through this: temp file in the same directory, then
// rename, so readers never observe partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

} // namespace evkit
