#include "evkit/dataset_io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian and read by memcpy");

namespace evkit {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(e.what(), e.byte > 0 ? e.byte - 1 : 0);
    } catch (const json::exception& e) {
        // e.g. number overflow, which the parser reports as out_of_range
        throw FormatError(e.what(), 0);
    }
}

const json& json_field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw FormatError(std::string("missing field '") + key + "'", 0);
    }
    return j.at(key);
}

double json_number(const json& j, const char* key) {
    const json& v = json_field(j, key);
    if (!v.is_number()) throw FormatError(std::string("field '") + key + "' is not a number", 0);
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw FormatError(std::string("field '") + key + "' is not finite", 0);
    }
    return d;
}

std::uint64_t json_count(const json& j, const char* key) {
    const json& v = json_field(j, key);
    if (!v.is_number_unsigned()) {
        throw FormatError(std::string("field '") + key + "' is not a non-negative integer", 0);
    }
    return v.get<std::uint64_t>();
}

bool json_bool(const json& j, const char* key) {
    const json& v = json_field(j, key);
    if (!v.is_boolean()) throw FormatError(std::string("field '") + key + "' is not a bool", 0);
    return v.get<bool>();
}

std::string json_string(const json& j, const char* key) {
    const json& v = json_field(j, key);
    if (!v.is_string()) throw FormatError(std::string("field '") + key + "' is not a string", 0);
    return v.get<std::string>();
}

double json_element(const json& v, const char* what) {
    if (!v.is_number()) throw FormatError(std::string(what) + " is not a number", 0);
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw FormatError(std::string(what) + " is not finite", 0);
    return d;
}

void dump_canonical(const std::filesystem::path& path, const json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

// ---- little-endian scalar packing ----------------------------------------

template <typename T>
void append_le(std::string& out, T value) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    out.append(bytes, sizeof(T));
}

template <typename T>
T read_le(std::string_view data, std::size_t offset) {
    T value;
    std::memcpy(&value, data.data() + offset, sizeof(T));
    return value;
}

// ---- PNM text scanning -----------------------------------------------------

struct TextCursor {
    std::string_view data;
    std::size_t pos = 0;

    bool at_end() const { return pos >= data.size(); }

    void skip_space() {
        while (pos < data.size()) {
            const char c = data[pos];
            if (c == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    std::string_view token() {
        skip_space();
        if (at_end()) throw FormatError("unexpected end of file", data.size());
        const std::size_t start = pos;
        while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])) &&
               data[pos] != '#') {
            ++pos;
        }
        return data.substr(start, pos - start);
    }

    std::uint64_t number(std::uint64_t max_value, const char* what) {
        skip_space();
        const std::size_t start = pos;
        const std::string_view tok = token();
        std::uint64_t value = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || value > max_value) {
            throw FormatError(std::string("bad ") + what, start);
        }
        return value;
    }
};

void expect_no_trailing(TextCursor& cur) {
    cur.skip_space();
    if (!cur.at_end()) throw FormatError("trailing data", cur.pos);
}

std::string pnm_header(const char* magic, std::uint16_t width, std::uint16_t height) {
    std::string out = magic;
    out += '\n';
    out += std::to_string(width) + " " + std::to_string(height) + "\n";
    return out;
}

// ---- paths ----------------------------------------------------------------

void check_relative(const std::string& p, const char* key) {
    if (p.empty()) throw ValidationError(std::string(key) + " path is empty");
    if (std::filesystem::path(p).is_absolute()) {
        throw ValidationError(std::string(key) + " path must be relative: " + p);
    }
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json metric_json(const MetricReport& r) {
    json j;
    j["O_head"] = r.o_head;
    j["T_head"] = r.t_head_mm;
    j["MPJPE"] = r.mpjpe_mm;
    j["Accel"] = r.accel_mm_s2;
    j["FS"] = r.fs_mm;
    j["per_frame"] = {{"O_head", r.o_head_per_frame},
                      {"T_head", r.t_head_mm_per_frame},
                      {"MPJPE", r.mpjpe_mm_per_frame},
                      {"Accel", r.accel_mm_s2_per_frame},
                      {"FS_step_sums", r.fs_mm_per_step}};
    j["counts"] = {{"frames", r.n_frames},
                   {"joints", r.n_joints},
                   {"accel_terms", r.n_accel_terms},
                   {"fs_qualifying", r.n_fs_qualifying}};
    return j;
}

} // namespace

// ---- whole files -----------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw IoError("not a readable file: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string data;
    in.seekg(0, std::ios::end);
    data.resize(std::size_t(in.tellg()));
    in.seekg(0);
    in.read(data.data(), std::streamsize(data.size()));
    if (!in) throw IoError("cannot read " + path.string());
    return data;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create " + tmp.string());
        out.write(bytes.data(), std::streamsize(bytes.size()));
        if (!out) throw IoError("cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                          ec.message());
}

// ---- EVT1 events -----------------------------------------------------------

namespace {
constexpr std::size_t kEvtHeader = 16;
constexpr std::size_t kEvtRecord = 16;
} // namespace

EventStream read_events(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    if (data.size() < kEvtHeader) throw FormatError("truncated header", data.size());
    if (data.compare(0, 4, "EVT1") != 0) throw FormatError("bad magic", 0);

    EventStream stream;
    stream.width = read_le<std::uint16_t>(data, 4);
    stream.height = read_le<std::uint16_t>(data, 6);
    const std::uint64_t count = read_le<std::uint64_t>(data, 8);
    if ((data.size() - kEvtHeader) / kEvtRecord != count ||
        (data.size() - kEvtHeader) % kEvtRecord != 0) {
        throw FormatError("payload size does not match event count " + std::to_string(count),
                          8);
    }

    stream.events.resize(count);
    std::int64_t prev_t = std::numeric_limits<std::int64_t>::min();
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::size_t base = kEvtHeader + i * kEvtRecord;
        Event& e = stream.events[i];
        e.x = read_le<std::uint16_t>(data, base);
        e.y = read_le<std::uint16_t>(data, base + 2);
        e.t = read_le<std::int64_t>(data, base + 4);
        e.p = read_le<std::int8_t>(data, base + 12);
        for (std::size_t k = 13; k < 16; ++k) {
            if (data[base + k] != 0) throw FormatError("nonzero padding", base + k);
        }
        if (e.x >= stream.width) throw FormatError("x out of bounds", base);
        if (e.y >= stream.height) throw FormatError("y out of bounds", base + 2);
        if (e.t < 0 || e.t == std::numeric_limits<std::int64_t>::max()) {
            throw FormatError("timestamp out of range", base + 4);
        }
        if (e.p != 1 && e.p != -1) throw FormatError("polarity not in {-1,+1}", base + 12);
        if (e.t < prev_t) throw FormatError("events not sorted", base + 4);
        prev_t = e.t;
    }
    if (stream.events.empty()) {
        stream.t_begin = 0;
        stream.t_end = 0;
    } else {
        stream.t_begin = stream.events.front().t;
        stream.t_end = stream.events.back().t + 1;
    }
    return stream;
}

void write_events(const std::filesystem::path& path, const EventStream& stream) {
    const ValidationReport report = validate_stream(stream);
    if (!report.ok) throw ValidationError("invalid stream: " + report.violations[0].message);
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        if (stream.events[i].t < 0) {
            throw ValidationError("negative timestamp at index " + std::to_string(i));
        }
    }

    std::string out;
    out.reserve(kEvtHeader + stream.events.size() * kEvtRecord);
    out += "EVT1";
    append_le(out, stream.width);
    append_le(out, stream.height);
    append_le(out, std::uint64_t(stream.events.size()));
    for (const Event& e : stream.events) {
        append_le(out, e.x);
        append_le(out, e.y);
        append_le(out, e.t);
        append_le(out, e.p);
        out.append(3, '\0');
    }
    write_file_atomic(path, out);
}

// ---- voxel grids -----------------------------------------------------------

VoxelGrid read_voxel_grid(const std::filesystem::path& path) {
    std::filesystem::path sidecar = path;
    sidecar += ".json";
    const json j = parse_json(read_file(sidecar));

    VoxelGrid grid;
    grid.frames = json_count(j, "t");
    grid.bins = json_count(j, "b");
    const std::uint64_t h = json_count(j, "h");
    const std::uint64_t w = json_count(j, "w");
    if (h > 65535 || w > 65535) throw FormatError("grid dimensions exceed 65535", 0);
    grid.height = std::size_t(h);
    grid.width = std::size_t(w);
    const std::uint64_t fps = json_count(j, "fps");
    if (fps == 0 || fps > std::numeric_limits<std::uint32_t>::max()) {
        throw FormatError("bad fps", 0);
    }
    grid.fps = std::uint32_t(fps);
    if (grid.bins == 0) throw FormatError("bins must be >= 1", 0);
    grid.normalized = json_bool(j, "normalized");
    grid.mask_applied = json_bool(j, "mask_applied");
    const json& prov = json_field(j, "provenance");
    if (!prov.is_array()) throw FormatError("field 'provenance' is not an array", 0);
    for (const json& entry : prov) {
        if (!entry.is_string()) throw FormatError("provenance entry is not a string", 0);
        grid.provenance.push_back(entry.get<std::string>());
    }

    const unsigned __int128 cells = (unsigned __int128)grid.frames * grid.bins * grid.height *
                                    (unsigned __int128)grid.width;
    if (cells > (std::size_t(1) << 40)) throw FormatError("grid implausibly large", 0);

    const std::string payload = read_file(path);
    if (payload.size() != std::size_t(cells) * 4) {
        throw FormatError("payload holds " + std::to_string(payload.size() / 4) +
                              " floats, header declares " +
                              std::to_string(std::uint64_t(cells)),
                          payload.size());
    }
    grid.values.resize(std::size_t(cells));
    std::memcpy(grid.values.data(), payload.data(), payload.size());

    if (grid.normalized) {
        for (float v : grid.values) {
            if (!(v >= 0.0f && v <= 1.0f)) {
                throw ValidationError("normalized grid has value outside [0,1]");
            }
        }
    }
    return grid;
}

void write_voxel_grid(const std::filesystem::path& path, const VoxelGrid& grid) {
    if (grid.values.size() != grid.frames * grid.frame_size()) {
        throw ShapeError("grid value count does not match declared shape");
    }
    if (grid.bins == 0 || grid.fps == 0) throw InvalidArgument("bins and fps must be >= 1");
    if (grid.height > 65535 || grid.width > 65535) {
        throw InvalidArgument("grid dimensions exceed 65535");
    }

    std::string payload(grid.values.size() * 4, '\0');
    std::memcpy(payload.data(), grid.values.data(), payload.size());

    json j;
    j["t"] = grid.frames;
    j["b"] = grid.bins;
    j["h"] = grid.height;
    j["w"] = grid.width;
    j["fps"] = grid.fps;
    j["normalized"] = grid.normalized;
    j["mask_applied"] = grid.mask_applied;
    j["provenance"] = grid.provenance;

    write_file_atomic(path, payload);
    std::filesystem::path sidecar = path;
    sidecar += ".json";
    dump_canonical(sidecar, j);
}

// ---- masks and frames -------------------------------------------------------

BinaryMask read_binary_mask(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    TextCursor cur{data};
    if (cur.token() != "P1") throw FormatError("expected plain PBM magic P1", 0);
    const auto width = std::uint16_t(cur.number(65535, "width"));
    const auto height = std::uint16_t(cur.number(65535, "height"));

    BinaryMask mask = make_empty_mask(width, height);
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        cur.skip_space();
        if (cur.at_end()) throw FormatError("unexpected end of file", data.size());
        const char c = data[cur.pos];
        if (c != '0' && c != '1') throw FormatError("pixel is not 0 or 1", cur.pos);
        mask.values[i] = std::uint8_t(c - '0');
        ++cur.pos;
    }
    expect_no_trailing(cur);
    return mask;
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
    if (mask.values.size() != std::size_t(mask.width) * mask.height) {
        throw ShapeError("mask size does not match width*height");
    }
    std::string out = pnm_header("P1", mask.width, mask.height);
    for (std::size_t y = 0; y < mask.height; ++y) {
        for (std::size_t x = 0; x < mask.width; ++x) {
            if (mask.at(y, x) > 1) throw ValidationError("binary mask value not 0/1");
            out += char('0' + mask.at(y, x));
            out += x + 1 < mask.width ? ' ' : '\n';
        }
    }
    write_file_atomic(path, out);
}

SoftMask read_soft_mask(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    TextCursor cur{data};
    if (cur.token() != "P2") throw FormatError("expected plain PGM magic P2", 0);
    const auto width = std::uint16_t(cur.number(65535, "width"));
    const auto height = std::uint16_t(cur.number(65535, "height"));
    const std::uint64_t maxval = cur.number(65535, "maxval");
    if (maxval == 0) throw FormatError("maxval must be >= 1", cur.pos);

    SoftMask mask;
    mask.width = width;
    mask.height = height;
    mask.values.resize(std::size_t(width) * height);
    for (float& v : mask.values) {
        v = float(double(cur.number(maxval, "sample")) / double(maxval));
    }
    expect_no_trailing(cur);
    return mask;
}

void write_mask(const std::filesystem::path& path, const SoftMask& mask) {
    if (mask.values.size() != std::size_t(mask.width) * mask.height) {
        throw ShapeError("mask size does not match width*height");
    }
    std::string out = pnm_header("P2", mask.width, mask.height);
    out += "65535\n";
    for (std::size_t y = 0; y < mask.height; ++y) {
        for (std::size_t x = 0; x < mask.width; ++x) {
            const float v = mask.at(y, x);
            if (!(v >= 0.0f && v <= 1.0f)) throw ValidationError("soft mask value outside [0,1]");
            out += std::to_string(std::llround(double(v) * 65535.0));
            out += x + 1 < mask.width ? ' ' : '\n';
        }
    }
    write_file_atomic(path, out);
}

double rgb_to_gray(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

GrayFrame read_gray_frame(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    TextCursor cur{data};
    const std::string magic(cur.token());
    const bool color = magic == "P3" || magic == "P6";
    const bool binary = magic == "P5" || magic == "P6";
    if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
        throw FormatError("expected PGM/PPM magic (P2, P3, P5, P6)", 0);
    }
    const auto width = std::uint16_t(cur.number(65535, "width"));
    const auto height = std::uint16_t(cur.number(65535, "height"));
    const std::uint64_t maxval = cur.number(65535, "maxval");
    if (maxval == 0) throw FormatError("maxval must be >= 1", cur.pos);

    GrayFrame frame;
    frame.width = width;
    frame.height = height;
    const std::size_t pixels = std::size_t(width) * height;
    frame.values.resize(pixels);
    const std::size_t channels = color ? 3 : 1;

    if (binary) {
        // Single whitespace byte separates the header from the raster.
        if (cur.at_end() || !std::isspace(static_cast<unsigned char>(data[cur.pos]))) {
            throw FormatError("missing raster separator", cur.pos);
        }
        ++cur.pos;
        const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
        const std::size_t need = pixels * channels * sample_bytes;
        if (data.size() - cur.pos != need) {
            throw FormatError("raster holds " + std::to_string(data.size() - cur.pos) +
                                  " bytes, expected " + std::to_string(need),
                              data.size());
        }
        auto sample = [&](std::size_t i) -> std::uint64_t {
            const std::size_t at = cur.pos + i * sample_bytes;
            const auto hi = std::uint8_t(data[at]);
            const std::uint64_t s =
                sample_bytes == 1 ? hi
                                  : (std::uint64_t(hi) << 8) | std::uint8_t(data[at + 1]);
            if (s > maxval) throw FormatError("sample exceeds maxval", at);
            return s;
        };
        for (std::size_t i = 0; i < pixels; ++i) {
            double v;
            if (color) {
                v = rgb_to_gray(double(sample(3 * i)), double(sample(3 * i + 1)),
                                double(sample(3 * i + 2)));
            } else {
                v = double(sample(i));
            }
            frame.values[i] = float(v / double(maxval));
        }
    } else {
        for (std::size_t i = 0; i < pixels; ++i) {
            double v;
            if (color) {
                const double r = double(cur.number(maxval, "sample"));
                const double g = double(cur.number(maxval, "sample"));
                const double b = double(cur.number(maxval, "sample"));
                v = rgb_to_gray(r, g, b);
            } else {
                v = double(cur.number(maxval, "sample"));
            }
            frame.values[i] = float(v / double(maxval));
        }
        expect_no_trailing(cur);
    }
    return frame;
}

// ---- meshes ------------------------------------------------------------------

TriangleMesh read_mesh(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    TriangleMesh mesh;

    std::size_t line_start = 0;
    while (line_start < data.size()) {
        std::size_t line_end = data.find('\n', line_start);
        if (line_end == std::string::npos) line_end = data.size();
        std::string_view line(data.data() + line_start, line_end - line_start);
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }

        TextCursor cur{line};
        cur.skip_space();
        if (!cur.at_end()) {
            const std::size_t tag_at = line_start + cur.pos;
            const std::string_view tag = cur.token();
            if (tag == "v") {
                Vec3 v;
                for (double* coord : {&v.x, &v.y, &v.z}) {
                    cur.skip_space();
                    const std::size_t at = line_start + cur.pos;
                    const std::string_view tok = cur.token();
                    const auto [ptr, ec] =
                        std::from_chars(tok.data(), tok.data() + tok.size(), *coord);
                    if (ec != std::errc() || ptr != tok.data() + tok.size() ||
                        !std::isfinite(*coord)) {
                        throw FormatError("bad vertex coordinate", at);
                    }
                }
                cur.skip_space();
                if (!cur.at_end()) throw FormatError("vertex line has extra fields",
                                                     line_start + cur.pos);
                mesh.vertices.push_back(v);
            } else if (tag == "f") {
                std::array<std::uint32_t, 3> face{};
                for (std::uint32_t& idx : face) {
                    cur.skip_space();
                    const std::size_t at = line_start + cur.pos;
                    const std::string_view tok = cur.token();
                    std::uint64_t value = 0;
                    const auto [ptr, ec] =
                        std::from_chars(tok.data(), tok.data() + tok.size(), value);
                    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                        throw FormatError("face index is not a plain integer", at);
                    }
                    if (value == 0 || value > 0xFFFFFFFFull) {
                        throw FormatError("face index out of range (1-based)", at);
                    }
                    idx = std::uint32_t(value - 1);
                }
                cur.skip_space();
                if (!cur.at_end()) throw FormatError("face line has extra fields",
                                                     line_start + cur.pos);
                mesh.faces.push_back(face);
            } else {
                throw FormatError("unsupported element '" + std::string(tag) + "'", tag_at);
            }
        }
        line_start = line_end + 1;
    }

    for (const auto& f : mesh.faces) {
        for (std::uint32_t idx : f) {
            if (idx >= mesh.vertices.size()) {
                throw FormatError("face references vertex " + std::to_string(idx + 1) +
                                      " of " + std::to_string(mesh.vertices.size()),
                                  0);
            }
        }
    }
    return mesh;
}

void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh) {
    for (const auto& f : mesh.faces) {
        for (std::uint32_t idx : f) {
            if (idx >= mesh.vertices.size()) {
                throw ShapeError("face references vertex " + std::to_string(idx) +
                                 " but mesh has " + std::to_string(mesh.vertices.size()));
            }
        }
    }
    std::string out;
    for (const Vec3& v : mesh.vertices) {
        out += "v " + fmt_double(v.x) + " " + fmt_double(v.y) + " " + fmt_double(v.z) + "\n";
    }
    for (const auto& f : mesh.faces) {
        out += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " +
               std::to_string(f[2] + 1) + "\n";
    }
    write_file_atomic(path, out);
}

// ---- poses ---------------------------------------------------------------------

PoseFile read_poses(const std::filesystem::path& path) {
    const json j = parse_json(read_file(path));
    PoseFile file;
    if (json_string(j, "units") != "mm") throw FormatError("units must be \"mm\"", 0);
    file.fps = json_number(j, "fps");
    if (!(file.fps > 0.0)) throw FormatError("fps must be > 0", 0);
    if (j.contains("up_axis")) {
        const std::string axis = json_string(j, "up_axis");
        if (axis != "y" && axis != "z") throw FormatError("up_axis must be \"y\" or \"z\"", 0);
        file.up_axis = axis == "y" ? UpAxis::Y : UpAxis::Z;
    }

    if (j.contains("joints")) {
        const json& arr = json_field(j, "joints");
        if (!arr.is_array() || arr.empty()) {
            throw FormatError("joints must be a non-empty T x J x 3 array", 0);
        }
        JointTrajectory traj;
        traj.fps = file.fps;
        traj.up_axis = file.up_axis;
        for (const json& frame : arr) {
            if (!frame.is_array() || frame.empty()) {
                throw FormatError("joints frame is not a non-empty array", 0);
            }
            if (traj.joints == 0) traj.joints = frame.size();
            if (frame.size() != traj.joints) {
                throw FormatError("ragged joints array", 0);
            }
            for (const json& p : frame) {
                if (!p.is_array() || p.size() != 3) {
                    throw FormatError("joint position is not a 3-vector", 0);
                }
                traj.positions.push_back({json_element(p[0], "joint coordinate"),
                                          json_element(p[1], "joint coordinate"),
                                          json_element(p[2], "joint coordinate")});
            }
        }
        if (j.contains("joint_names")) {
            const json& names = json_field(j, "joint_names");
            if (!names.is_array() || names.size() != traj.joints) {
                throw FormatError("joint_names must list one name per joint", 0);
            }
            for (const json& n : names) {
                if (!n.is_string()) throw FormatError("joint name is not a string", 0);
                traj.joint_names.push_back(n.get<std::string>());
            }
        }
        file.joints = std::move(traj);
    }

    if (j.contains("head")) {
        const json& head = json_field(j, "head");
        const json& rots = json_field(head, "rotations");
        const json& trans = json_field(head, "translations");
        if (!rots.is_array() || !trans.is_array() || rots.size() != trans.size() ||
            rots.empty()) {
            throw FormatError("head rotations/translations must be equal-length arrays", 0);
        }
        HeadPoseSequence seq;
        for (std::size_t t = 0; t < rots.size(); ++t) {
            const json& r = rots[t];
            if (!r.is_array() || r.size() != 9) {
                throw FormatError("head rotation is not a 9-vector", 0);
            }
            Mat3 m;
            for (std::size_t i = 0; i < 9; ++i) m.m[i] = json_element(r[i], "rotation entry");
            if (!is_rotation(m)) {
                throw ValidationError("non-orthonormal head rotation at frame " +
                                      std::to_string(t));
            }
            const json& tr = trans[t];
            if (!tr.is_array() || tr.size() != 3) {
                throw FormatError("head translation is not a 3-vector", 0);
            }
            seq.rotations.push_back(m);
            seq.translations.push_back({json_element(tr[0], "translation entry"),
                                        json_element(tr[1], "translation entry"),
                                        json_element(tr[2], "translation entry")});
        }
        file.head = std::move(seq);
    }

    if (!file.joints && !file.head) {
        throw FormatError("pose file has neither joints nor head", 0);
    }
    return file;
}

void write_poses(const std::filesystem::path& path, const PoseFile& poses) {
    if (!(poses.fps > 0.0)) throw InvalidArgument("fps must be > 0");
    if (!poses.joints && !poses.head) throw InvalidArgument("nothing to write");

    json j;
    j["units"] = "mm";
    j["fps"] = poses.fps;
    j["up_axis"] = to_string(poses.up_axis);

    if (poses.joints) {
        const JointTrajectory& traj = *poses.joints;
        if (traj.fps != poses.fps || traj.up_axis != poses.up_axis) {
            throw InvalidArgument("trajectory fps/up_axis disagree with file fields");
        }
        if (traj.joints == 0 || traj.positions.size() % traj.joints != 0 ||
            traj.positions.empty()) {
            throw ShapeError("trajectory positions are not a whole number of frames");
        }
        json frames = json::array();
        for (std::size_t t = 0; t < traj.frames(); ++t) {
            json frame = json::array();
            for (std::size_t jj = 0; jj < traj.joints; ++jj) {
                const Vec3& p = traj.at(t, jj);
                frame.push_back({p.x, p.y, p.z});
            }
            frames.push_back(std::move(frame));
        }
        j["joints"] = std::move(frames);
        if (!traj.joint_names.empty()) {
            if (traj.joint_names.size() != traj.joints) {
                throw ShapeError("joint name count does not match joint count");
            }
            j["joint_names"] = traj.joint_names;
        }
    }

    if (poses.head) {
        const HeadPoseSequence& seq = *poses.head;
        if (seq.rotations.size() != seq.translations.size() || seq.rotations.empty()) {
            throw ShapeError("head rotations/translations must be equal-length and non-empty");
        }
        json rots = json::array();
        json trans = json::array();
        for (std::size_t t = 0; t < seq.frames(); ++t) {
            if (!is_rotation(seq.rotations[t])) {
                throw ValidationError("non-orthonormal head rotation at frame " +
                                      std::to_string(t));
            }
            rots.push_back(seq.rotations[t].m);
            trans.push_back({seq.translations[t].x, seq.translations[t].y,
                             seq.translations[t].z});
        }
        j["head"] = {{"rotations", std::move(rots)}, {"translations", std::move(trans)}};
    }
    dump_canonical(path, j);
}

// ---- manifests and stats ---------------------------------------------------------

std::string to_string(Split split) { return split == Split::Train ? "train" : "test"; }

Split split_from_string(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "test") return Split::Test;
    throw InvalidArgument("unknown split '" + name + "' (expected train or test)");
}

SequenceManifest read_manifest(const std::filesystem::path& path) {
    const json j = parse_json(read_file(path));
    SequenceManifest m;
    m.sequence_id = json_string(j, "sequence_id");
    if (m.sequence_id.empty()) throw FormatError("sequence_id is empty", 0);
    const std::string split = json_string(j, "split");
    if (split != "train" && split != "test") {
        throw FormatError("split must be \"train\" or \"test\"", 0);
    }
    m.split = split == "train" ? Split::Train : Split::Test;
    m.frame_count = json_count(j, "frame_count");
    if (m.frame_count == 0) throw FormatError("frame_count must be > 0", 0);
    m.fps = json_number(j, "fps");
    if (!(m.fps > 0.0)) throw FormatError("fps must be > 0", 0);
    m.events_path = json_string(j, "events");
    m.masks_path = json_string(j, "masks");
    m.poses_path = json_string(j, "poses");
    m.meshes_path = json_string(j, "meshes");
    check_relative(m.events_path, "events");
    check_relative(m.masks_path, "masks");
    check_relative(m.poses_path, "poses");
    check_relative(m.meshes_path, "meshes");
    return m;
}

void write_manifest(const std::filesystem::path& path, const SequenceManifest& manifest) {
    if (manifest.sequence_id.empty()) throw InvalidArgument("sequence_id is empty");
    if (manifest.frame_count == 0) throw InvalidArgument("frame_count must be > 0");
    if (!(manifest.fps > 0.0)) throw InvalidArgument("fps must be > 0");
    check_relative(manifest.events_path, "events");
    check_relative(manifest.masks_path, "masks");
    check_relative(manifest.poses_path, "poses");
    check_relative(manifest.meshes_path, "meshes");

    json j;
    j["sequence_id"] = manifest.sequence_id;
    j["split"] = to_string(manifest.split);
    j["frame_count"] = manifest.frame_count;
    j["fps"] = manifest.fps;
    j["events"] = manifest.events_path;
    j["masks"] = manifest.masks_path;
    j["poses"] = manifest.poses_path;
    j["meshes"] = manifest.meshes_path;
    dump_canonical(path, j);
}

DatasetStats dataset_stats(std::span<const SequenceManifest> manifests) {
    DatasetStats stats;
    std::unordered_set<std::string> ids;
    for (const SequenceManifest& m : manifests) {
        if (!ids.insert(m.sequence_id).second) {
            throw ValidationError("duplicate sequence id '" + m.sequence_id + "'");
        }
        if (m.frame_count == 0) {
            throw ValidationError("sequence '" + m.sequence_id + "' has zero frames");
        }
        ++stats.n_sequences;
        stats.n_frames += m.frame_count;
        if (m.split == Split::Train) {
            ++stats.n_train;
        } else {
            ++stats.n_test;
        }
    }
    return stats;
}

// ---- reports -----------------------------------------------------------------------

std::string format_report_text(const MetricReport& report) {
    auto line = [](const char* key, double value, const char* unit) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s: %.9g%s\n", key, value, unit);
        return std::string(buf);
    };
    std::string out;
    out += line("O_head", report.o_head, "");
    out += line("T_head", report.t_head_mm, " mm");
    out += line("MPJPE", report.mpjpe_mm, " mm");
    out += line("Accel", report.accel_mm_s2, " mm/s^2");
    out += line("FS", report.fs_mm, " mm");
    return out;
}

void write_report(const std::filesystem::path& path, const MetricReport& aggregate,
                  std::span<const std::pair<std::string, MetricReport>> per_sequence) {
    json j;
    j["schema"] = "evkit-report-v1";
    j["aggregate"] = metric_json(aggregate);
    if (!per_sequence.empty()) {
        json seqs = json::array();
        for (const auto& [id, report] : per_sequence) {
            json entry = metric_json(report);
            entry["id"] = id;
            seqs.push_back(std::move(entry));
        }
        j["sequences"] = std::move(seqs);
    }
    dump_canonical(path, j);
}

} // namespace evkit
