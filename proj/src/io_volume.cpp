#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <zlib.h>

#include "segrad/io.hpp"

namespace segrad {

namespace fs = std::filesystem;

std::string to_string(ElementType t) {
    switch (t) {
        case ElementType::Int8: return "int8";
        case ElementType::UInt8: return "uint8";
        case ElementType::Int16: return "int16";
        case ElementType::UInt16: return "uint16";
        case ElementType::Int32: return "int32";
        case ElementType::Float32: return "float";
        case ElementType::Float64: return "double";
    }
    return "unknown";
}

namespace {

std::size_t element_size(ElementType t) {
    switch (t) {
        case ElementType::Int8:
        case ElementType::UInt8: return 1;
        case ElementType::Int16:
        case ElementType::UInt16: return 2;
        case ElementType::Int32:
        case ElementType::Float32: return 4;
        case ElementType::Float64: return 8;
    }
    return 0;
}

std::string read_binary(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_binary(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

bool has_gzip_magic(const std::string& bytes, std::size_t offset = 0) {
    return bytes.size() >= offset + 2 && static_cast<unsigned char>(bytes[offset]) == 0x1f &&
           static_cast<unsigned char>(bytes[offset + 1]) == 0x8b;
}

std::string gunzip(const char* data, std::size_t size, const std::string& what) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 32) != Z_OK) throw Error(ErrorKind::Format, "zlib init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data));
    zs.avail_in = static_cast<uInt>(size);
    std::string out;
    char buffer[1 << 16];
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = reinterpret_cast<Bytef*>(buffer);
        zs.avail_out = sizeof(buffer);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            const auto consumed = zs.total_in;
            inflateEnd(&zs);
            throw Error(ErrorKind::Corruption, what + ": gzip stream damaged after " + std::to_string(consumed) +
                                                   " compressed bytes");
        }
        out.append(buffer, sizeof(buffer) - zs.avail_out);
        if (rc != Z_STREAM_END && zs.avail_in == 0) {
            const auto consumed = zs.total_in;
            inflateEnd(&zs);
            throw Error(ErrorKind::Corruption,
                        what + ": gzip stream truncated at compressed byte " + std::to_string(consumed));
        }
    }
    inflateEnd(&zs);
    return out;
}

std::string gzip_bytes(const std::string& raw) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw Error(ErrorKind::Io, "zlib init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
    zs.avail_in = static_cast<uInt>(raw.size());
    std::string out;
    char buffer[1 << 16];
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = reinterpret_cast<Bytef*>(buffer);
        zs.avail_out = sizeof(buffer);
        rc = deflate(&zs, Z_FINISH);
        if (rc == Z_STREAM_ERROR) {
            deflateEnd(&zs);
            throw Error(ErrorKind::Io, "gzip compression failed");
        }
        out.append(buffer, sizeof(buffer) - zs.avail_out);
    }
    deflateEnd(&zs);
    return out;
}

template <typename T>
T load(const char* p, bool swap) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    if (swap && sizeof(T) > 1) {
        char tmp[sizeof(T)];
        std::memcpy(tmp, &v, sizeof(T));
        std::reverse(tmp, tmp + sizeof(T));
        std::memcpy(&v, tmp, sizeof(T));
    }
    return v;
}

std::vector<double> decode_values(const std::string& payload, std::size_t offset, std::size_t count, ElementType type,
                                  bool swap, const std::string& what) {
    const std::size_t need = count * element_size(type);
    if (payload.size() < offset + need) {
        throw Error(ErrorKind::Corruption, what + ": payload truncated; expected " + std::to_string(need) +
                                               " bytes at offset " + std::to_string(offset) + ", found " +
                                               std::to_string(payload.size() > offset ? payload.size() - offset : 0));
    }
    std::vector<double> out(count);
    const char* p = payload.data() + offset;
    const std::size_t step = element_size(type);
    for (std::size_t i = 0; i < count; ++i, p += step) {
        switch (type) {
            case ElementType::Int8: out[i] = load<std::int8_t>(p, swap); break;
            case ElementType::UInt8: out[i] = load<std::uint8_t>(p, swap); break;
            case ElementType::Int16: out[i] = load<std::int16_t>(p, swap); break;
            case ElementType::UInt16: out[i] = load<std::uint16_t>(p, swap); break;
            case ElementType::Int32: out[i] = load<std::int32_t>(p, swap); break;
            case ElementType::Float32: out[i] = load<float>(p, swap); break;
            case ElementType::Float64: out[i] = load<double>(p, swap); break;
        }
    }
    return out;
}

template <typename T>
void store(std::string& out, double v) {
    T t;
    if constexpr (std::is_integral_v<T>) {
        const double r = std::round(v);
        const double lo = static_cast<double>(std::numeric_limits<T>::lowest());
        const double hi = static_cast<double>(std::numeric_limits<T>::max());
        if (r < lo || r > hi) throw Error(ErrorKind::InvalidInput, "value out of range for output element type");
        t = static_cast<T>(r);
    } else {
        t = static_cast<T>(v);
    }
    char buf[sizeof(T)];
    std::memcpy(buf, &t, sizeof(T));
    out.append(buf, sizeof(T));
}

std::string encode_values(std::span<const double> values, ElementType type) {
    static_assert(std::endian::native == std::endian::little, "writers assume a little-endian host");
    std::string out;
    out.reserve(values.size() * element_size(type));
    for (double v : values) {
        switch (type) {
            case ElementType::Int8: store<std::int8_t>(out, v); break;
            case ElementType::UInt8: store<std::uint8_t>(out, v); break;
            case ElementType::Int16: store<std::int16_t>(out, v); break;
            case ElementType::UInt16: store<std::uint16_t>(out, v); break;
            case ElementType::Int32: store<std::int32_t>(out, v); break;
            case ElementType::Float32: store<float>(out, v); break;
            case ElementType::Float64: store<double>(out, v); break;
        }
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

ElementType nrrd_type(const std::string& raw) {
    const std::string t = lower(raw);
    if (t == "signed char" || t == "int8" || t == "int8_t") return ElementType::Int8;
    if (t == "uchar" || t == "unsigned char" || t == "uint8" || t == "uint8_t") return ElementType::UInt8;
    if (t == "short" || t == "short int" || t == "signed short" || t == "signed short int" || t == "int16" ||
        t == "int16_t")
        return ElementType::Int16;
    if (t == "ushort" || t == "unsigned short" || t == "unsigned short int" || t == "uint16" || t == "uint16_t")
        return ElementType::UInt16;
    if (t == "int" || t == "signed int" || t == "int32" || t == "int32_t") return ElementType::Int32;
    if (t == "float") return ElementType::Float32;
    if (t == "double") return ElementType::Float64;
    throw Error(ErrorKind::Format, "unsupported NRRD type '" + raw + "'");
}

std::vector<std::vector<double>> parse_vectors(const std::string& s, const std::string& what) {
    std::vector<std::vector<double>> out;
    std::size_t pos = 0;
    while (true) {
        const auto open = s.find('(', pos);
        if (open == std::string::npos) break;
        const auto close = s.find(')', open);
        if (close == std::string::npos) throw Error(ErrorKind::Format, "unbalanced vector in " + what);
        std::vector<double> v;
        std::stringstream ss(s.substr(open + 1, close - open - 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                v.push_back(std::stod(trim(item)));
            } catch (const std::exception&) {
                throw Error(ErrorKind::Format, "bad number in " + what);
            }
        }
        out.push_back(std::move(v));
        pos = close + 1;
    }
    return out;
}

void set_axis_geometry(VolumeFileMeta& meta, const std::array<std::array<double, 3>, 3>& axes, const std::string& what) {
    for (int a = 0; a < 3; ++a) {
        for (int r = 0; r < 3; ++r) {
            if (r != a && std::abs(axes[a][r]) > 1e-6) {
                throw Error(ErrorKind::Geometry, what + ": oblique direction matrix is not supported");
            }
        }
        if (axes[a][a] == 0.0) throw Error(ErrorKind::Geometry, what + ": zero-length axis direction");
        meta.spacing[a] = std::abs(axes[a][a]);
        meta.direction[a] = axes[a][a] < 0 ? -1 : 1;
    }
}

LoadedVolume read_nrrd(const std::string& bytes, const fs::path& path) {
    const std::string what = path.string();
    const auto header_end = bytes.find("\n\n");
    const auto header_end_crlf = bytes.find("\r\n\r\n");
    std::size_t data_offset = 0;
    std::string header;
    if (header_end_crlf != std::string::npos && (header_end == std::string::npos || header_end_crlf < header_end)) {
        header = bytes.substr(0, header_end_crlf);
        data_offset = header_end_crlf + 4;
    } else if (header_end != std::string::npos) {
        header = bytes.substr(0, header_end);
        data_offset = header_end + 2;
    } else {
        throw Error(ErrorKind::Corruption, what + ": NRRD header not terminated by a blank line");
    }

    LoadedVolume result;
    VolumeFileMeta& meta = result.meta;
    meta.format = VolumeFormat::Nrrd;
    std::optional<int> dimension;
    std::optional<Index3> sizes;
    std::optional<ElementType> type;
    std::string encoding = "raw";
    bool big_endian = false;
    std::optional<std::array<std::array<double, 3>, 3>> directions;
    std::optional<Vec3> spacings;
    long byte_skip = 0;

    std::stringstream lines(header);
    std::string line;
    std::getline(lines, line);  // magic
    while (std::getline(lines, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.find(":=") != std::string::npos) continue;  // key/value pairs carry no geometry
        const auto colon = line.find(": ");
        if (colon == std::string::npos) throw Error(ErrorKind::Format, what + ": malformed header line '" + line + "'");
        const std::string key = lower(trim(line.substr(0, colon)));
        const std::string value = trim(line.substr(colon + 2));
        if (key == "dimension") {
            dimension = std::stoi(value);
        } else if (key == "type") {
            type = nrrd_type(value);
        } else if (key == "sizes") {
            std::stringstream ss(value);
            Index3 s{};
            for (auto& d : s) {
                long long v = 0;
                if (!(ss >> v) || v < 1) throw Error(ErrorKind::Format, what + ": bad sizes field");
                d = static_cast<std::size_t>(v);
            }
            sizes = s;
        } else if (key == "encoding") {
            encoding = lower(value);
        } else if (key == "endian") {
            big_endian = lower(value) == "big";
        } else if (key == "space directions") {
            auto vecs = parse_vectors(value, what + " space directions");
            if (vecs.size() != 3) throw Error(ErrorKind::Format, what + ": expected 3 space direction vectors");
            std::array<std::array<double, 3>, 3> axes{};
            for (int a = 0; a < 3; ++a) {
                if (vecs[a].size() != 3) throw Error(ErrorKind::Format, what + ": space directions must be 3-vectors");
                for (int r = 0; r < 3; ++r) axes[a][r] = vecs[a][r];
            }
            directions = axes;
        } else if (key == "space origin") {
            auto vecs = parse_vectors(value, what + " space origin");
            if (vecs.size() != 1 || vecs[0].size() != 3) throw Error(ErrorKind::Format, what + ": bad space origin");
            meta.origin = {vecs[0][0], vecs[0][1], vecs[0][2]};
        } else if (key == "spacings") {
            std::stringstream ss(value);
            Vec3 s{};
            for (double& d : s)
                if (!(ss >> d)) throw Error(ErrorKind::Format, what + ": bad spacings field");
            spacings = s;
        } else if (key == "byte skip") {
            byte_skip = std::stol(value);
        } else if (key == "data file" || key == "datafile") {
            throw Error(ErrorKind::Format, what + ": detached NRRD data files are not supported");
        } else if (key == "space dimension" && value != "3") {
            throw Error(ErrorKind::Format, what + ": only 3D space is supported");
        }
    }
    if (dimension != 3) throw Error(ErrorKind::Format, what + ": only 'dimension: 3' is supported");
    if (!sizes || !type) throw Error(ErrorKind::Format, what + ": NRRD header lacks sizes or type");
    meta.element_type = *type;

    if (directions) {
        set_axis_geometry(meta, *directions, what);
    } else if (spacings) {
        for (int a = 0; a < 3; ++a) {
            meta.spacing[a] = std::abs((*spacings)[a]);
            meta.direction[a] = (*spacings)[a] < 0 ? -1 : 1;
        }
    }

    std::string payload;
    std::size_t offset = 0;
    if (encoding == "raw") {
        payload = bytes;
        offset = data_offset;
    } else if (encoding == "gzip" || encoding == "gz") {
        meta.gzip = true;
        payload = gunzip(bytes.data() + data_offset, bytes.size() - data_offset, what);
    } else {
        throw Error(ErrorKind::Format, what + ": unsupported NRRD encoding '" + encoding + "'");
    }
    if (byte_skip > 0) offset += static_cast<std::size_t>(byte_skip);

    Grid3 grid;
    grid.dims = *sizes;
    grid.spacing = meta.spacing;
    grid.origin = meta.origin;
    grid.direction = meta.direction;
    const bool swap = big_endian != (std::endian::native == std::endian::big) && element_size(*type) > 1;
    std::size_t count = grid.voxel_count();
    if (byte_skip == -1) {
        const std::size_t need = count * element_size(*type);
        if (payload.size() < need) offset = payload.size();  // falls through to the truncation error
        else offset = payload.size() - need;
    }
    result.volume = ScalarVolume(grid, decode_values(payload, offset, count, *type, swap, what));
    return result;
}

// --- NIfTI-1 ----------------------------------------------------------------

constexpr std::size_t kNiftiHeaderSize = 348;

ElementType nifti_type(int code) {
    switch (code) {
        case 2: return ElementType::UInt8;
        case 4: return ElementType::Int16;
        case 8: return ElementType::Int32;
        case 16: return ElementType::Float32;
        case 64: return ElementType::Float64;
        case 256: return ElementType::Int8;
        case 512: return ElementType::UInt16;
        default: throw Error(ErrorKind::Format, "unsupported NIfTI datatype " + std::to_string(code));
    }
}

int nifti_code(ElementType t) {
    switch (t) {
        case ElementType::UInt8: return 2;
        case ElementType::Int16: return 4;
        case ElementType::Int32: return 8;
        case ElementType::Float32: return 16;
        case ElementType::Float64: return 64;
        case ElementType::Int8: return 256;
        case ElementType::UInt16: return 512;
    }
    return 0;
}

LoadedVolume read_nifti(const std::string& bytes, const fs::path& path) {
    const std::string what = path.string();
    if (bytes.size() < kNiftiHeaderSize)
        throw Error(ErrorKind::Corruption, what + ": NIfTI header truncated at byte " + std::to_string(bytes.size()));
    const char* h = bytes.data();
    bool swap = false;
    if (load<std::int32_t>(h, false) != 348) {
        if (load<std::int32_t>(h, true) != 348) throw Error(ErrorKind::Format, what + ": not a NIfTI-1 file");
        swap = true;
    }
    if (std::memcmp(h + 344, "n+1", 4) != 0) {
        throw Error(ErrorKind::Format, what + ": only single-file NIfTI-1 ('n+1') is supported");
    }

    std::array<std::int16_t, 8> dim{};
    for (int i = 0; i < 8; ++i) dim[i] = load<std::int16_t>(h + 40 + 2 * i, swap);
    if (dim[0] < 3 || dim[0] > 7) throw Error(ErrorKind::Format, what + ": NIfTI dim[0] must describe a 3D volume");
    for (int i = 4; i <= dim[0]; ++i)
        if (dim[i] > 1) throw Error(ErrorKind::Format, what + ": only 3D NIfTI volumes are supported");
    for (int i = 1; i <= 3; ++i)
        if (dim[i] < 1) throw Error(ErrorKind::Format, what + ": NIfTI dimensions must be positive");

    LoadedVolume result;
    VolumeFileMeta& meta = result.meta;
    meta.format = VolumeFormat::Nifti;
    meta.element_type = nifti_type(load<std::int16_t>(h + 70, swap));
    std::array<float, 8> pixdim{};
    for (int i = 0; i < 8; ++i) pixdim[i] = load<float>(h + 76 + 4 * i, swap);
    const auto vox_offset = static_cast<std::size_t>(load<float>(h + 108, swap));
    meta.scl_slope = load<float>(h + 112, swap);
    meta.scl_inter = load<float>(h + 116, swap);
    const auto qform_code = load<std::int16_t>(h + 252, swap);
    const auto sform_code = load<std::int16_t>(h + 254, swap);

    if (sform_code > 0) {
        std::array<std::array<double, 3>, 3> axes{};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) axes[c][r] = load<float>(h + 280 + 16 * r + 4 * c, swap);
            meta.origin[r] = load<float>(h + 280 + 16 * r + 12, swap);
        }
        set_axis_geometry(meta, axes, what);
    } else if (qform_code > 0) {
        const double b = load<float>(h + 256, swap);
        const double c = load<float>(h + 260, swap);
        const double d = load<float>(h + 264, swap);
        const double a = std::sqrt(std::max(0.0, 1.0 - (b * b + c * c + d * d)));
        const double qfac = pixdim[0] < 0 ? -1.0 : 1.0;
        const double rot[3][3] = {
            {a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
            {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
            {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b},
        };
        std::array<std::array<double, 3>, 3> axes{};
        for (int col = 0; col < 3; ++col) {
            const double scale = pixdim[col + 1] * (col == 2 ? qfac : 1.0);
            for (int r = 0; r < 3; ++r) axes[col][r] = rot[r][col] * scale;
        }
        set_axis_geometry(meta, axes, what);
        meta.origin = {load<float>(h + 268, swap), load<float>(h + 272, swap), load<float>(h + 276, swap)};
    } else {
        for (int a = 0; a < 3; ++a) meta.spacing[a] = std::abs(pixdim[a + 1]) > 0 ? std::abs(pixdim[a + 1]) : 1.0;
    }

    Grid3 grid;
    grid.dims = {static_cast<std::size_t>(dim[1]), static_cast<std::size_t>(dim[2]), static_cast<std::size_t>(dim[3])};
    grid.spacing = meta.spacing;
    grid.origin = meta.origin;
    grid.direction = meta.direction;
    std::vector<double> values =
        decode_values(bytes, std::max<std::size_t>(vox_offset, kNiftiHeaderSize), grid.voxel_count(),
                      meta.element_type, swap, what);
    if (meta.scl_slope != 0.0 && std::isfinite(meta.scl_slope) &&
        (meta.scl_slope != 1.0 || meta.scl_inter != 0.0)) {
        for (double& v : values) v = v * meta.scl_slope + meta.scl_inter;
    }
    result.volume = ScalarVolume(grid, std::move(values));
    return result;
}

}  // namespace

LoadedVolume read_volume_file(const fs::path& path) {
    std::string bytes = read_binary(path);
    bool gz = false;
    if (has_gzip_magic(bytes)) {
        bytes = gunzip(bytes.data(), bytes.size(), path.string());
        gz = true;
    }
    LoadedVolume out;
    if (bytes.rfind("NRRD", 0) == 0) {
        if (gz) throw Error(ErrorKind::Format, path.string() + ": gzip-wrapped NRRD files are not supported");
        out = read_nrrd(bytes, path);
    } else if (bytes.size() >= 348 && (std::memcmp(bytes.data() + 344, "n+1", 4) == 0 ||
                                       std::memcmp(bytes.data() + 344, "ni1", 4) == 0)) {
        out = read_nifti(bytes, path);
        out.meta.gzip = gz;
    } else {
        throw Error(ErrorKind::Format, path.string() + ": unrecognized volume format");
    }
    return out;
}

ScalarVolume read_volume(const fs::path& path) { return read_volume_file(path).volume; }

LabelMask read_mask(const fs::path& path, std::optional<int> label) {
    const ScalarVolume v = read_volume(path);
    std::vector<std::uint8_t> inside(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        inside[i] = label ? static_cast<std::uint8_t>(v[i] == static_cast<double>(*label)) : static_cast<std::uint8_t>(v[i] != 0.0);
    }
    return LabelMask(v.grid(), std::move(inside));
}

namespace {

std::string nrrd_header(const Grid3& g, ElementType type, bool gzip) {
    std::ostringstream h;
    h << "NRRD0004\n";
    h << "type: " << to_string(type) << "\n";
    h << "dimension: 3\n";
    h << "space: left-posterior-superior\n";
    h << "sizes: " << g.dims[0] << " " << g.dims[1] << " " << g.dims[2] << "\n";
    h << "space directions:";
    for (int a = 0; a < 3; ++a) {
        h << " (";
        for (int r = 0; r < 3; ++r) {
            if (r) h << ",";
            h << (r == a ? format_real(g.direction[a] * g.spacing[a]) : "0");
        }
        h << ")";
    }
    h << "\n";
    h << "kinds: domain domain domain\n";
    h << "endian: little\n";
    h << "encoding: " << (gzip ? "gzip" : "raw") << "\n";
    h << "space origin: (" << format_real(g.origin[0]) << "," << format_real(g.origin[1]) << ","
      << format_real(g.origin[2]) << ")\n\n";
    return h.str();
}

}  // namespace

void write_nrrd(const fs::path& path, const ScalarVolume& volume, const WriteOptions& options) {
    std::string payload = encode_values(volume.values(), options.element_type);
    if (options.gzip) payload = gzip_bytes(payload);
    write_binary(path, nrrd_header(volume.grid(), options.element_type, options.gzip) + payload);
}

void write_nrrd(const fs::path& path, const LabelMask& mask, bool gzip) {
    std::string payload(mask.values().begin(), mask.values().end());
    if (gzip) payload = gzip_bytes(payload);
    write_binary(path, nrrd_header(mask.grid(), ElementType::UInt8, gzip) + payload);
}

void write_nifti(const fs::path& path, const ScalarVolume& volume, ElementType element_type) {
    static_assert(std::endian::native == std::endian::little, "writers assume a little-endian host");
    std::string h(352, '\0');
    auto put = [&h](std::size_t off, auto v) { std::memcpy(h.data() + off, &v, sizeof(v)); };
    const Grid3& g = volume.grid();
    put(0, std::int32_t{348});
    std::array<std::int16_t, 8> dim{3, static_cast<std::int16_t>(g.dims[0]), static_cast<std::int16_t>(g.dims[1]),
                                    static_cast<std::int16_t>(g.dims[2]), 1, 1, 1, 1};
    for (int i = 0; i < 8; ++i) put(40 + 2 * i, dim[i]);
    put(70, static_cast<std::int16_t>(nifti_code(element_type)));
    put(72, static_cast<std::int16_t>(8 * element_size(element_type)));
    std::array<float, 8> pixdim{1.0f, static_cast<float>(g.spacing[0]), static_cast<float>(g.spacing[1]),
                                static_cast<float>(g.spacing[2]), 1, 1, 1, 1};
    for (int i = 0; i < 8; ++i) put(76 + 4 * i, pixdim[i]);
    put(108, 352.0f);
    put(112, 1.0f);
    put(116, 0.0f);
    put(123, std::uint8_t{2});  // xyzt_units: mm
    put(252, std::int16_t{0});
    put(254, std::int16_t{1});
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) put(280 + 16 * r + 4 * c, static_cast<float>(r == c ? g.direction[c] * g.spacing[c] : 0.0));
        put(280 + 16 * r + 12, static_cast<float>(g.origin[r]));
    }
    std::memcpy(h.data() + 344, "n+1", 4);
    std::string bytes = h + encode_values(volume.values(), element_type);
    if (path.extension() == ".gz") bytes = gzip_bytes(bytes);
    write_binary(path, bytes);
}

}  // namespace segrad
