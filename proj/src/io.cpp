#include "vlab/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "VFLD1 writer assumes a little-endian host");

namespace vlab {

namespace {

constexpr char kMagic[5] = {'V', 'F', 'L', 'D', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.append(buf, 4);
}

void put_f64(std::string& out, double v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.append(buf, 8);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_field(const std::filesystem::path& path, const VectorField& u) {
    const Grid& g = u.grid();
    std::string out;
    out.reserve(25 + 8 * static_cast<std::size_t>(u.components()) * g.total_points());
    out.append(kMagic, 5);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(g.dim()));
    put_u32(out, static_cast<std::uint32_t>(u.components()));
    put_u32(out, static_cast<std::uint32_t>(g.points_per_dim()));
    put_f64(out, g.half_length());
    for (int i = 0; i < u.components(); ++i)
        for (std::size_t p = 0; p < g.total_points(); ++p)
            put_f64(out, u.component(i)[p]);
    atomic_write(path, out);
}

VectorField read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, kMagic, 5) != 0)
        throw std::runtime_error(path.string() + ": not a VFLD1 file");

    auto get_u32 = [&in, &path]() {
        std::uint32_t v;
        in.read(reinterpret_cast<char*>(&v), 4);
        if (!in) throw std::runtime_error(path.string() + ": truncated header");
        return v;
    };
    const std::uint32_t version = get_u32();
    if (version != kVersion)
        throw std::runtime_error(path.string() + ": unsupported VFLD version");
    const std::uint32_t n = get_u32();
    const std::uint32_t m = get_u32();
    const std::uint32_t points = get_u32();
    double l;
    in.read(reinterpret_cast<char*>(&l), 8);
    if (!in) throw std::runtime_error(path.string() + ": truncated header");

    const Grid grid = Grid::make(static_cast<int>(n), static_cast<int>(points), l);
    VectorField u(grid, static_cast<int>(m));
    for (std::uint32_t i = 0; i < m; ++i) {
        auto& f = u.component(static_cast<int>(i));
        in.read(reinterpret_cast<char*>(f.data()),
                static_cast<std::streamsize>(8 * grid.total_points()));
        if (!in) throw std::runtime_error(path.string() + ": truncated payload");
    }
    return u;
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRow>& trace) {
    std::string out = "iter,energy,kinetic,potential,mass_error,residual,tau\n";
    for (const auto& row : trace) {
        out += std::to_string(row.iter);
        out += ',';
        out += format_double(row.energy);
        out += ',';
        out += format_double(row.kinetic);
        out += ',';
        out += format_double(row.potential);
        out += ',';
        out += format_double(row.mass_error);
        out += ',';
        out += format_double(row.residual);
        out += ',';
        out += format_double(row.tau);
        out += '\n';
    }
    atomic_write(path, out);
}

void write_scan_csv(const std::filesystem::path& path,
                    const std::vector<ScanPoint>& points) {
    std::string out = "c,energy,multiplier,residual\n";
    for (const auto& p : points) {
        out += format_double(p.c);
        out += ',';
        out += format_double(p.energy);
        out += ',';
        out += format_double(p.multiplier);
        out += ',';
        out += format_double(p.residual);
        out += '\n';
    }
    atomic_write(path, out);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    atomic_write(path, j.dump(2) + "\n");
}

} // namespace vlab
