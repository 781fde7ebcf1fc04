#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "rdde/drivers.hpp"

namespace rdde {

namespace {

constexpr std::uint64_t kMagic = 0x3156524444524452ULL;  // "RDRDDRV1" read as little-endian bytes

std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffULL) << (8 * (7 - i));
    return out;
}

void put_u64(std::ostream& os, std::uint64_t v) {
    v = to_le(v);
    os.write(reinterpret_cast<const char*>(&v), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), 8)) throw std::runtime_error("read_driver: truncated file");
    return to_le(v);
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_driver(const std::string& path, const DelayedRoughPath& drp) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_driver: cannot open " + path);
    const auto& data = *drp.data();
    put_u64(os, kMagic);
    put_u64(os, data.dim);
    put_u64(os, data.grid.delay_steps);
    put_u64(os, data.grid.n_points);
    put_f64(os, data.grid.t0);
    put_f64(os, data.grid.h);
    put_f64(os, data.gamma);
    put_f64(os, static_cast<double>(data.first_delayed_step));
    put_f64(os, static_cast<double>(drp.offset()));
    put_f64(os, static_cast<double>(drp.n_points()));
    for (double v : data.x) put_f64(os, v);
    for (double v : data.area) put_f64(os, v);
    for (double v : data.delayed_area) put_f64(os, v);
    if (!os) throw std::runtime_error("write_driver: write failed for " + path);
}

DelayedRoughPath read_driver(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_driver: cannot open " + path);
    if (get_u64(is) != kMagic) throw std::runtime_error("read_driver: bad magic in " + path);
    const std::uint64_t dim = get_u64(is), delay_steps = get_u64(is), n_points = get_u64(is);
    TimeGrid grid;
    grid.t0 = get_f64(is);
    grid.h = get_f64(is);
    grid.n_points = n_points;
    grid.delay_steps = delay_steps;
    const double gamma = get_f64(is);
    const auto first_delayed = static_cast<std::size_t>(get_f64(is));
    const auto offset = static_cast<std::size_t>(get_f64(is));
    const auto view_points = static_cast<std::size_t>(get_f64(is));
    std::vector<double> x(n_points * dim), area((n_points - 1) * dim * dim), delayed(area.size());
    for (auto& v : x) v = get_f64(is);
    for (auto& v : area) v = get_f64(is);
    for (auto& v : delayed) v = get_f64(is);
    auto full = DelayedRoughPath::from_steps(grid, dim, std::move(x), std::move(area), std::move(delayed),
                                             first_delayed, gamma);
    return full.view(offset, view_points);
}

}  // namespace rdde
