#include "jcas/app/artifacts.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace jcas::app {

namespace {

constexpr std::uint16_t kRdVersion = 1;
constexpr std::uint16_t kPatternVersion = 1;

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { le(v, 2); }
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
    void c128(cplx v) {
        f64(v.real());
        f64(v.imag());
    }
    void raw(const char* s, std::size_t n) { buf_.insert(buf_.end(), s, s + n); }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
        if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
    }

private:
    void le(std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
        buf_.assign(std::istreambuf_iterator<char>(in), {});
    }
    std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    double f64() { return std::bit_cast<double>(le(8)); }
    cplx c128() {
        const double re = f64();
        return {re, f64()};
    }
    std::string raw(std::size_t n) {
        need(n);
        std::string s(buf_.begin() + static_cast<long>(pos_), buf_.begin() + static_cast<long>(pos_ + n));
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == buf_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > buf_.size()) throw std::runtime_error("truncated file");
    }
    std::uint64_t le(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
        return v;
    }
    std::vector<char> buf_;
    std::size_t pos_ = 0;
};

}  // namespace

void write_rd_bin(const std::filesystem::path& path, const RdMatrix& rd) {
    ByteWriter w;
    w.raw("RDMX", 4);
    w.u16(kRdVersion);
    w.u32(static_cast<std::uint32_t>(rd.range_bins));
    w.u32(static_cast<std::uint32_t>(rd.doppler_bins));
    for (const auto& v : rd.values) w.c128(v);
    w.save(path);
}

RdMatrix read_rd_bin(const std::filesystem::path& path) {
    ByteReader r(path);
    if (r.raw(4) != "RDMX") throw std::runtime_error("not an RDMX file: " + path.string());
    if (r.u16() != kRdVersion) throw std::runtime_error("unsupported RDMX version");
    const std::size_t rows = r.u32(), cols = r.u32();
    RdMatrix rd(rows, cols, cols);
    for (auto& v : rd.values) v = r.c128();
    if (!r.done()) throw std::runtime_error("trailing bytes in " + path.string());
    return rd;
}

void write_rd_csv(const std::filesystem::path& path, const RdMatrix& rd) {
    double peak = 0.0;
    for (const auto& v : rd.values) peak = std::max(peak, std::abs(v));
    std::string text;
    text.reserve(rd.values.size() * 12);
    char cell[40];
    for (std::size_t d = 0; d < rd.range_bins; ++d) {
        for (std::size_t nu = 0; nu < rd.doppler_bins; ++nu) {
            const double mag = peak > 0.0 ? std::abs(rd.at(d, nu)) / peak : 0.0;
            std::snprintf(cell, sizeof cell, nu == 0 ? "%.9g" : ",%.9g", mag);
            text += cell;
        }
        text += '\n';
    }
    write_text(path, text);
}

void write_pattern(const std::filesystem::path& path, const PatternTensor& pat, std::uint64_t key) {
    ByteWriter w;
    w.raw("PTRN", 4);
    w.u16(kPatternVersion);
    w.u64(key);
    w.u32(static_cast<std::uint32_t>(pat.range_bins));
    w.u32(static_cast<std::uint32_t>(pat.doppler_bins));
    w.u32(static_cast<std::uint32_t>(pat.doppler_span));
    w.f64(pat.cond_limit);
    for (const auto& c : pat.cells) {
        for (const auto& row : c.p)
            for (const auto& v : row) w.c128(v);
        for (const auto& row : c.sol)
            for (const auto& v : row) w.c128(v);
        w.f64(c.cond);
        w.u8(static_cast<std::uint8_t>((c.resolvable ? 1 : 0) | (c.guarded ? 2 : 0)));
    }
    w.save(path);
}

bool read_pattern(const std::filesystem::path& path, std::uint64_t key, PatternTensor& out) {
    if (!std::filesystem::exists(path)) return false;
    try {
        ByteReader r(path);
        if (r.raw(4) != "PTRN" || r.u16() != kPatternVersion || r.u64() != key) return false;
        PatternTensor pat;
        pat.range_bins = r.u32();
        pat.doppler_bins = r.u32();
        pat.doppler_span = r.u32();
        pat.cond_limit = r.f64();
        pat.cells.resize(pat.range_bins * pat.doppler_span);
        for (auto& c : pat.cells) {
            for (auto& row : c.p)
                for (auto& v : row) v = r.c128();
            for (auto& row : c.sol)
                for (auto& v : row) v = r.c128();
            c.cond = r.f64();
            const auto flags = r.u8();
            c.resolvable = flags & 1;
            c.guarded = flags & 2;
        }
        if (!r.done()) return false;
        out = std::move(pat);
        return true;
    } catch (const std::runtime_error&) {
        return false;
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace jcas::app
