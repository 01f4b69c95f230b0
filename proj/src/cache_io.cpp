#include "heckelab/operator.hpp"
#include "heckelab/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "operator cache assumes a little-endian host");

namespace heckelab {

const char* version_string()
{
    return "1.0.0";
}

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string footer_text(const OperatorMatrix& H)
{
    std::ostringstream os;
    os << "kind=" << H.kind << "\n"
       << "tau=" << fmt(H.tau.real()) << " " << fmt(H.tau.imag()) << "\n"
       << "x=" << fmt(H.x.real()) << " " << fmt(H.x.imag()) << "\n"
       << "N=" << H.N << "\n"
       << "grid=half-cell-midpoint-v1\n"
       << "symmetrized=" << (H.symmetrized ? 1 : 0) << "\n"
       << "selfadjoint_defect=" << fmt(H.selfadjoint_defect) << "\n"
       << "version=" << version_string() << "\n";
    return os.str();
}

} // namespace

void save_operator(const std::string& path, const OperatorMatrix& H)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw invalid_input_error("save_operator: cannot open " + path);
    }
    const std::uint32_t n = static_cast<std::uint32_t>(H.H.rows());
    out.write("EHK1", 4);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    std::vector<double> row(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) row[j] = H.H(i, j);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(sizeof(double) * n));
    }
    const std::string footer = footer_text(H);
    out.write(footer.data(), static_cast<std::streamsize>(footer.size()));
    if (!out) {
        throw invalid_input_error("save_operator: write failed for " + path);
    }
}

bool load_operator(const std::string& path, OperatorMatrix& out)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "EHK1", 4) != 0) {
        throw invalid_input_error("load_operator: bad magic in " + path);
    }
    std::uint32_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in || n == 0 || n > 1u << 20) {
        throw invalid_input_error("load_operator: bad node count in " + path);
    }
    out.H.resize(n, n);
    std::vector<double> row(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(sizeof(double) * n));
        if (!in) {
            throw invalid_input_error("load_operator: truncated matrix block in " + path);
        }
        for (std::uint32_t j = 0; j < n; ++j) out.H(i, j) = row[j];
    }
    std::string footer((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::istringstream fs(footer);
    std::string line;
    auto take = [&](const std::string& key) -> std::string {
        std::istringstream rescan(footer);
        while (std::getline(rescan, line)) {
            if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
        }
        throw invalid_input_error("load_operator: footer missing key " + key + " in " + path);
    };
    out.kind = take("kind");
    {
        std::istringstream vs(take("tau"));
        double re, im;
        vs >> re >> im;
        out.tau = Complex(re, im);
    }
    {
        std::istringstream vs(take("x"));
        double re, im;
        vs >> re >> im;
        out.x = Complex(re, im);
    }
    out.N = std::stoi(take("N"));
    out.symmetrized = take("symmetrized") == "1";
    out.selfadjoint_defect = std::stod(take("selfadjoint_defect"));
    return true;
}

bool metadata_matches(const OperatorMatrix& a, const OperatorMatrix& b)
{
    return a.kind == b.kind && a.N == b.N && a.tau == b.tau && a.x == b.x &&
           a.symmetrized == b.symmetrized;
}

} // namespace heckelab
