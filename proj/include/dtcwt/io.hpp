#ifndef DTCWT_IO_HPP
#define DTCWT_IO_HPP

#include <string>
#include <vector>

#include "dtcwt/array4d.hpp"
#include "dtcwt/dwt4d.hpp"
#include "dtcwt/solver.hpp"
#include "dtcwt/tomo.hpp"
#include "dtcwt/transform4d.hpp"

namespace dtcwt {

/// Containers are directories: manifest.json plus little-endian 8-byte-float
/// blobs, x fastest, real/imaginary interleaved for complex subbands.

void save_volume(const Volume4D& v, const std::string& dir);
Volume4D load_volume(const std::string& dir);

void save_coeffs(const Coeffs4D& c, const std::string& dir);
Coeffs4D load_coeffs(const std::string& dir);

void save_dwt_coeffs(const DwtCoeffs4D& c, const std::string& dir);
DwtCoeffs4D load_dwt_coeffs(const std::string& dir);

void save_sinogram(const ProjectionData& p, const std::string& dir);
ProjectionData load_sinogram(const std::string& dir);

void save_geometry(const Geometry& g, const std::string& path);
Geometry load_geometry(const std::string& path);

/// 8-bit binary PGM with a fixed intensity window [lo, hi]; values clamp.
void write_pgm(const std::string& path, const std::vector<double>& row_major, int width, int height,
               double lo, double hi);

enum class SlicePlane { kXY, kXZ, kYZ };

struct SlicePick {
    SlicePlane plane = SlicePlane::kXY;
    int index = 0;  // fixed coordinate (z for xy, y for xz, x for yz)
    int time = 0;
};

/// Writes slice_<plane>_<axis><index>_t<time>.pgm; returns the file name.
std::string export_slice(const Volume4D& v, const SlicePick& pick, const std::string& dir, double lo,
                         double hi);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_convergence_csv(const ConvergenceReport& rep, const std::string& path);

/// Key/value payload recorded next to every CLI output (atomic rename).
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> entries;  // resolved config snapshot
    unsigned long long seed = 0;
    double elapsed_seconds = 0;
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, long long value);
    void write(const std::string& dir) const;
};

}  // namespace dtcwt

#endif
