// Field serialization: flat binary container, legacy-VTK structured points,
// and CSV plane slices.
#pragma once

#include <string>

#include "cpl/common.hpp"
#include "cpl/grid.hpp"

namespace cpl {

// Binary container layout (little-endian):
//   char magic[8] = "CPLFLD01"
//   f64 R, u32 nx, u32 ny, u32 nz, u32 ncomp, u32 complex_flag
//   payload: ncomp components, each in (i,j,t)-lexicographic node order,
//   f64 values (re,im interleaved when complex).
struct FieldBundle {
    double R = 0.0;
    int nx = 0, ny = 0, nz = 0;
    bool is_complex = false;
    std::vector<ScalarField> cfields;  // used when is_complex
    std::vector<RealField> rfields;    // used otherwise
};

void save_fields(const std::string& path, double R, const std::vector<ScalarField>& comps);
void save_fields(const std::string& path, double R, const std::vector<RealField>& comps);
FieldBundle load_fields(const std::string& path);

// Legacy-VTK structured points with one named scalar array per field.
void save_vtk(const std::string& path, const Grid3D& g,
              const std::vector<std::pair<std::string, const RealField*>>& fields);

// CSV slice of the node layer nearest to plane z = z_plane; columns x,y,value.
void save_csv_slice(const std::string& path, const Grid3D& g, const RealField& f,
                    double z_plane);

// FNV-1a over a string; used for config hashes in stage manifests.
uint64_t fnv1a(const std::string& s);

}  // namespace cpl
