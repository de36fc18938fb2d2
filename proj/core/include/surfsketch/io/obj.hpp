#pragma once

#include "surfsketch/mesh.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace surfsketch::io {

struct ObjInfo {
  std::string material_library;  // from `mtllib`, empty when absent
  std::size_t polygon_count = 0;  // faces before triangulation
};

// Wavefront OBJ reader: `v`, `vt` and `f` statements (v, v/vt, v//vn,
// v/vt/vn forms, negative indices). Polygons are fan-triangulated from their
// first corner, so quads split along the 0-2 diagonal. Faces whose corners
// all carry texture coordinates get UVs; others load without. Throws
// kParse with the 1-based line number on malformed input.
Mesh parse_obj(std::string_view text, ObjInfo* info = nullptr);
Mesh load_obj(const std::filesystem::path& path, ObjInfo* info = nullptr);

// Writes vertices, per-corner texture coordinates and faces.
std::string write_obj(const Mesh& mesh);

}  // namespace surfsketch::io
