#include "surfsketch/io/obj.hpp"

#include "surfsketch/error.hpp"
#include "surfsketch/io/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace surfsketch::io {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  fail(ErrorCode::kParse, "obj line " + std::to_string(line_no) + ": " + what);
}

double parse_number(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) parse_error(line_no, "bad number '" + std::string(token) + "'");
  return value;
}

long parse_index(std::string_view token, std::size_t line_no) {
  long value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || value == 0) {
    parse_error(line_no, "bad index '" + std::string(token) + "'");
  }
  return value;
}

std::uint32_t resolve(long index, std::size_t count, std::size_t line_no, const char* what) {
  const long resolved = index > 0 ? index - 1 : static_cast<long>(count) + index;
  if (resolved < 0 || static_cast<std::size_t>(resolved) >= count) {
    parse_error(line_no, std::string(what) + " index " + std::to_string(index) + " out of range");
  }
  return static_cast<std::uint32_t>(resolved);
}

}  // namespace

Mesh parse_obj(std::string_view text, ObjInfo* info) {
  std::vector<Vec3> positions;
  std::vector<Vec2> texcoords;
  std::vector<Face> faces;
  std::vector<std::optional<FaceUv>> uvs;
  ObjInfo local;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const std::string_view kw = tokens[0];

    if (kw == "v") {
      if (tokens.size() < 4) parse_error(line_no, "vertex needs 3 coordinates");
      positions.emplace_back(parse_number(tokens[1], line_no), parse_number(tokens[2], line_no),
                             parse_number(tokens[3], line_no));
    } else if (kw == "vt") {
      if (tokens.size() < 3) parse_error(line_no, "texture coordinate needs 2 components");
      texcoords.emplace_back(parse_number(tokens[1], line_no), parse_number(tokens[2], line_no));
    } else if (kw == "f") {
      if (tokens.size() < 4) parse_error(line_no, "face needs at least 3 corners");
      std::vector<std::uint32_t> corner_v;
      std::vector<std::optional<std::uint32_t>> corner_t;
      for (std::size_t c = 1; c < tokens.size(); ++c) {
        const std::string_view tok = tokens[c];
        const auto s1 = tok.find('/');
        corner_v.push_back(resolve(parse_index(tok.substr(0, s1), line_no), positions.size(),
                                   line_no, "vertex"));
        std::optional<std::uint32_t> t;
        if (s1 != std::string_view::npos) {
          const auto rest = tok.substr(s1 + 1);
          const auto s2 = rest.find('/');
          const auto vt = rest.substr(0, s2);
          if (!vt.empty()) t = resolve(parse_index(vt, line_no), texcoords.size(), line_no, "texture");
        }
        corner_t.push_back(t);
      }
      const bool with_uv = std::all_of(corner_t.begin(), corner_t.end(),
                                       [](const auto& t) { return t.has_value(); });
      ++local.polygon_count;
      for (std::size_t k = 1; k + 1 < corner_v.size(); ++k) {
        faces.push_back({corner_v[0], corner_v[k], corner_v[k + 1]});
        if (with_uv) {
          uvs.push_back(FaceUv{texcoords[*corner_t[0]], texcoords[*corner_t[k]],
                               texcoords[*corner_t[k + 1]]});
        } else {
          uvs.emplace_back();
        }
      }
    } else if (kw == "mtllib") {
      if (tokens.size() >= 2) local.material_library = std::string(tokens[1]);
    }
    // vn, usemtl, o, g, s and other statements carry nothing we need.
  }
  if (info) *info = local;
  return Mesh(std::move(positions), std::move(faces), std::move(uvs));
}

Mesh load_obj(const std::filesystem::path& path, ObjInfo* info) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "cannot open mesh " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_obj(ss.str(), info);
}

std::string write_obj(const Mesh& mesh) {
  std::string out;
  for (const Vec3& v : mesh.vertices()) {
    out += "v " + format_coordinate(v.x()) + " " + format_coordinate(v.y()) + " " +
           format_coordinate(v.z()) + "\n";
  }
  // Texture coordinates are written once per distinct value.
  std::unordered_map<std::string, std::size_t> vt_index;
  std::vector<std::array<std::size_t, 3>> corner_vt(mesh.face_count());
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto id = static_cast<FaceId>(f);
    if (!mesh.has_uv(id)) continue;
    const FaceUv& uv = mesh.uv(id);
    for (int c = 0; c < 3; ++c) {
      const std::string text = format_coordinate(uv[c].x()) + " " + format_coordinate(uv[c].y());
      auto [it, added] = vt_index.try_emplace(text, vt_index.size() + 1);
      if (added) out += "vt " + text + "\n";
      corner_vt[f][c] = it->second;
    }
  }
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto id = static_cast<FaceId>(f);
    const Face& face = mesh.faces()[f];
    out += "f";
    for (int c = 0; c < 3; ++c) {
      out += " " + std::to_string(face[c] + 1);
      if (mesh.has_uv(id)) out += "/" + std::to_string(corner_vt[f][c]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace surfsketch::io
