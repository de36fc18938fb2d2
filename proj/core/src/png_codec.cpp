#include "surfsketch/error.hpp"
#include "surfsketch/texture.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>

namespace surfsketch {
namespace {

struct WriteBuffer {
  std::vector<std::uint8_t> bytes;
};

void write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* buffer = static_cast<WriteBuffer*>(png_get_io_ptr(png));
  buffer->bytes.insert(buffer->bytes.end(), data, data + length);
}

void flush_callback(png_structp) {}

struct ReadBuffer {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

void read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto* buffer = static_cast<ReadBuffer*>(png_get_io_ptr(png));
  if (buffer->offset + length > buffer->size) png_error(png, "truncated PNG data");
  std::memcpy(out, buffer->data + buffer->offset, length);
  buffer->offset += length;
}

void warning_callback(png_structp, png_const_charp) {}

// libpng reports errors by longjmp; these helpers keep every object with a
// destructor outside the setjmp scope.
bool encode(png_structp png, png_infop info, WriteBuffer* buffer, const std::uint8_t* pixels,
            png_uint_32 width, png_uint_32 height) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_write_fn(png, buffer, write_callback, flush_callback);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * 4;
  for (png_uint_32 y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(pixels + y * stride));
  }
  png_write_end(png, nullptr);
  return true;
}

bool read_header(png_structp png, png_infop info, ReadBuffer* buffer, png_uint_32* width,
                 png_uint_32* height, int* depth, int* color_type) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_read_fn(png, buffer, read_callback);
  png_read_info(png, info);
  *width = png_get_image_width(png, info);
  *height = png_get_image_height(png, info);
  *depth = png_get_bit_depth(png, info);
  *color_type = png_get_color_type(png, info);
  return true;
}

bool read_rows(png_structp png, std::uint8_t* out, png_uint_32 width, png_uint_32 height) {
  if (setjmp(png_jmpbuf(png))) return false;
  const std::size_t stride = static_cast<std::size_t>(width) * 4;
  for (png_uint_32 y = 0; y < height; ++y) png_read_row(png, out + y * stride, nullptr);
  png_read_end(png, nullptr);
  return true;
}

}  // namespace

std::vector<std::uint8_t> export_raster(const TextureLayer& layer) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                            warning_callback);
  if (!png) fail(ErrorCode::kIo, "png: cannot create writer");
  png_infop info = png_create_info_struct(png);
  WriteBuffer buffer;
  const bool ok = info && encode(png, info, &buffer, layer.rgba().data(),
                                 static_cast<png_uint_32>(layer.width()),
                                 static_cast<png_uint_32>(layer.height()));
  png_destroy_write_struct(&png, &info);
  if (!ok) fail(ErrorCode::kIo, "png: encoding failed");
  return std::move(buffer.bytes);
}

TextureLayer import_raster(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    fail(ErrorCode::kIo, "png: missing signature");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                           warning_callback);
  if (!png) fail(ErrorCode::kIo, "png: cannot create reader");
  png_infop info = png_create_info_struct(png);
  ReadBuffer buffer{bytes.data(), bytes.size(), 0};
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int depth = 0;
  int color_type = 0;
  if (!info || !read_header(png, info, &buffer, &width, &height, &depth, &color_type)) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::kIo, "png: unreadable header");
  }
  if (depth != 8 || color_type != PNG_COLOR_TYPE_RGBA || width == 0 || height == 0) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::kIo, "png: expected non-empty 8-bit RGBA image");
  }
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * 4);
  const bool ok = read_rows(png, pixels.data(), width, height);
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) fail(ErrorCode::kIo, "png: corrupt image data");

  TextureLayer layer(static_cast<int>(width), static_cast<int>(height));
  for (png_uint_32 y = 0; y < height; ++y) {
    for (png_uint_32 x = 0; x < width; ++x) {
      const std::uint8_t* t = pixels.data() + (static_cast<std::size_t>(y) * width + x) * 4;
      layer.set(static_cast<int>(x), static_cast<int>(y), Rgba{t[0], t[1], t[2], t[3]});
    }
  }
  layer.flush_dirty();
  return layer;
}

}  // namespace surfsketch
