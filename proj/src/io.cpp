#include "ganspec/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include "ganspec/errors.hpp"

namespace ganspec {

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b, 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("unexpected end of stream");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32(std::ostream& out, double v) { write_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

double read_f32(std::istream& in) { return std::bit_cast<float>(read_u32(in)); }

void expect_magic(std::istream& in, const char* magic) {
  char got[4];
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw IoError(std::string("bad magic, expected ") + magic);
  }
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

struct JpegErrorTrap {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* trap = reinterpret_cast<JpegErrorTrap*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, trap->message);
  std::longjmp(trap->jump, 1);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

void write_rt01(std::ostream& out, const RealTensor& tensor) {
  out.write("RT01", 4);
  write_u32(out, static_cast<std::uint32_t>(tensor.height()));
  write_u32(out, static_cast<std::uint32_t>(tensor.width()));
  write_u32(out, static_cast<std::uint32_t>(tensor.channels()));
  for (double v : tensor.data()) write_f32(out, v);
  if (!out) throw IoError("RT01: write failed");
}

RealTensor read_rt01(std::istream& in) {
  expect_magic(in, "RT01");
  const auto h = read_u32(in), w = read_u32(in), c = read_u32(in);
  if (h == 0 || w == 0 || c == 0 || h > (1u << 16) || w > (1u << 16) || c > 4) {
    throw IoError("RT01: implausible shape");
  }
  std::vector<double> data(static_cast<std::size_t>(h) * w * c);
  for (double& v : data) v = read_f32(in);
  return RealTensor(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c), std::move(data));
}

void write_sf01(std::ostream& out, const SpectrumFeature& feature) {
  const RealTensor& t = feature.values;
  out.write("SF01", 4);
  write_u32(out, static_cast<std::uint32_t>(t.height()));
  write_u32(out, static_cast<std::uint32_t>(t.width()));
  write_u32(out, static_cast<std::uint32_t>(t.channels()));
  const char flag = feature.dc_centered ? 1 : 0;
  out.write(&flag, 1);
  for (double v : t.data()) write_f32(out, v);
  if (!out) throw IoError("SF01: write failed");
}

SpectrumFeature read_sf01(std::istream& in) {
  expect_magic(in, "SF01");
  const auto h = read_u32(in), w = read_u32(in), c = read_u32(in);
  if (h == 0 || w == 0 || c == 0 || h > (1u << 16) || w > (1u << 16) || c > 4) {
    throw IoError("SF01: implausible shape");
  }
  char flag = 0;
  if (!in.read(&flag, 1)) throw IoError("SF01: truncated header");
  std::vector<double> data(static_cast<std::size_t>(h) * w * c);
  for (double& v : data) v = read_f32(in);
  return {RealTensor(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c), std::move(data)),
          flag != 0};
}

void write_pgm(std::ostream& out, const RealTensor& plane, double lo, double hi, int channel) {
  if (channel < 0 || channel >= plane.channels()) throw ShapeError("write_pgm: bad channel");
  if (!(hi > lo)) throw std::invalid_argument("write_pgm: empty value range");
  out << "P5\n" << plane.width() << ' ' << plane.height() << "\n255\n";
  for (int y = 0; y < plane.height(); ++y) {
    for (int x = 0; x < plane.width(); ++x) {
      const double t = (plane.at(y, x, channel) - lo) / (hi - lo);
      out.put(static_cast<char>(to_byte(t)));
    }
  }
  if (!out) throw IoError("PGM: write failed");
}

RealTensor read_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".jpg" || ext == ".jpeg") return decode_jpeg(read_file_bytes(path));

  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError("cannot read PNG " + path.string() + ": " + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int ch = color ? 3 : 1;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  std::vector<double> data(pixels.size());
  std::transform(pixels.begin(), pixels.end(), data.begin(),
                 [](std::uint8_t p) { return p / 255.0; });
  return RealTensor(static_cast<int>(image.height), static_cast<int>(image.width), ch,
                    std::move(data));
}

void write_png(const std::filesystem::path& path, const RealTensor& img) {
  if (img.channels() != 1 && img.channels() != 3) throw ShapeError("write_png: 1 or 3 channels");
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> pixels(img.size());
  std::transform(img.data().begin(), img.data().end(), pixels.begin(), to_byte);
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

std::vector<std::uint8_t> encode_jpeg(const RealTensor& img, int quality) {
  if (img.channels() != 1 && img.channels() != 3) throw ShapeError("encode_jpeg: 1 or 3 channels");
  std::vector<std::uint8_t> pixels(img.size());
  std::transform(img.data().begin(), img.data().end(), pixels.begin(), to_byte);

  jpeg_compress_struct cinfo;
  JpegErrorTrap trap;
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  cinfo.err = jpeg_std_error(&trap.mgr);
  trap.mgr.error_exit = jpeg_error_exit;
  if (setjmp(trap.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw IoError(std::string("JPEG encode failed: ") + trap.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = img.channels();
  cinfo.in_color_space = img.channels() == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = pixels.data() + cinfo.next_scanline * stride;
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  std::vector<std::uint8_t> out(buffer, buffer + size);
  jpeg_destroy_compress(&cinfo);
  std::free(buffer);
  return out;
}

RealTensor decode_jpeg(const std::vector<std::uint8_t>& bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorTrap trap;
  cinfo.err = jpeg_std_error(&trap.mgr);
  trap.mgr.error_exit = jpeg_error_exit;
  if (setjmp(trap.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw IoError(std::string("JPEG decode failed: ") + trap.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int w = static_cast<int>(cinfo.output_width);
  const int h = static_cast<int>(cinfo.output_height);
  const int ch = cinfo.output_components;
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(w) * h * ch);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * ch;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  std::vector<double> data(pixels.size());
  std::transform(pixels.begin(), pixels.end(), data.begin(),
                 [](std::uint8_t p) { return p / 255.0; });
  return RealTensor(h, w, ch, std::move(data));
}

RealTensor jpeg_roundtrip(const RealTensor& img, int quality) {
  if (quality < 1 || quality > 100) throw std::invalid_argument("JPEG quality must be in [1, 100]");
  return decode_jpeg(encode_jpeg(img, quality));
}

RealTensor load_tensor(const std::filesystem::path& path) {
  if (lower_extension(path) == ".rt01") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_rt01(in);
  }
  return read_image(path);
}

void save_tensor(const std::filesystem::path& path, const RealTensor& img) {
  const std::string ext = lower_extension(path);
  if (ext == ".rt01") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_rt01(out, img);
    return;
  }
  if (ext == ".jpg" || ext == ".jpeg") {
    const auto bytes = encode_jpeg(img, 95);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    return;
  }
  write_png(path, img);
}

}  // namespace ganspec
