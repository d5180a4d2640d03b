#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "uqlab/data/datasets.hpp"
#include "uqlab/error.hpp"

namespace uqlab::data {

namespace {

std::uint32_t read_be32(std::span<const unsigned char> bytes, std::size_t offset, const char* what) {
  if (bytes.size() < offset + 4) throw ParseError(std::string("truncated IDX header: missing ") + what, offset);
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

void check_magic(std::uint32_t magic, std::uint32_t expected, const char* kind) {
  if (magic == expected) return;
  std::ostringstream msg;
  msg << "bad IDX " << kind << " magic 0x" << std::hex << magic << ", expected 0x" << expected;
  throw ParseError(msg.str(), 0);
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Matrix parse_idx_images(std::span<const unsigned char> bytes) {
  check_magic(read_be32(bytes, 0, "magic"), kIdxImagesMagic, "images");
  const std::size_t count = read_be32(bytes, 4, "image count");
  const std::size_t rows = read_be32(bytes, 8, "row count");
  const std::size_t cols = read_be32(bytes, 12, "column count");
  constexpr std::size_t header = 16;
  const std::size_t pixels = rows * cols;
  if (count == 0 || pixels == 0) throw ParseError("IDX image file declares no data", 4);
  const std::size_t needed = header + count * pixels;
  if (bytes.size() < needed) {
    throw ParseError("truncated IDX image data: need " + std::to_string(needed) + " bytes, have " +
                         std::to_string(bytes.size()),
                     bytes.size());
  }
  Matrix m(count, pixels);
  auto v = m.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(bytes[header + i]) / 255.0;
  return m;
}

std::vector<std::size_t> parse_idx_labels(std::span<const unsigned char> bytes) {
  check_magic(read_be32(bytes, 0, "magic"), kIdxLabelsMagic, "labels");
  const std::size_t count = read_be32(bytes, 4, "label count");
  constexpr std::size_t header = 8;
  if (bytes.size() < header + count) {
    throw ParseError("truncated IDX label data: need " + std::to_string(header + count) + " bytes, have " +
                         std::to_string(bytes.size()),
                     bytes.size());
  }
  return {bytes.begin() + header, bytes.begin() + static_cast<std::ptrdiff_t>(header + count)};
}

LabeledSet load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                    std::size_t classes) {
  const auto image_bytes = read_file(images);
  const auto label_bytes = read_file(labels);
  Matrix inputs = parse_idx_images(image_bytes);
  const auto ids = parse_idx_labels(label_bytes);
  if (ids.size() != inputs.rows()) {
    throw ParseError("IDX count mismatch: " + std::to_string(inputs.rows()) + " images vs " +
                         std::to_string(ids.size()) + " labels",
                     4);
  }
  if (classes == 0) {
    for (std::size_t id : ids) classes = std::max(classes, id + 1);
  }
  return LabeledSet{std::move(inputs), one_hot(ids, classes), SplitTag::train};
}

std::vector<unsigned char> encode_idx_images(std::span<const unsigned char> pixels, std::uint32_t count,
                                             std::uint32_t rows, std::uint32_t cols) {
  if (pixels.size() != std::size_t{count} * rows * cols) throw DataError("pixel count does not match dimensions");
  std::vector<unsigned char> out;
  write_be32(out, kIdxImagesMagic);
  write_be32(out, count);
  write_be32(out, rows);
  write_be32(out, cols);
  out.insert(out.end(), pixels.begin(), pixels.end());
  return out;
}

std::vector<unsigned char> encode_idx_labels(std::span<const unsigned char> labels) {
  std::vector<unsigned char> out;
  write_be32(out, kIdxLabelsMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

}  // namespace uqlab::data
