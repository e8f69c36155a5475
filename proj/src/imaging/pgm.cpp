#include <cctype>
#include <fstream>
#include <string>
#include <vector>

#include "ndc/imaging.hpp"

namespace ndc {

namespace {

struct Cursor {
  const std::vector<std::uint8_t>& b;
  std::size_t i = 0;

  bool eof() const { return i >= b.size(); }
  int peek() const { return eof() ? -1 : b[i]; }
  int get() { return eof() ? -1 : b[i++]; }

  // skips whitespace and '#' comments up to end of line
  void skip_space() {
    while (!eof()) {
      const int c = peek();
      if (std::isspace(c)) {
        ++i;
      } else if (c == '#') {
        while (!eof() && get() != '\n') {
        }
      } else {
        break;
      }
    }
  }

  long next_int() {
    skip_space();
    if (eof() || !std::isdigit(peek())) throw Error("MalformedHeader", "expected an integer");
    long v = 0;
    while (!eof() && std::isdigit(peek())) {
      v = v * 10 + (get() - '0');
      if (v > 1'000'000'000L) throw Error("MalformedHeader", "integer out of range");
    }
    return v;
  }
};

}  // namespace

GrayImage load_pgm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw Error("MalformedHeader", "missing P2/P5 magic");
  const bool binary = bytes[1] == '5';
  Cursor cur{bytes, 2};

  const long w = cur.next_int();
  const long h = cur.next_int();
  const long maxval = cur.next_int();
  if (w <= 0 || h <= 0) throw Error("MalformedHeader", "non-positive dimensions");
  if (maxval != 255 && maxval != 65535)
    throw Error("UnsupportedMaxval", "maxval must be 255 or 65535, got " + std::to_string(maxval));

  GrayImage img;
  img.width = int(w);
  img.height = int(h);
  img.bit_depth = maxval == 255 ? 8 : 16;
  const std::size_t n = std::size_t(w) * std::size_t(h);
  img.pixels.resize(n);

  if (binary) {
    // single whitespace byte after maxval, then the raster
    if (cur.eof() || !std::isspace(cur.peek())) throw Error("MalformedHeader", "missing raster separator");
    cur.get();
    const std::size_t bpp = maxval == 255 ? 1 : 2;
    if (bytes.size() - cur.i < n * bpp) throw Error("TruncatedPayload", "raster shorter than width*height");
    for (std::size_t k = 0; k < n; ++k) {
      if (bpp == 1) {
        img.pixels[k] = bytes[cur.i + k];
      } else {
        img.pixels[k] =
            std::uint16_t((unsigned(bytes[cur.i + 2 * k]) << 8) | bytes[cur.i + 2 * k + 1]);
      }
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      cur.skip_space();
      if (cur.eof()) throw Error("TruncatedPayload", "ASCII raster ended early");
      const long v = cur.next_int();
      if (v > maxval) throw Error("MalformedHeader", "sample exceeds maxval");
      img.pixels[k] = std::uint16_t(v);
    }
  }
  return img;
}

GrayImage load_pgm_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("MissingFile", "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return load_pgm(bytes);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img, bool binary) {
  img.validate();
  std::string header = std::string(binary ? "P5" : "P2") + "\n" + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n" + std::to_string(img.max_value()) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  if (binary) {
    if (img.bit_depth == 8) {
      for (std::uint16_t p : img.pixels) out.push_back(std::uint8_t(p));
    } else {
      for (std::uint16_t p : img.pixels) {
        out.push_back(std::uint8_t(p >> 8));
        out.push_back(std::uint8_t(p & 0xff));
      }
    }
  } else {
    std::string body;
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        body += std::to_string(img.at(x, y));
        body += x + 1 == img.width ? '\n' : ' ';
      }
    }
    out.insert(out.end(), body.begin(), body.end());
  }
  return out;
}

void write_pgm_file(const GrayImage& img, const std::string& path, bool binary) {
  const std::vector<std::uint8_t> bytes = encode_pgm(img, binary);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("UnwritableDir", "cannot write " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

}  // namespace ndc
