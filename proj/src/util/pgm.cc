#include "locpipe/util/pgm.h"

#include <cctype>
#include <fstream>
#include <string>

#include "locpipe/util/error.h"

namespace locpipe {
namespace {

// Reads one header token, skipping whitespace and '#' comments.
std::string HeaderToken(std::istream& in, const std::string& path) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  if (token.empty()) ThrowError(ErrorCode::kTruncatedFile, path);
  return token;
}

int HeaderInt(std::istream& in, const std::string& path) {
  const std::string token = HeaderToken(in, path);
  try {
    return std::stoi(token);
  } catch (...) {
    ThrowError(ErrorCode::kParseError, path + ": bad PGM header value '" + token + "'");
  }
}

}  // namespace

GrayRaster ReadPgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowError(ErrorCode::kIo, "cannot open " + path.string());
  const std::string p = path.string();
  if (HeaderToken(in, p) != "P5") ThrowError(ErrorCode::kBadMagic, p + " (expected P5)");
  GrayRaster raster;
  raster.width = HeaderInt(in, p);
  raster.height = HeaderInt(in, p);
  raster.maxval = HeaderInt(in, p);
  if (raster.width <= 0 || raster.height <= 0 || raster.maxval <= 0 ||
      raster.maxval > 65535) {
    ThrowError(ErrorCode::kParseError, p + ": invalid PGM header");
  }
  const std::size_t n = static_cast<std::size_t>(raster.width) * raster.height;
  const int bytes = raster.maxval > 255 ? 2 : 1;
  std::vector<unsigned char> buf(n * bytes);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
    ThrowError(ErrorCode::kTruncatedFile, p);
  }
  raster.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    raster.pixels[i] = bytes == 1 ? buf[i]
                                  : static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
  }
  return raster;
}

void WritePgm(const std::filesystem::path& path, const GrayRaster& raster) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowError(ErrorCode::kIo, "cannot write " + path.string());
  out << "P5\n" << raster.width << " " << raster.height << "\n" << raster.maxval << "\n";
  const bool wide = raster.maxval > 255;
  for (std::uint16_t v : raster.pixels) {
    if (wide) out.put(static_cast<char>(v >> 8));
    out.put(static_cast<char>(v & 0xff));
  }
}

}  // namespace locpipe
