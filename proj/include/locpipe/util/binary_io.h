#ifndef LOCPIPE_UTIL_BINARY_IO_H_
#define LOCPIPE_UTIL_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

#include "locpipe/util/error.h"

namespace locpipe {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

// Sequential little-endian reader that reports short reads as TruncatedFile.
class BinaryReader {
 public:
  BinaryReader(std::istream& stream, std::string path)
      : stream_(stream), path_(std::move(path)) {}

  template <typename T>
  T Read() {
    static_assert(std::is_trivially_copyable_v<T>);
    T value;
    ReadBytes(&value, sizeof(T));
    return value;
  }

  void ReadBytes(void* dst, std::size_t size) {
    stream_.read(static_cast<char*>(dst), static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(stream_.gcount()) != size) {
      ThrowError(ErrorCode::kTruncatedFile, path_);
    }
  }

  void ExpectMagic(std::string_view magic) {
    char buf[4];
    stream_.read(buf, 4);
    if (stream_.gcount() != 4 || std::string_view(buf, 4) != magic) {
      ThrowError(ErrorCode::kBadMagic,
                 path_ + " (expected " + std::string(magic) + ")");
    }
  }

  const std::string& path() const { return path_; }

 private:
  std::istream& stream_;
  std::string path_;
};

template <typename T>
void WriteBinary(std::ostream& stream, const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  stream.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

}  // namespace locpipe

#endif  // LOCPIPE_UTIL_BINARY_IO_H_
