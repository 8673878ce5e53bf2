#ifndef LOCPIPE_HARNESS_CONFIG_H_
#define LOCPIPE_HARNESS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace locpipe {

// Flat "section.key = value" settings. Every key has a default; setting or
// loading an unknown key throws InvalidArgument so typos do not go unnoticed.
// '#' starts a comment.
class Config {
 public:
  Config();

  static Config Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  // Applies "key = value" lines on top of the current values.
  void Merge(const std::filesystem::path& path);
  void Set(const std::string& key, const std::string& value);
  bool Has(const std::string& key) const { return values_.count(key) > 0; }

  const std::string& GetString(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  long long GetInt(const std::string& key) const;
  std::size_t GetSize(const std::string& key) const;
  std::uint64_t GetSeed() const;
  bool GetBool(const std::string& key) const;
  // Comma-separated list; empty value gives an empty list.
  std::vector<std::string> GetList(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace locpipe

#endif  // LOCPIPE_HARNESS_CONFIG_H_
