#include "locpipe/harness/config.h"

#include <fstream>

#include "locpipe/util/error.h"
#include "locpipe/util/text.h"

namespace locpipe {
namespace {

const std::map<std::string, std::string>& Defaults() {
  static const std::map<std::string, std::string> defaults = {
      {"seed", "0"},
      // Synthetic scenes.
      {"synth.layout", "default"},
      {"synth.num_points", "400"},
      {"synth.num_db", "36"},
      {"synth.num_queries", "10"},
      {"synth.noise_px", "0"},
      {"synth.distractor_fraction", "0"},
      {"synth.descriptor_dim", "64"},
      {"synth.descriptor_noise", "0.05"},
      {"synth.codebook_k", "16"},
      {"synth.soft_alpha", "0"},
      {"synth.width", "640"},
      {"synth.height", "480"},
      {"synth.focal", "500"},
      {"synth.render", "false"},
      // Mapping.
      {"mapping.refine", "false"},
      {"mapping.sigma_mult", "3.0"},
      {"mapping.sigma_threshold", ""},
      {"mapping.min_track", "2"},
      {"mapping.pairs", "covis"},
      {"mapping.pairs_k", "5"},
      {"mapping.pairs_radius", "5.0"},
      {"mapping.covis_min", "10"},
      {"mapping.sequence_window", "2"},
      // Retrieval and reranking.
      {"retrieval.m", "50"},
      {"retrieval.n", "10"},
      {"retrieval.descriptors", "vlad"},
      {"retrieval.weights", ""},
      {"matching.ratio", "0.85"},
      {"matching.pyramid", "off"},
      {"matching.pyramid_threshold", "100"},
      {"preprocess.undistort", "true"},
      // Localization.
      {"cluster.method", "pose"},
      {"cluster.pose_radius", "5.0"},
      {"cluster.covis_threshold", "10"},
      {"pnp.threshold", "8.0"},
      {"pnp.min_iterations", "20"},
      {"pnp.max_iterations", "10000"},
      {"pnp.confidence", "0.999"},
      {"pnp.min_inliers", "12"},
      {"rerank.mode", "inlier"},
      // Pose refinement.
      {"icp.enabled", "false"},
      {"icp.trim", "0.2"},
      {"icp.max_iterations", "100"},
      {"icp.stride", "4"},
      {"icp.target", "sparse"},
      {"depth.scale", "0.001"},
      // Evaluation and execution.
      {"eval.thresholds", "0.25:2,0.5:5,5:10"},
      {"eval.translation_scale", "auto"},
      {"eval.allow_missing", "false"},
      {"pipeline.threads", "0"},
      {"pipeline.allow_failures", "false"},
  };
  return defaults;
}

}  // namespace

Config::Config() : values_(Defaults()) {}

Config Config::Load(const std::filesystem::path& path) {
  Config config;
  config.Merge(path);
  return config;
}

void Config::Merge(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) ThrowError(ErrorCode::kIo, "cannot open config " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      ThrowError(ErrorCode::kParseError,
                 path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      Set(Trim(trimmed.substr(0, eq)), Trim(trimmed.substr(eq + 1)));
    } catch (const Error& e) {
      ThrowError(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.message());
    }
  }
}

void Config::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) ThrowError(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
}

void Config::Set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) ThrowError(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  it->second = value;
}

const std::string& Config::GetString(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) ThrowError(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  return it->second;
}

double Config::GetDouble(const std::string& key) const {
  const auto v = ParseDouble(GetString(key));
  if (!v) ThrowError(ErrorCode::kParseError, key + ": not a number: '" + GetString(key) + "'");
  return *v;
}

long long Config::GetInt(const std::string& key) const {
  const auto v = ParseInt(GetString(key));
  if (!v) ThrowError(ErrorCode::kParseError, key + ": not an integer: '" + GetString(key) + "'");
  return *v;
}

std::size_t Config::GetSize(const std::string& key) const {
  const long long v = GetInt(key);
  if (v < 0) ThrowError(ErrorCode::kInvalidArgument, key + " must be >= 0");
  return static_cast<std::size_t>(v);
}

std::uint64_t Config::GetSeed() const {
  const std::string& s = GetString("seed");
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  ThrowError(ErrorCode::kParseError, "seed: not an unsigned integer: '" + s + "'");
}

bool Config::GetBool(const std::string& key) const {
  const std::string& v = GetString(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  ThrowError(ErrorCode::kParseError, key + ": not a boolean: '" + v + "'");
}

std::vector<std::string> Config::GetList(const std::string& key) const {
  std::vector<std::string> out;
  const std::string& v = GetString(key);
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const std::string item = Trim(v.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace locpipe
