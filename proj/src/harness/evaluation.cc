#include "locpipe/harness/evaluation.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Geometry>

#include "locpipe/util/error.h"
#include "locpipe/util/text.h"

namespace locpipe {

PoseError ComputePoseError(const RigidPose& estimate, const RigidPose& ground_truth) {
  // Angle between unit quaternions; robust near 0 and 180 degrees.
  const double dot = std::abs(estimate.rotation().dot(ground_truth.rotation()));
  const double angle = 2.0 * std::acos(std::min(1.0, dot));
  return {angle * 180.0 / M_PI, (estimate.Center() - ground_truth.Center()).norm()};
}

std::vector<ErrorThreshold> ParseThresholds(const std::string& text) {
  std::vector<ErrorThreshold> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    std::optional<double> t, r;
    if (colon != std::string::npos) {
      t = ParseDouble(Trim(item.substr(0, colon)));
      r = ParseDouble(Trim(item.substr(colon + 1)));
    }
    if (!t || !r || *t < 0 || *r < 0) {
      ThrowError(ErrorCode::kParseError, "bad threshold '" + item + "', expected meters:degrees");
    }
    out.push_back({*t, *r});
  }
  if (out.empty()) ThrowError(ErrorCode::kParseError, "no thresholds given");
  return out;
}

std::vector<ErrorThreshold> DefaultThresholds() { return {{0.25, 2.0}, {0.5, 5.0}, {5.0, 10.0}}; }

EvalReport Evaluate(const std::vector<NamedPose>& estimates,
                    const std::vector<NamedPose>& ground_truth,
                    const std::vector<ErrorThreshold>& thresholds, bool allow_missing) {
  std::map<std::string, const RigidPose*> gt, est;
  for (const auto& p : ground_truth) gt[p.name] = &p.pose;
  for (const auto& p : estimates) {
    if (gt.count(p.name) == 0) {
      ThrowError(ErrorCode::kNameMismatch, "estimate for unknown query '" + p.name + "'");
    }
    if (!est.emplace(p.name, &p.pose).second) {
      ThrowError(ErrorCode::kNameMismatch, "duplicate estimate for query '" + p.name + "'");
    }
  }
  EvalReport report;
  report.thresholds = thresholds;
  for (const auto& [name, pose] : gt) {
    QueryResult r;
    r.name = name;
    auto it = est.find(name);
    if (it == est.end()) {
      if (!allow_missing) ThrowError(ErrorCode::kNameMismatch, "no estimate for query '" + name + "'");
    } else {
      r.localized = true;
      r.error = ComputePoseError(*it->second, *pose);
    }
    report.queries.push_back(r);
  }
  for (const auto& th : thresholds) {
    std::size_t hits = 0;
    for (const auto& q : report.queries) {
      hits += q.localized && q.error.translation <= th.translation &&
              q.error.rotation_deg <= th.rotation_deg;
    }
    report.recall.push_back(report.queries.empty()
                                ? 0.0
                                : static_cast<double>(hits) / static_cast<double>(report.queries.size()));
  }
  return report;
}

std::string FormatEvalSummary(const EvalReport& report) {
  std::ostringstream out;
  out.precision(6);
  for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
    out << "# recall " << report.thresholds[i].translation << " " << report.thresholds[i].rotation_deg
        << " " << report.recall[i] << "\n";
  }
  return out.str();
}

void WriteEvalReport(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream file(path);
  if (!file) ThrowError(ErrorCode::kIo, "cannot write " + path.string());
  file.precision(10);
  for (const auto& q : report.queries) {
    if (q.localized) {
      file << q.name << " " << q.error.rotation_deg << " " << q.error.translation << "\n";
    } else {
      file << q.name << " missing\n";
    }
  }
  file << FormatEvalSummary(report);
}

}  // namespace locpipe
