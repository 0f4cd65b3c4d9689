#include "core/probe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "core/error.hpp"

namespace rainsd {

namespace {

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

LayerStyleReport report_for(int layer_id, const Tensor& t) {
  LayerStyleReport r;
  r.layer_id = layer_id;
  r.stats = channel_stats(t);
  r.scalar_mean = mean_of(r.stats.mean);
  r.scalar_std = mean_of(r.stats.std);
  return r;
}

}  // namespace

std::vector<LayerStyleReport> probe(const std::vector<Tensor>& features) {
  std::vector<LayerStyleReport> out;
  out.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    out.push_back(report_for(static_cast<int>(i), features[i]));
  }
  return out;
}

std::vector<LayerStyleReport> probe(const std::vector<std::pair<int, Tensor>>& features) {
  std::vector<LayerStyleReport> out;
  out.reserve(features.size());
  for (const auto& [id, tensor] : features) out.push_back(report_for(id, tensor));
  return out;
}

ComparisonReport compare(const std::vector<LayerStyleReport>& a,
                         const std::vector<LayerStyleReport>& b) {
  if (a.size() != b.size()) {
    throw Error::invalid("compare: layer counts differ (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
  ComparisonReport report;
  report.layers.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].layer_id != b[i].layer_id) {
      throw Error::invalid("compare: layer id mismatch at position " + std::to_string(i));
    }
    LayerComparison c;
    c.layer_id = a[i].layer_id;
    if (b[i].scalar_mean != 0.0) {
      c.relative_mean_change_pct =
          100.0 * (a[i].scalar_mean - b[i].scalar_mean) / std::abs(b[i].scalar_mean);
    } else {
      c.mean_defined = false;
    }
    if (b[i].scalar_std != 0.0) {
      c.relative_std_change_pct =
          100.0 * (a[i].scalar_std - b[i].scalar_std) / std::abs(b[i].scalar_std);
    } else {
      c.std_defined = false;
    }
    report.layers.push_back(c);
  }
  return report;
}

std::vector<std::pair<int, Tensor>> load_feature_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error::io("feature directory not found: " + dir.string());
  }
  std::vector<std::pair<int, std::filesystem::path>> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() < 7 || name.front() != 'f' || entry.path().extension() != ".rsdt") {
      continue;
    }
    const std::string digits = entry.path().stem().string().substr(1);
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
      continue;
    }
    files.emplace_back(std::stoi(digits), entry.path());
  }
  if (files.empty()) {
    throw Error::io("no f<k>.rsdt files in " + dir.string());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<int, Tensor>> out;
  out.reserve(files.size());
  for (const auto& [id, path] : files) out.emplace_back(id, read_tensor(path));
  return out;
}

std::string render_probe_table(const std::vector<LayerStyleReport>& reports) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "layer" << std::right << std::setw(14) << "mean"
     << std::setw(14) << "std" << '\n';
  os << std::setprecision(6) << std::fixed;
  for (const auto& r : reports) {
    os << std::left << std::setw(8) << ("f" + std::to_string(r.layer_id)) << std::right
       << std::setw(14) << r.scalar_mean << std::setw(14) << r.scalar_std << '\n';
  }
  return os.str();
}

std::string render_comparison_table(const std::vector<LayerStyleReport>& probed,
                                    const std::vector<LayerStyleReport>& baseline,
                                    const ComparisonReport& cmp) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "layer" << std::right << std::setw(12) << "mean"
     << std::setw(12) << "base" << std::setw(10) << "d%" << std::setw(12) << "std"
     << std::setw(12) << "base" << std::setw(10) << "d%" << '\n';
  os << std::setprecision(4) << std::fixed;
  for (std::size_t i = 0; i < cmp.layers.size(); ++i) {
    const auto& c = cmp.layers[i];
    os << std::left << std::setw(8) << ("f" + std::to_string(c.layer_id)) << std::right
       << std::setw(12) << probed[i].scalar_mean << std::setw(12)
       << baseline[i].scalar_mean;
    if (c.mean_defined) {
      os << std::setw(10) << std::setprecision(2) << c.relative_mean_change_pct
         << std::setprecision(4);
    } else {
      os << std::setw(10) << "n/a";
    }
    os << std::setw(12) << probed[i].scalar_std << std::setw(12)
       << baseline[i].scalar_std;
    if (c.std_defined) {
      os << std::setw(10) << std::setprecision(2) << c.relative_std_change_pct
         << std::setprecision(4);
    } else {
      os << std::setw(10) << "n/a";
    }
    os << '\n';
  }
  return os.str();
}

void write_probe_csv(const std::vector<LayerStyleReport>& probed,
                     const ComparisonReport* cmp, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error::io("cannot write " + path.string());
  out << "layer_id,scalar_mean,scalar_std";
  if (cmp) out << ",relative_mean_change_pct,relative_std_change_pct,defined";
  out << '\n';
  out << std::setprecision(12);
  for (std::size_t i = 0; i < probed.size(); ++i) {
    out << probed[i].layer_id << ',' << probed[i].scalar_mean << ','
        << probed[i].scalar_std;
    if (cmp) {
      const auto& c = cmp->layers[i];
      out << ',' << (c.mean_defined ? std::to_string(c.relative_mean_change_pct) : "")
          << ',' << (c.std_defined ? std::to_string(c.relative_std_change_pct) : "")
          << ',' << ((c.mean_defined && c.std_defined) ? 1 : 0);
    }
    out << '\n';
  }
}

}  // namespace rainsd
