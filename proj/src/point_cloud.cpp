#include "edmol/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "edmol/error.hpp"
#include "edmol/io.hpp"
#include "edmol/rng.hpp"

namespace edmol {

Vec3 LabeledPointCloud::centroid() const {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points) sum += p.pos;
  return points.empty() ? sum : Vec3(sum / static_cast<double>(points.size()));
}

int nearest_atom(const Molecule& mol, const Vec3& p) {
  int best = -1;
  double best_d2 = 0;
  for (int i = 0; i < static_cast<int>(mol.size()); ++i) {
    const double d2 = (mol.atom(i).position - p).squaredNorm();
    if (best < 0 || d2 < best_d2) {
      best = i;
      best_d2 = d2;
    }
  }
  return best;
}

void sort_points(std::vector<CloudPoint>& points) {
  std::stable_sort(points.begin(), points.end(), [](const CloudPoint& a, const CloudPoint& b) {
    if (a.pos.x() != b.pos.x()) return a.pos.x() < b.pos.x();
    if (a.pos.y() != b.pos.y()) return a.pos.y() < b.pos.y();
    return a.pos.z() < b.pos.z();
  });
}

LabeledPointCloud sample_point_cloud(const DensityGrid& grid, const Molecule& mol, int n,
                                     std::uint64_t seed, double source_d_min) {
  if (n < 1) throw ParameterError("point count must be at least 1");
  if (mol.size() == 0) throw InputError("cannot label points without atoms");
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    if (grid.values[i] > 0) positive.push_back(i);
  }
  if (positive.empty()) throw InputError("density grid has no positive voxel");

  Rng rng(seed);
  // Weighted sampling without replacement via exponential keys log(u)/w:
  // the largest key is drawn first with probability proportional to w.
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(positive.size());
  for (std::size_t idx : positive) keys.emplace_back(std::log(rng.uniform()) / grid.values[idx], idx);
  const std::size_t distinct = std::min<std::size_t>(static_cast<std::size_t>(n), keys.size());
  std::partial_sort(keys.begin(), keys.begin() + distinct, keys.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::size_t> chosen;
  chosen.reserve(n);
  for (std::size_t i = 0; i < distinct; ++i) chosen.push_back(keys[i].second);

  if (chosen.size() < static_cast<std::size_t>(n)) {
    std::vector<double> cumulative(positive.size());
    double total = 0;
    for (std::size_t i = 0; i < positive.size(); ++i) {
      total += grid.values[positive[i]];
      cumulative[i] = total;
    }
    while (chosen.size() < static_cast<std::size_t>(n)) {
      const double u = rng.uniform() * total;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const std::size_t pick = std::min<std::size_t>(it - cumulative.begin(), positive.size() - 1);
      chosen.push_back(positive[pick]);
    }
  }

  LabeledPointCloud cloud;
  cloud.source_d_min = source_d_min;
  std::vector<PharmacophoreClass> atom_class(mol.size());
  for (int i = 0; i < static_cast<int>(mol.size()); ++i) atom_class[i] = classify_pharmacophore(mol, i);
  for (std::size_t idx : chosen) {
    const Vec3 pos = grid.node_position(idx);
    cloud.points.push_back({atom_class[nearest_atom(mol, pos)], pos});
  }
  sort_points(cloud.points);
  return cloud;
}

std::string point_cloud_to_json(const LabeledPointCloud& cloud) {
  nlohmann::ordered_json j;
  j["d_min"] = cloud.source_d_min;
  j["n"] = cloud.n();
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : cloud.points) {
    pts.push_back({{"t", std::string(pharmacophore_label(p.cls))},
                   {"x", p.pos.x()},
                   {"y", p.pos.y()},
                   {"z", p.pos.z()}});
  }
  return j.dump() + "\n";
}

LabeledPointCloud point_cloud_from_json(std::string_view text) {
  LabeledPointCloud cloud;
  try {
    const auto j = nlohmann::json::parse(text);
    cloud.source_d_min = j.at("d_min").get<double>();
    const int n = j.at("n").get<int>();
    for (const auto& p : j.at("points")) {
      cloud.points.push_back({pharmacophore_from_label(p.at("t").get<std::string>()),
                              Vec3(p.at("x").get<double>(), p.at("y").get<double>(), p.at("z").get<double>())});
    }
    if (n != cloud.n()) throw InputError("point cloud: n does not match the number of points");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("point cloud: ") + e.what());
  }
  return cloud;
}

LabeledPointCloud read_point_cloud_file(const std::string& path) {
  return point_cloud_from_json(read_text_file(path));
}

void write_point_cloud_file(const std::string& path, const LabeledPointCloud& cloud) {
  write_text_file(path, point_cloud_to_json(cloud));
}

}  // namespace edmol
