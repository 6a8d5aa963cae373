#include "edmol/metrics.hpp"

#include <algorithm>

#include <json.hpp>

#include "edmol/error.hpp"
#include "edmol/perception.hpp"

namespace edmol {

std::uint32_t fnv1a(const std::vector<std::int32_t>& words) {
  std::uint32_t h = 2166136261u;
  for (std::int32_t w : words) {
    const auto u = static_cast<std::uint32_t>(w);
    for (int b = 0; b < 4; ++b) {
      h ^= (u >> (8 * b)) & 0xffu;
      h *= 16777619u;
    }
  }
  return h;
}

Fingerprint fingerprint(const Molecule& mol, int radius) {
  if (radius < 0) throw ParameterError("fingerprint radius must be non-negative");
  const int n = static_cast<int>(mol.size());
  std::vector<char> heavy(n);
  for (int i = 0; i < n; ++i) heavy[i] = mol.atom(i).element != Element::H;

  std::vector<std::uint32_t> ids(n, 0);
  Fingerprint fp;
  fp.radius = radius;
  for (int i = 0; i < n; ++i) {
    if (!heavy[i]) continue;
    const Atom& a = mol.atom(i);
    int degree = 0;
    for (const auto& nb : mol.neighbors(i)) degree += heavy[nb.atom];
    ids[i] = fnv1a({0, atomic_number(a.element), degree, a.formal_charge, a.aromatic ? 1 : 0,
                    total_hydrogens(mol, i)});
    fp.bits.push_back(ids[i]);
  }
  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint32_t> next(n, 0);
    for (int i = 0; i < n; ++i) {
      if (!heavy[i]) continue;
      std::vector<std::pair<std::int32_t, std::uint32_t>> env;
      for (const auto& nb : mol.neighbors(i)) {
        if (heavy[nb.atom]) env.emplace_back(static_cast<std::int32_t>(mol.bond(nb.bond).order), ids[nb.atom]);
      }
      std::sort(env.begin(), env.end());
      std::vector<std::int32_t> words{r, static_cast<std::int32_t>(ids[i])};
      for (const auto& [order, id] : env) {
        words.push_back(order);
        words.push_back(static_cast<std::int32_t>(id));
      }
      next[i] = fnv1a(words);
      fp.bits.push_back(next[i]);
    }
    ids = std::move(next);
  }
  std::sort(fp.bits.begin(), fp.bits.end());
  fp.bits.erase(std::unique(fp.bits.begin(), fp.bits.end()), fp.bits.end());
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.radius != b.radius) throw ParameterError("fingerprint radius mismatch");
  if (a.bits.empty() && b.bits.empty()) return 1.0;
  std::vector<std::uint32_t> common;
  std::set_intersection(a.bits.begin(), a.bits.end(), b.bits.begin(), b.bits.end(), std::back_inserter(common));
  const std::size_t uni = a.bits.size() + b.bits.size() - common.size();
  return static_cast<double>(common.size()) / static_cast<double>(uni);
}

double molecular_weight(const Molecule& mol) {
  double mw = 0;
  for (int i = 0; i < static_cast<int>(mol.size()); ++i) {
    const Atom& a = mol.atom(i);
    mw += atomic_mass(a.element);
    if (a.element != Element::H) mw += (a.explicit_h_count + implicit_hydrogens(mol, i)) * atomic_mass(Element::H);
  }
  return mw;
}

MetricsReport recovery_and_diversity(const std::vector<Molecule>& generated, const std::vector<Molecule>& references,
                                     int radius) {
  if (generated.empty()) throw ParameterError("no generated molecules");
  if (references.empty()) throw ParameterError("no reference molecules");
  std::vector<Fingerprint> ref_fp;
  for (const auto& m : references) ref_fp.push_back(fingerprint(m, radius));
  MetricsReport rep;
  double div_sum = 0;
  double mw_sum = 0;
  for (const auto& g : generated) {
    const Fingerprint fg = fingerprint(g, radius);
    std::vector<double> row;
    double best = 0;
    for (const auto& fr : ref_fp) {
      const double t = tanimoto(fg, fr);
      row.push_back(t);
      best = std::max(best, t);
      if (t > kRecoveryThreshold) rep.recovered = true;
    }
    div_sum += best;
    mw_sum += molecular_weight(g);
    rep.pairs.push_back(std::move(row));
  }
  rep.div = div_sum / static_cast<double>(generated.size());
  rep.mean_mw = mw_sum / static_cast<double>(generated.size());
  return rep;
}

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["recovered"] = report.recovered;
  j["div"] = report.div;
  j["mean_mw"] = report.mean_mw;
  j["pairs"] = report.pairs;
  return j.dump() + "\n";
}

}  // namespace edmol
