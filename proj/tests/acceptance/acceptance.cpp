// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status
// is nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "edmol/density.hpp"
#include "edmol/encoding.hpp"
#include "edmol/fsmiles.hpp"
#include "edmol/generate.hpp"
#include "edmol/geom.hpp"
#include "edmol/io.hpp"
#include "edmol/metrics.hpp"
#include "edmol/model.hpp"
#include "edmol/perception.hpp"
#include "edmol/sdf.hpp"
#include "edmol/smiles.hpp"
#include "edmol/train.hpp"
#include "fingerprint_oracle.hpp"
#include "geom_oracles.hpp"
#include "isomorphism.hpp"
#include "model_fixtures.hpp"
#include "oracles.hpp"
#include "test_data.hpp"

using namespace edmol;
using namespace edmol::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int electron_count(const Molecule& m) {
  int n = 0;
  for (const Atom& a : m.atoms()) n += atomic_number(a.element);
  return n;
}

std::vector<std::string> corpus() {
  std::ifstream in(data_path("corpus100.smi"));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::vector<Molecule> random_molecules() {
  Rng rng(2024);
  std::vector<Molecule> out;
  for (int i = 0; i < 50; ++i) out.push_back(random_molecule(rng, 1 + static_cast<int>(rng.below(8))));
  return out;
}

// 1. Pipeline density against the atoms x Miller double sum.
Verdict fourier_oracle() {
  Verdict v;
  const auto t0 = Clock::now();
  Rng rng(77);
  double worst_rel = 0, worst_friedel = 0;
  int f0_bad = 0;
  for (const Molecule& m : random_molecules()) {
    const Cell cell = build_cell(m);
    const auto sf = structure_factors(m, cell, kDefaultDMin);
    std::map<std::array<int, 3>, std::complex<double>> by_hkl;
    for (const auto& e : sf.entries) by_hkl[{e.hkl.h, e.hkl.k, e.hkl.l}] = e.value;
    for (const auto& [hkl, f] : by_hkl) {
      const auto mate = by_hkl.find({-hkl[0], -hkl[1], -hkl[2]});
      if (mate == by_hkl.end()) {
        worst_friedel = INFINITY;
        continue;
      }
      worst_friedel = std::max(worst_friedel, std::abs(mate->second - std::conj(f)));
    }
    const auto f0 = by_hkl.find({0, 0, 0});
    if (f0 == by_hkl.end() || f0->second != std::complex<double>(electron_count(m), 0.0)) ++f0_bad;

    const DensityGrid grid = density_from_factors(sf, grid_dims_for(cell, kDefaultDMin));
    for (int t = 0; t < 20; ++t) {
      const std::size_t idx = rng.below(grid.size());
      const double ref = brute_density(m, cell, kDefaultDMin, grid.node_position(idx));
      worst_rel = std::max(worst_rel, std::abs(grid.values[idx] - ref) / std::abs(ref));
    }
  }
  const double dt = seconds_since(t0);
  v.require(worst_rel <= 1e-8, "density relative error " + fmt("%.3g", worst_rel));
  v.require(worst_friedel <= 1e-12, "Friedel error " + fmt("%.3g", worst_friedel));
  v.require(f0_bad == 0, std::to_string(f0_bad) + " molecules with F(000) != sum Z");
  v.require(dt < 60, "runtime " + fmt("%.1f s", dt));
  if (v.pass) {
    v.detail = "1000 nodes, max rel err " + fmt("%.2g", worst_rel) + ", Friedel " + fmt("%.2g", worst_friedel) +
               ", F(000) exact, " + fmt("%.2f s", dt);
  }
  return v;
}

// 2. Sum of rho times voxel volume equals the electron count.
Verdict dc_identity() {
  Verdict v;
  std::vector<Molecule> mols = random_molecules();
  for (const auto& m : read_sdf_file(data_path("train20.sdf"))) mols.push_back(m);
  mols.push_back(read_sdf_file(data_path("ethanol.sdf")).at(0));
  double worst = 0;
  for (const Molecule& m : mols) {
    const DensityGrid grid = molecule_density(m);
    const double sum = std::accumulate(grid.values.begin(), grid.values.end(), 0.0) * grid.voxel_volume();
    const double z = electron_count(m);
    worst = std::max(worst, std::abs(sum - z) / z);
  }
  v.require(worst <= 1e-6, "relative error " + fmt("%.3g", worst));
  if (v.pass) v.detail = std::to_string(mols.size()) + " molecules, max rel err " + fmt("%.2g", worst);
  return v;
}

// 3. detokenize(tokenize(m)) is isomorphic to m; no fragment below 3 atoms.
Verdict tokenizer_roundtrip() {
  Verdict v;
  const auto t0 = Clock::now();
  int ok = 0, small = 0, total = 0;
  for (const auto& s : corpus()) {
    ++total;
    const Molecule m = parse_smiles(s);
    for (const auto& f : fragment(m).fragments) small += f.size() < 3;
    try {
      if (isomorphic(detokenize(events_from_ids(token_ids(tokenize(m)))), m)) ++ok;
    } catch (const std::exception&) {
    }
  }
  const double dt = seconds_since(t0);
  v.require(total == 100 && ok == 100, std::to_string(ok) + "/" + std::to_string(total) + " isomorphic");
  v.require(small == 0, std::to_string(small) + " fragments with < 3 heavy atoms");
  v.require(dt < 10, "runtime " + fmt("%.1f s", dt));
  if (v.pass) v.detail = "100/100 isomorphic, no small fragments, " + fmt("%.2f s", dt);
  return v;
}

// 4. Geometry codec roundtrip, quantization and feasible-set equality.
Verdict geometry_codec() {
  Verdict v;
  Rng rng(41);
  double worst_rt = 0;
  for (int i = 0; i < 1000; ++i) {
    const Frame4 f = random_anchors(rng);
    const double l = 0.8 + 1.5 * rng.uniform();
    const double theta = 1.0 + 178.0 * rng.uniform();
    const double phi = 360.0 * rng.uniform();
    const Vec3 p = reconstruct_position(f.v3, f.v2, f.v1, l, theta, phi);
    // Measured independently of the library.
    worst_rt = std::max({worst_rt, std::abs((p - f.v1).norm() - l), std::abs(oracle_angle(f.v2, f.v1, p) - theta),
                         ang_diff(oracle_dihedral(f.v3, f.v2, f.v1, p), phi)});
  }
  v.require(worst_rt < 1e-9, "roundtrip residual " + fmt("%.3g", worst_rt));

  const DiscretizationParams params;
  double worst_q = 0;
  const Vec3 center(0.3, -0.7, 1.1);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 x = center + Vec3(20 * rng.uniform() - 10, 20 * rng.uniform() - 10, 20 * rng.uniform() - 10);
    worst_q = std::max(worst_q, (dequantize(discretize_point(x, center, params), center) - x).cwiseAbs().maxCoeff());
  }
  v.require(worst_q <= 0.05 + 1e-12, "quantization error " + fmt("%.4g", worst_q));

  const ToleranceConfig tol;
  int equal = 0;
  for (int c = 0; c < 100; ++c) {
    const Frame4 f = random_anchors(rng);
    const Vec3 cen(rng.uniform() - 0.5, rng.uniform() - 0.5, rng.uniform() - 0.5);
    const int mode = c % 3;
    Anchors a;
    a.v1 = f.v1;
    if (mode >= 1) a.v2 = f.v2;
    if (mode >= 2) a.v3 = f.v3;
    GeomRecord bins;
    bins.has_l = true;
    bins.has_theta = mode >= 1;
    bins.has_phi = mode >= 2;
    bins.l_bin = 10 + static_cast<int>(rng.below(10));
    bins.theta_bin = bins.has_theta ? static_cast<int>(rng.below(18)) : 0;
    bins.phi_bin = bins.has_phi ? static_cast<int>(rng.below(36)) : 0;
    const double l = (bins.l_bin + 0.5) * params.sigma;
    const double th = (bins.theta_bin + 0.5) * params.angle_bin;
    const double ph = (bins.phi_bin + 0.5) * params.angle_bin;
    std::set<LatticePoint> expected;
    const LatticePoint q1 = discretize_point(f.v1, cen, params);
    const int half = static_cast<int>(std::ceil((l + tol.delta_l) / params.sigma)) + 2;
    for (int x = q1[0] - half; x <= q1[0] + half; ++x)
      for (int y = q1[1] - half; y <= q1[1] + half; ++y)
        for (int z = q1[2] - half; z <= q1[2] + half; ++z) {
          const LatticePoint q{x, y, z};
          const Vec3 p = dequantize(q, cen, params);
          if (std::abs((p - f.v1).norm() - l) > tol.delta_l) continue;
          if (mode >= 1 && std::abs(oracle_angle(f.v2, f.v1, p) - th) > tol.delta_theta) continue;
          if (mode >= 2 && ang_diff(oracle_dihedral(f.v3, f.v2, f.v1, p), ph) > tol.delta_phi) continue;
          expected.insert(q);
        }
    const auto got = feasible_lattice_points(a, bins, tol, params, cen);
    const bool same = expected.empty() ? got.fallback
                                       : !got.fallback && std::set<LatticePoint>(got.points.begin(), got.points.end()) == expected;
    equal += same;
  }
  v.require(equal == 100, std::to_string(equal) + "/100 feasible sets equal");
  if (v.pass) {
    v.detail = "roundtrip " + fmt("%.2g", worst_rt) + ", quantization " + fmt("%.4f A", worst_q) +
               ", 100/100 feasible sets equal";
  }
  return v;
}

std::vector<const TrainingExample*> pointers(const std::vector<TrainingExample>& data) {
  std::vector<const TrainingExample*> out;
  for (const auto& e : data) out.push_back(&e);
  return out;
}

// 5. Analytic gradients against central differences.
Verdict gradient_check_all() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto data = small_examples(2, 6);
  const auto r = gradient_check(gradcheck_params(17), pointers(data), 3, 5);
  const double dt = seconds_since(t0);
  std::size_t worst = 0;
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    if (r.max_rel_error[i] > r.max_rel_error[worst]) worst = i;
  }
  v.require(r.worst() < 1e-4, "max rel error " + fmt("%.3g", r.worst()) + " in " + r.names[worst]);
  v.require(dt < 30, "runtime " + fmt("%.1f s", dt));
  if (v.pass) {
    v.detail = std::to_string(r.names.size()) + " tensors, " + std::to_string(r.checked) + " entries, max rel err " +
               fmt("%.2g", r.worst()) + ", " + fmt("%.1f s", dt);
  }
  return v;
}

// 6. Zeroed heads give the sum of log vocabulary sizes.
Verdict untrained_loss() {
  Verdict v;
  const auto data = small_examples(20, 8);
  ModelParams<double> p = init_params<double>(ModelConfig::toy(), 0);
  for (int h = 0; h < kNumHeads; ++h) p[p.head(h)].setZero();
  const auto loss = loss_and_grad<double>(p, pointers(data), nullptr);
  double expected = 0;
  for (int h = 0; h < kNumHeads; ++h) {
    expected += std::log(static_cast<double>(head_size(p.config, h)));
    v.require(loss.head_count[h] > 0, std::string("no targets for head ") + kHeadNames[h]);
  }
  v.require(std::abs(loss.total - expected) <= 1e-3,
            "loss " + fmt("%.6f", loss.total) + " vs " + fmt("%.6f", expected));
  if (v.pass) v.detail = "loss " + fmt("%.6f", loss.total) + ", expected " + fmt("%.6f", expected);
  return v;
}

struct CompleteRollout {
  GenerationResult result;
  Vec3 center;
};

// 7. Overfit the toy model and regenerate the training molecules.
Verdict overfit_and_memorize(std::vector<CompleteRollout>& complete) {
  Verdict v;
  const auto mols = read_sdf_file(data_path("train20.sdf"));
  std::vector<PreparedMolecule> prep;
  std::vector<TrainingExample> data;
  for (const auto& m : mols) {
    prep.push_back(prepare_molecule(m));
    data.push_back(make_example(prep.back().encoded_cloud, prep.back().sequence));
  }
  TrainConfig cfg;
  cfg.seed = 0;
  cfg.eval_every = 100;
  cfg.target_token_ce = 0.1;
  const auto t0 = Clock::now();
  const TrainResult r = train(data, ModelConfig::toy(), cfg);
  const double dt = seconds_since(t0);
  const double ce = evaluate(r.params, data).head_ce[kTokenHead];
  v.require(ce < 0.1, "token CE " + fmt("%.4f", ce));
  v.require(r.steps_run <= 3000, "steps " + std::to_string(r.steps_run));
  v.require(dt < 15 * 60, "training time " + fmt("%.0f s", dt));

  GenerationConfig g;
  g.temperature = 0.05;
  int hits = 0;
  for (const auto& p : prep) {
    bool hit = false;
    for (std::uint64_t s = 0; s < 10 && !hit; ++s) {
      auto res = generate_one(p.encoded_cloud, p.center, r.params, g, s);
      hit = res.status == GenerationStatus::Complete && res.sequence.tokens == p.sequence.tokens;
      if (res.status == GenerationStatus::Complete) complete.push_back({std::move(res), p.center});
    }
    hits += hit;
  }
  v.require(2 * hits >= static_cast<int>(prep.size()),
            std::to_string(hits) + "/" + std::to_string(prep.size()) + " molecules reproduced");
  // More varied samples for the constraint check.
  g.temperature = 0.7;
  for (std::size_t i = 0; i < prep.size(); i += 4) {
    for (std::uint64_t s = 100; s < 110; ++s) {
      auto res = generate_one(prep[i].encoded_cloud, prep[i].center, r.params, g, s);
      if (res.status == GenerationStatus::Complete) complete.push_back({std::move(res), prep[i].center});
    }
  }
  if (v.pass) {
    v.detail = "token CE " + fmt("%.4f", ce) + " after " + std::to_string(r.steps_run) + " steps (" +
               fmt("%.0f s", dt) + "), " + std::to_string(hits) + "/20 reproduced";
  }
  return v;
}

// 8. Residuals of complete generations, recomputed from the token sequence.
Verdict constraint_satisfaction(const std::vector<CompleteRollout>& complete) {
  Verdict v;
  const DiscretizationParams dp;
  const ToleranceConfig tol;
  int atoms = 0, bad = 0, constrained = 0;
  for (const auto& [res, center] : complete) {
    const auto events = events_from_ids(res.sequence.tokens);
    for (int i = 0; i < static_cast<int>(events.size()); ++i) {
      if (events[i].kind != TokenKind::Atom) continue;
      ++atoms;
      const auto anc = trace_ancestors(events, i);
      if (!anc.r1) continue;
      ++constrained;
      const auto& bins = res.sequence.geom[i];
      auto pos = [&](int k) { return dequantize(res.sequence.coords[k], center, dp); };
      const Vec3 p = pos(i);
      bool ok = bins[0] >= 0 &&
                std::abs((p - pos(*anc.r1)).norm() - (bins[0] + 0.5) * dp.sigma) <= tol.delta_l + dp.sigma + 1e-9;
      if (anc.r2) {
        ok = ok && bins[1] >= 0 &&
             std::abs(oracle_angle(pos(*anc.r2), pos(*anc.r1), p) - (bins[1] + 0.5) * dp.angle_bin) <=
                 tol.delta_theta + dp.angle_bin / 2 + 1e-9;
      }
      if (anc.r3) {
        const Vec3 v3 = pos(*anc.r3), v2 = pos(*anc.r2), v1 = pos(*anc.r1);
        ok = ok && bins[2] >= 0;
        // The dihedral is undefined when the first three atoms are collinear.
        if (!degenerate_frame(v3, v2, v1)) {
          ok = ok && ang_diff(oracle_dihedral(v3, v2, v1, p), (bins[2] + 0.5) * dp.angle_bin) <=
                         tol.delta_phi + dp.angle_bin / 2 + 1e-9;
        }
      }
      bad += !ok;
    }
  }
  v.require(!complete.empty(), "no complete generations");
  v.require(bad == 0, std::to_string(bad) + "/" + std::to_string(constrained) + " atoms outside tolerance");
  if (v.pass) {
    v.detail = std::to_string(complete.size()) + " complete molecules, " + std::to_string(constrained) + "/" +
               std::to_string(atoms) + " constrained atoms all within tolerance";
  }
  return v;
}

// 9. Every CLI command twice with the same seed, compared byte for byte.
Verdict cli_determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "edmol_acceptance_cli";
  fs::remove_all(root);
  auto run_in = [&](const fs::path& dir, std::vector<std::string> args) {
    std::vector<std::string> full = {"edmol"};
    for (auto& a : args) {
      if (a.rfind("@", 0) == 0) a = (dir / a.substr(1)).string();
      full.push_back(a);
    }
    std::vector<const char*> argv;
    for (const auto& a : full) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return std::to_string(code) + "\n" + out.str() + err.str();
  };
  const auto mols = read_sdf_file(data_path("train20.sdf"));
  std::vector<std::vector<std::string>> commands;
  for (int i = 0; i < 3; ++i) {
    const std::string n = "m" + std::to_string(i);
    commands.push_back({"density", "--in", "@" + n + ".sdf", "--out", "@" + n + ".grid"});
    commands.push_back({"pointcloud", "--grid", "@" + n + ".grid", "--mol", "@" + n + ".sdf", "--n", "40", "--seed",
                        "9", "--out", "@data/" + n + ".cloud.json"});
    commands.push_back({"encode", "--sdf", "@" + n + ".sdf", "--pointcloud", "@data/" + n + ".cloud.json", "--out",
                        "@data/" + n + ".seq.json"});
  }
  commands.push_back({"density", "--in", "@m0.sdf", "--form-factor", "gaussian", "--out", "@g.grid"});
  commands.push_back({"tokenize", "--smiles", "c1ccccc1CCCc1ccncc1"});
  commands.push_back({"detokenize", "--in", "@data/m1.seq.json"});
  commands.push_back({"train", "--data", "@data", "--config", "@cfg.json", "--out", "@model.ckpt", "--log",
                      "@train.csv", "--seed", "4"});
  commands.push_back({"generate", "--ckpt", "@model.ckpt", "--pointcloud", "@data/m0.cloud.json", "--config",
                      "@cfg.json", "--n", "6", "--temperature", "1.0", "--seed", "2", "--out", "@gen.sdf"});
  commands.push_back({"eval", "--gen", "@m0.sdf", "--ref", "@ref.smi", "--out", "@metrics.json"});

  std::vector<std::vector<std::string>> transcripts(2);
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / ("run" + std::to_string(run));
    fs::create_directories(dir / "data");
    for (int i = 0; i < 3; ++i) write_sdf_file((dir / ("m" + std::to_string(i) + ".sdf")).string(), {mols[i]});
    write_text_file((dir / "cfg.json").string(),
                    R"({"preset": "toy", "n_layer": 1, "n_embd": 32, "n_ctx": 80, "steps": 30, "batch_size": 3})");
    write_text_file((dir / "ref.smi").string(), "CCO\nc1ccccc1\n");
    for (const auto& c : commands) transcripts[run].push_back(run_in(dir, c));
  }
  int failed_commands = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (transcripts[0][i].rfind("0\n", 0) != 0) {
      v.require(false, commands[i][0] + " failed: " + transcripts[0][i]);
      ++failed_commands;
    }
    if (transcripts[0][i] != transcripts[1][i]) v.require(false, commands[i][0] + " output differs");
  }
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root / "run0")) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root / "run0").string());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    if (!fs::exists(root / "run1" / f) ||
        read_text_file((root / "run0" / f).string()) != read_text_file((root / "run1" / f).string())) {
      v.require(false, f + " differs");
    }
  }
  fs::remove_all(root);
  if (v.pass) {
    v.detail = std::to_string(commands.size()) + " commands, " + std::to_string(files.size()) +
               " output files identical across runs";
  }
  return v;
}

// 10. Tanimoto matrix and the strict recovery threshold.
Verdict metrics_oracle() {
  Verdict v;
  const std::vector<const char*> gen = {"CCO", "c1ccccc1C(=O)O", "CC(N)C(=O)O"};
  const std::vector<const char*> ref = {"CCCO", "c1ccccc1C(=O)N"};
  std::vector<Molecule> g, r;
  for (const char* s : gen) g.push_back(parse_smiles(s));
  for (const char* s : ref) r.push_back(parse_smiles(s));
  const MetricsReport rep = recovery_and_diversity(g, r);
  int mismatches = 0;
  bool recovered = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double t = oracle_tanimoto(environment_strings(g[i], 2), environment_strings(r[j], 2));
      mismatches += rep.pairs.at(i).at(j) != t;
      recovered = recovered || t > 0.5;
    }
  }
  v.require(mismatches == 0, std::to_string(mismatches) + "/6 Tanimoto entries differ from the oracle");
  v.require(rep.recovered == recovered, "recovered flag differs from the oracle");

  // A pair at exactly 0.5 must not count as recovered.
  const std::vector<const char*> pool = {"C",   "CC",    "CCC",   "CCCC",   "CCCCC", "CO",   "CCO",  "CCCO",
                                         "CN",  "CCN",   "CCCN",  "OCCO",   "NCCN",  "CC=O", "CCC=O", "CC(C)C",
                                         "CC(C)O", "CCOC", "CCCCO", "CCCCN", "C=C",   "C=CC", "CC#N", "FCCF"};
  std::vector<Molecule> mols;
  for (const char* s : pool) mols.push_back(parse_smiles(s));
  int boundary_pairs = 0, boundary_bad = 0;
  for (std::size_t i = 0; i < mols.size(); ++i) {
    for (std::size_t j = 0; j < mols.size(); ++j) {
      if (i == j) continue;
      const double t = oracle_tanimoto(environment_strings(mols[i], 2), environment_strings(mols[j], 2));
      if (t != 0.5) continue;
      ++boundary_pairs;
      const auto at = recovery_and_diversity({mols[i]}, {mols[j]});
      boundary_bad += at.recovered || at.pairs[0][0] != 0.5;
    }
  }
  v.require(boundary_pairs > 0, "no pair at exactly 0.5 found");
  v.require(boundary_bad == 0, std::to_string(boundary_bad) + " boundary pairs counted as recovered");
  if (v.pass) {
    v.detail = "3x2 matrix matches oracle, " + std::to_string(boundary_pairs) +
               " pairs at exactly 0.5 not recovered";
  }
  return v;
}

}  // namespace

int main() {
  std::vector<CompleteRollout> complete;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"Fourier oracle", fourier_oracle},
      {"DC identity", dc_identity},
      {"Tokenizer roundtrip", tokenizer_roundtrip},
      {"Geometry codec", geometry_codec},
      {"Gradient check", gradient_check_all},
      {"Untrained-loss identity", untrained_loss},
      {"Toy overfit + memorization", [&] { return overfit_and_memorize(complete); }},
      {"Constraint satisfaction", [&] { return constraint_satisfaction(complete); }},
      {"CLI determinism", cli_determinism},
      {"Metrics oracle", metrics_oracle},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << v.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
