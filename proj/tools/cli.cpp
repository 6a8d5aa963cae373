#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "edmol/checkpoint.hpp"
#include "edmol/density.hpp"
#include "edmol/error.hpp"
#include "edmol/grid_io.hpp"
#include "edmol/io.hpp"
#include "edmol/metrics.hpp"
#include "edmol/run_config.hpp"
#include "edmol/sdf.hpp"
#include "edmol/smiles.hpp"

namespace edmol::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

FormFactorMode parse_form_factor(const std::string& s) {
  if (s == "constant_z") return FormFactorMode::ConstantZ;
  if (s == "gaussian") return FormFactorMode::Gaussian;
  throw ParameterError("form factor must be constant_z or gaussian");
}

Molecule first_record(const std::string& path) {
  auto mols = read_sdf_file(path);
  if (mols.empty()) throw InputError("no records in '" + path + "'");
  return std::move(mols.front());
}

RunConfig load_config(const std::string& path) { return path.empty() ? RunConfig{} : read_run_config(path); }

// NAME.seq.json + NAME.cloud.json pairs, sorted by NAME.
std::vector<TrainingExample> load_training_dir(const std::string& dir, const DiscretizationParams& disc,
                                               std::ostream& out) {
  if (!fs::is_directory(dir)) throw InputError("'" + dir + "' is not a directory");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string file = entry.path().filename().string();
    const std::string suffix = ".seq.json";
    if (file.size() > suffix.size() && file.compare(file.size() - suffix.size(), suffix.size(), suffix) == 0) {
      names.push_back(file.substr(0, file.size() - suffix.size()));
    }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw InputError("no *.seq.json files in '" + dir + "'");
  std::vector<TrainingExample> data;
  for (const auto& name : names) {
    const fs::path base = fs::path(dir) / name;
    const EncodedSequence seq = read_sequence_file(base.string() + ".seq.json");
    const LabeledPointCloud cloud = read_point_cloud_file(base.string() + ".cloud.json");
    data.push_back(make_example(encode_cloud(cloud, cloud.centroid(), disc), seq));
  }
  out << "loaded " << data.size() << " training pairs\n";
  return data;
}

std::vector<Molecule> read_smiles_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<Molecule> mols;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cut = line.find_first_of(" \t");
    const std::string smi = line.substr(0, cut);
    if (smi.empty()) continue;
    try {
      mols.push_back(parse_smiles(smi));
    } catch (const ParseError& e) {
      throw InputError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return mols;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Electron-density-conditioned molecule generation toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");

  // density
  std::string d_in, d_out, d_ff = "constant_z";
  double d_min = kDefaultDMin, d_pad = kDefaultPadding, d_b = 20.0;
  auto* density = app.add_subcommand("density", "Truncated Fourier density of the first SDF record");
  density->add_option("--in", d_in, "Input SDF")->required();
  density->add_option("--d-min", d_min, "Resolution cutoff in Angstrom")->capture_default_str();
  density->add_option("--form-factor", d_ff, "constant_z or gaussian")->capture_default_str();
  density->add_option("--b-factor", d_b, "Gaussian smearing B in A^2")->capture_default_str();
  density->add_option("--padding", d_pad, "Cell padding around the molecule in Angstrom")->capture_default_str();
  density->add_option("--out", d_out, "Output grid file")->required();

  // pointcloud
  std::string p_grid, p_mol, p_out;
  int p_n = kDefaultNumPoints;
  std::uint64_t p_seed = 0;
  double p_dmin = kDefaultDMin;
  auto* pointcloud = app.add_subcommand("pointcloud", "Sample a labeled point cloud from a density grid");
  pointcloud->add_option("--grid", p_grid, "Grid file from density")->required();
  pointcloud->add_option("--mol", p_mol, "SDF used for pharmacophore labels")->required();
  pointcloud->add_option("--n", p_n, "Number of points")->capture_default_str();
  pointcloud->add_option("--seed", p_seed, "Random seed")->capture_default_str();
  pointcloud->add_option("--d-min", p_dmin, "Resolution recorded in the output")->capture_default_str();
  pointcloud->add_option("--out", p_out, "Output JSON")->required();

  // encode
  std::string e_sdf, e_cloud, e_out;
  auto* encode = app.add_subcommand("encode", "Encode a 3D molecule as tokens, lattice coordinates and geometry bins");
  encode->add_option("--sdf", e_sdf, "Input SDF (first record)")->required();
  encode->add_option("--pointcloud", e_cloud,
                     "Conditioning cloud; its centroid centers the lattice (default: heavy-atom mean)");
  encode->add_option("--out", e_out, "Output JSON")->required();

  // tokenize
  std::string t_smiles;
  auto* tokenize_cmd = app.add_subcommand("tokenize", "Print the FSMILES tokens of a SMILES string");
  tokenize_cmd->add_option("--smiles", t_smiles, "Input SMILES")->required();

  // detokenize
  std::string k_in, k_tokens;
  auto* detokenize_cmd = app.add_subcommand("detokenize", "Rebuild SMILES from an encoded sequence or token list");
  auto* k_in_opt = detokenize_cmd->add_option("--in", k_in, "Encoded sequence JSON");
  auto* k_tok_opt = detokenize_cmd->add_option("--tokens", k_tokens, "Space-separated token names");
  k_in_opt->excludes(k_tok_opt);
  detokenize_cmd->require_option(1);

  // train
  std::string r_data, r_config, r_out, r_log;
  std::optional<std::uint64_t> r_seed;
  auto* train_cmd = app.add_subcommand("train", "Train the model on encoded sequence / point cloud pairs");
  train_cmd->add_option("--data", r_data, "Directory of NAME.seq.json + NAME.cloud.json pairs")->required();
  train_cmd->add_option("--config", r_config, "Run config JSON (default: toy preset)");
  train_cmd->add_option("--out", r_out, "Output checkpoint")->required();
  train_cmd->add_option("--log", r_log, "CSV log of step,loss");
  train_cmd->add_option("--seed", r_seed, "Seed (overrides the config)");

  // generate
  std::string g_ckpt, g_cloud, g_out, g_config, g_report;
  std::optional<int> g_n;
  std::optional<double> g_temp;
  std::optional<std::uint64_t> g_seed;
  auto* generate_cmd = app.add_subcommand("generate", "Generate molecules conditioned on a point cloud");
  generate_cmd->add_option("--ckpt", g_ckpt, "Checkpoint from train")->required();
  generate_cmd->add_option("--pointcloud", g_cloud, "Conditioning point cloud JSON")->required();
  generate_cmd->add_option("--n", g_n, "Number of rollouts (default 10)");
  generate_cmd->add_option("--temperature", g_temp, "Sampling temperature (default 0.7)");
  generate_cmd->add_option("--seed", g_seed, "Seed; rollout i uses seed + i (default 0)");
  generate_cmd->add_option("--config", g_config, "Run config JSON (default: toy preset)");
  generate_cmd->add_option("--out", g_out, "Output SDF of complete molecules")->required();
  generate_cmd->add_option("--report", g_report, "JSON sidecar (default: OUT.json)");

  // eval
  std::string v_gen, v_ref, v_out;
  auto* eval_cmd = app.add_subcommand("eval", "Recovery, diversity and molecular weight of generated molecules");
  eval_cmd->add_option("--gen", v_gen, "Generated SDF")->required();
  eval_cmd->add_option("--ref", v_ref, "Reference SMILES, one per line")->required();
  eval_cmd->add_option("--out", v_out, "Output JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*density) {
      if (!(d_min > 0)) throw ParameterError("--d-min must be positive");
      const Molecule mol = first_record(d_in);
      FormFactorModel ff{parse_form_factor(d_ff), d_b};
      const Cell cell = build_cell(mol, d_pad);
      const StructureFactorSet sf = structure_factors(mol, cell, d_min, ff);
      const DensityGrid grid = density_from_factors(sf, grid_dims_for(cell, d_min));
      write_grid_file(d_out, grid);
      double sum = 0;
      for (double v : grid.values) sum += v;
      int electrons = 0;
      for (const Atom& a : mol.atoms()) electrons += atomic_number(a.element);
      out << "miller " << sf.entries.size() << "\n";
      out << "dims " << grid.dims[0] << " " << grid.dims[1] << " " << grid.dims[2] << "\n";
      out << "sum_rho_dv " << fmt(sum * grid.voxel_volume()) << "\n";
      out << "electrons " << electrons << "\n";
    } else if (*pointcloud) {
      if (p_n < 1) throw ParameterError("--n must be positive");
      const DensityGrid grid = read_grid_file(p_grid);
      const Molecule mol = first_record(p_mol);
      const LabeledPointCloud cloud = sample_point_cloud(grid, mol, p_n, p_seed, p_dmin);
      write_point_cloud_file(p_out, cloud);
      out << "points " << cloud.n() << "\n";
    } else if (*encode) {
      const Molecule mol = first_record(e_sdf);
      Vec3 center = Vec3::Zero();
      if (!e_cloud.empty()) {
        center = read_point_cloud_file(e_cloud).centroid();
      } else {
        const Molecule heavy = strip_hydrogens(mol);
        for (const Atom& a : heavy.atoms()) center += a.position;
        center /= static_cast<double>(heavy.size());
      }
      int clamped = 0;
      const EncodedSequence seq = encode_molecule(mol, center, {}, &clamped);
      write_sequence_file(e_out, seq);
      out << "tokens " << seq.size() << "\n";
      if (clamped > 0) out << "clamped " << clamped << "\n";
    } else if (*tokenize_cmd) {
      out << events_to_string(tokenize(parse_smiles(t_smiles))) << "\n";
    } else if (*detokenize_cmd) {
      std::vector<int> ids;
      if (!k_in.empty()) {
        ids = read_sequence_file(k_in).tokens;
      } else {
        std::istringstream in(k_tokens);
        std::string tok;
        while (in >> tok) ids.push_back(Vocab::instance().id(tok));
      }
      out << write_smiles(detokenize(events_from_ids(ids))) << "\n";
    } else if (*train_cmd) {
      RunConfig cfg = load_config(r_config);
      if (r_seed) cfg.train.seed = *r_seed;
      const auto data = load_training_dir(r_data, cfg.data.discretization, out);
      std::string log = "step,loss\n";
      const TrainResult result = train(data, cfg.model, cfg.train, [&](const TrainLogEntry& e, const ModelParams<float>&) {
        log += std::to_string(e.step) + "," + fmt(e.loss) + "\n";
      });
      save_checkpoint(result.params, r_out);
      if (!r_log.empty()) write_text_file(r_log, log);
      const LossBreakdown final_loss = evaluate(result.params, data);
      out << "steps " << result.steps_run << "\n";
      out << "final_loss " << fmt(final_loss.total) << "\n";
      out << "final_token_ce " << fmt(final_loss.head_ce[kTokenHead]) << "\n";
    } else if (*generate_cmd) {
      RunConfig cfg = load_config(g_config);
      GenerationConfig gen = cfg.generation;
      if (g_n) gen.n_samples = *g_n;
      if (g_temp) gen.temperature = *g_temp;
      if (g_seed) gen.seed = *g_seed;
      const ModelParams<float> params = load_checkpoint(g_ckpt, cfg.model);
      const LabeledPointCloud cloud = read_point_cloud_file(g_cloud);
      const auto results = generate(cloud, params, gen);
      std::vector<Molecule> complete;
      std::map<std::string, int> counts;
      for (std::size_t i = 0; i < results.size(); ++i) {
        ++counts[std::string(status_name(results[i].status))];
        if (results[i].status != GenerationStatus::Complete) continue;
        Molecule m = results[i].molecule;
        m.name = "gen_" + std::to_string(i);
        complete.push_back(std::move(m));
      }
      write_sdf_file(g_out, complete);
      write_text_file(g_report.empty() ? g_out + ".json" : g_report, generation_report_json(results));
      for (const auto& [status, n] : counts) out << status << " " << n << "\n";
    } else if (*eval_cmd) {
      const auto gen = read_sdf_file(v_gen);
      const auto ref = read_smiles_file(v_ref);
      const MetricsReport rep = recovery_and_diversity(gen, ref);
      write_text_file(v_out, metrics_to_json(rep));
      out << "recovered " << (rep.recovered ? "true" : "false") << "\n";
      out << "div " << fmt(rep.div) << "\n";
    }
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace edmol::cli
