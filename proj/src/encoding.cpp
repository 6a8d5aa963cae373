#include "edmol/encoding.hpp"

#include <json.hpp>

#include "edmol/error.hpp"
#include "edmol/io.hpp"

namespace edmol {

namespace {

constexpr LatticePoint kNoCoords{kAbsent, kAbsent, kAbsent};
constexpr std::array<int, 3> kNoGeom{kAbsent, kAbsent, kAbsent};

}  // namespace

EncodedSequence encode_molecule(const Molecule& mol, const Vec3& center, const DiscretizationParams& params,
                                int* clamped) {
  params.validate();
  const Molecule heavy = strip_hydrogens(mol);
  const auto events = tokenize(heavy);
  EncodedSequence seq;
  std::vector<int> atom_at(events.size(), -1);
  for (std::size_t j = 0; j < events.size(); ++j) {
    seq.tokens.push_back(events[j].token_id);
    if (!events[j].atom_index) {
      seq.coords.push_back(kNoCoords);
      seq.geom.push_back(kNoGeom);
      continue;
    }
    const int atom = *events[j].atom_index;
    atom_at[j] = atom;
    const Vec3& v0 = heavy.atom(atom).position;
    seq.coords.push_back(discretize_point(v0, center, params, clamped));

    std::array<int, 3> g = kNoGeom;
    const auto anc = trace_ancestors(events, static_cast<int>(j));
    if (anc.r1) {
      Anchors anchors{heavy.atom(atom_at[*anc.r1]).position, std::nullopt, std::nullopt};
      if (anc.r2) anchors.v2 = heavy.atom(atom_at[*anc.r2]).position;
      if (anc.r2 && anc.r3) anchors.v3 = heavy.atom(atom_at[*anc.r3]).position;
      const GeomRecord r = relative_geometry(anchors, v0, params);
      g[0] = r.l_bin;
      if (r.has_theta) g[1] = r.theta_bin;
      if (r.has_phi) g[2] = r.phi_bin;
    }
    seq.geom.push_back(g);
  }
  return seq;
}

EncodedCloud encode_cloud(const LabeledPointCloud& cloud, const Vec3& center, const DiscretizationParams& params) {
  params.validate();
  EncodedCloud out;
  for (const auto& p : cloud.points) {
    out.classes.push_back(static_cast<int>(p.cls));
    out.coords.push_back(discretize_point(p.pos, center, params));
  }
  return out;
}

Molecule decode_sequence(const EncodedSequence& seq, const Vec3& center, const DiscretizationParams& params) {
  const auto events = events_from_ids(seq.tokens);
  Detokenized d = detokenize_with_positions(events);
  for (int a = 0; a < static_cast<int>(d.mol.size()); ++a) {
    const LatticePoint& q = seq.coords.at(d.atom_position[a]);
    if (q[0] < 0 || q[1] < 0 || q[2] < 0) throw InputError("atom token without coordinates");
    d.mol.atom(a).position = dequantize(q, center, params);
  }
  return std::move(d.mol);
}

PreparedMolecule prepare_molecule(const Molecule& mol, const PrepareOptions& options) {
  PreparedMolecule out;
  const DensityGrid grid = molecule_density(mol, options.d_min, options.form_factor, options.padding);
  out.cloud = sample_point_cloud(grid, mol, options.n_points, options.seed, options.d_min);
  out.center = out.cloud.centroid();
  out.encoded_cloud = encode_cloud(out.cloud, out.center, options.discretization);
  out.sequence = encode_molecule(mol, out.center, options.discretization);
  return out;
}

std::string sequence_to_json(const EncodedSequence& seq) {
  nlohmann::ordered_json j;
  j["tokens"] = seq.tokens;
  j["coords"] = seq.coords;
  j["geom"] = seq.geom;
  return j.dump() + "\n";
}

EncodedSequence sequence_from_json(std::string_view text) {
  EncodedSequence seq;
  try {
    const auto j = nlohmann::json::parse(text);
    seq.tokens = j.at("tokens").get<std::vector<int>>();
    seq.coords = j.at("coords").get<std::vector<LatticePoint>>();
    seq.geom = j.at("geom").get<std::vector<std::array<int, 3>>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("encoded sequence: ") + e.what());
  }
  if (seq.coords.size() != seq.tokens.size() || seq.geom.size() != seq.tokens.size()) {
    throw InputError("encoded sequence: tokens, coords and geom differ in length");
  }
  const Vocab& v = Vocab::instance();
  for (int t : seq.tokens) {
    if (t < 0 || t >= v.size()) throw InputError("encoded sequence: token id " + std::to_string(t) + " out of range");
  }
  return seq;
}

EncodedSequence read_sequence_file(const std::string& path) { return sequence_from_json(read_text_file(path)); }

void write_sequence_file(const std::string& path, const EncodedSequence& seq) {
  write_text_file(path, sequence_to_json(seq));
}

}  // namespace edmol
