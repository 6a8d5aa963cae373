#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "edmol/fsmiles.hpp"
#include "edmol/geom.hpp"
#include "edmol/point_cloud.hpp"

namespace edmol {

inline constexpr int kAbsent = -1;

// Per-token encoding. Non-atom tokens have coords and geom all kAbsent;
// atoms without a given anchor have that geom field kAbsent.
struct EncodedSequence {
  std::vector<int> tokens;
  std::vector<LatticePoint> coords;
  std::vector<std::array<int, 3>> geom;  // l, theta, phi bins

  int size() const { return static_cast<int>(tokens.size()); }
};

// Point cloud on the same lattice as the molecule it conditions.
struct EncodedCloud {
  std::vector<int> classes;  // PharmacophoreClass as int
  std::vector<LatticePoint> coords;

  int size() const { return static_cast<int>(classes.size()); }
};

// Strips hydrogens, tokenizes, and discretizes around `center` (the shared
// lattice center, normally the conditioning cloud's centroid).
EncodedSequence encode_molecule(const Molecule& mol, const Vec3& center, const DiscretizationParams& params = {},
                                int* clamped = nullptr);

EncodedCloud encode_cloud(const LabeledPointCloud& cloud, const Vec3& center, const DiscretizationParams& params = {});

// Detokenizes and places atoms at their lattice cell midpoints.
Molecule decode_sequence(const EncodedSequence& seq, const Vec3& center, const DiscretizationParams& params = {});

// Everything a training pair needs from one 3D molecule: density, sampled
// cloud, and the sequence on the cloud-centered lattice.
struct PrepareOptions {
  double d_min = kDefaultDMin;
  FormFactorModel form_factor;
  double padding = kDefaultPadding;
  int n_points = kDefaultNumPoints;
  std::uint64_t seed = 0;
  DiscretizationParams discretization;
};

struct PreparedMolecule {
  LabeledPointCloud cloud;
  Vec3 center = Vec3::Zero();
  EncodedCloud encoded_cloud;
  EncodedSequence sequence;
};

PreparedMolecule prepare_molecule(const Molecule& mol, const PrepareOptions& options = {});

// {"tokens": [..], "coords": [[x,y,z], ..], "geom": [[l,t,p], ..]}
std::string sequence_to_json(const EncodedSequence& seq);
EncodedSequence sequence_from_json(std::string_view text);
EncodedSequence read_sequence_file(const std::string& path);
void write_sequence_file(const std::string& path, const EncodedSequence& seq);

}  // namespace edmol
