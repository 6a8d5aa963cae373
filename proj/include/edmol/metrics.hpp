#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edmol/molecule.hpp"

namespace edmol {

inline constexpr double kRecoveryThreshold = 0.5;  // strictly greater recovers

// Unfolded circular fingerprint: sorted unique 32-bit environment ids from
// rounds 0..radius over heavy atoms.
struct Fingerprint {
  std::vector<std::uint32_t> bits;
  int radius = 2;
};

std::uint32_t fnv1a(const std::vector<std::int32_t>& words);

Fingerprint fingerprint(const Molecule& mol, int radius = 2);

// |a & b| / |a | b|, 1 when both are empty.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

// Standard atomic masses including implicit and folded hydrogens.
double molecular_weight(const Molecule& mol);

struct MetricsReport {
  bool recovered = false;
  double div = 0;
  double mean_mw = 0;                      // over generated molecules
  std::vector<std::vector<double>> pairs;  // [generated][reference]
};

MetricsReport recovery_and_diversity(const std::vector<Molecule>& generated, const std::vector<Molecule>& references,
                                     int radius = 2);

// {"recovered": .., "div": .., "mean_mw": .., "pairs": [[..]]}
std::string metrics_to_json(const MetricsReport& report);

}  // namespace edmol
