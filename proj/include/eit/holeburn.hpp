// holeburn.hpp - idealized spectral hole burning over frequency classes in a
// 3-ground x 3-excited level structure: class-selective pumping, the
// three-stage trench/empty/repump sequence, and conversion of the resulting
// populations into a tabulated optical broadening profile.
#ifndef EIT_HOLEBURN_HPP
#define EIT_HOLEBURN_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "eit/profile.hpp"

namespace eit {

struct LevelStructure {
  std::array<double, 3> ground_offsets{};   // ascending, first must be 0
  std::array<double, 3> excited_offsets{};  // ascending, first must be 0
  std::array<std::array<double, 3>, 3> strengths{};  // [ground][excited]
  double background_fwhm = 0.0;  // optical inhomogeneous FWHM of the ensemble

  void normalize_strength_rows();
  void validate() const;
  double ground_span() const { return ground_offsets[2]; }
  double excited_span() const { return excited_offsets[2]; }
};

struct ClassPopulations {
  std::vector<double> class_offset;             // uniform, ascending
  std::vector<std::array<double, 3>> occupancy; // ground occupancies per class

  double step() const;
  void validate() const;  // conservation to 1e-12, nonnegativity, uniform grid
};

// All classes in thermal equilibrium: occupancy 1/3 per ground state.
ClassPopulations uniform_populations(double span_halfwidth, double step,
                                     double center = 0.0);

struct PumpStep {
  std::vector<double> field_frequencies;  // absolute, relative to the carrier
  double sweep_halfwidth = 0.0;           // each field swept over +-this
  double resonance_tolerance = 0.0;
  double transfer_fraction = 1.0;         // 1 = idealized complete pumping

  void validate() const;
};

struct Resonance {
  double class_offset;
  int ground;
  int excited;
};

struct ResonanceSet {
  std::vector<Resonance> entries;              // one per (ground, excited) pair
  std::vector<std::pair<int, int>> collisions; // entry index pairs within tol
  int distinct_classes = 0;
};

// The nine frequency classes resonant with a single field, one per
// transition: class offset = field - (excited offset - ground offset).
ResonanceSet enumerate_resonances(const LevelStructure& ls, double field_freq,
                                  double tol);

// Three field frequencies that make the target class resonant from each of
// its ground states to the shared excited level.  Guarantees no *other*
// class matches all three fields, except the unavoidable companion classes
// shifted by (shared excited - other excited) which reuse the same ground
// ladder on a different excited level; those are emptied of their
// probe/control population by the burn sequence and are therefore harmless.
// Throws AmbiguousSelection for degenerate splittings.
std::array<double, 3> select_class_fields(const LevelStructure& ls, double target_class,
                                          int shared_excited, double tol = 1e-9);

// A class with all three grounds resonant has nowhere to park population:
// Freeze keeps it unchanged (it keeps cycling), Strict raises NoConvergence.
enum class SaturatedPolicy { Freeze, Strict };

struct PumpReport {
  std::vector<double> saturated_classes;
  int iterations = 0;
};

// Move transfer_fraction of every resonant (class, ground) occupancy to the
// non-resonant grounds of the same class, strength-weighted by the pumped
// excited level's branching; iterated to a fixed point.
ClassPopulations apply_pump_step(const ClassPopulations& pop, const LevelStructure& ls,
                                 const PumpStep& step,
                                 SaturatedPolicy policy = SaturatedPolicy::Freeze,
                                 PumpReport* report = nullptr);

struct BurnOptions {
  int shared_excited = 0;
  int probe_ground = 1;
  int control_ground = 2;
  double span_halfwidth = 0.0;      // 0 -> automatic
  double class_step = 0.0;          // 0 -> feature_fwhm/20 (or trench/50)
  double resonance_tolerance = 0.0; // 0 -> class_step/2
  double transfer_fraction = 1.0;
};

struct BurnReport {
  std::array<double, 3> selection_fields{};
  double probe_frequency = 0.0;
  double control_frequency = 0.0;
  int stage1_saturated = 0;   // classes frozen during the trench burn
  int stage2_saturated = 0;
  // Populated (class, ground) pairs still resonant at the probe or control
  // frequency outside the repumped feature - e.g. when the trench is
  // narrower than the ground-state splittings.
  int probe_control_leaks = 0;
};

struct BurnResult {
  ClassPopulations populations;
  BurnReport report;
};

// Stage 1: trench burn with the three selection fields swept over
// +-trench_halfwidth.  Stage 2: only the probe and control fields remain
// (same sweep) and empty the two lambda grounds into the auxiliary state.
// Stage 3: classes within +-feature_fwhm/2 of the target are repumped into
// the probe ground; the control field keeps the control ground empty.
BurnResult run_burn_sequence(const LevelStructure& ls, double target_class,
                             double trench_halfwidth, double feature_fwhm,
                             const BurnOptions& opt = {});

// Effective optical density on the probe transition: occupancy x transition
// strength x Lorentzian(kernel_fwhm) comb, weighted by the broad background
// distribution of classes, resampled to a uniform grid and renormalized.
// reference_shift recenters the x axis (pass the nominal probe resonance).
BroadeningProfile profile_from_populations(const ClassPopulations& pop,
                                           const LevelStructure& ls, int probe_ground,
                                           double kernel_fwhm,
                                           double reference_shift = 0.0,
                                           double resample_step = 0.0);

void write_populations_csv(const std::string& path, const ClassPopulations& pop);

}  // namespace eit

#endif  // EIT_HOLEBURN_HPP
