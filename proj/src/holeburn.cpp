// holeburn.cpp - frequency-class pumping simulator and profile synthesis
#include "eit/holeburn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eit/csv.hpp"
#include "eit/errors.hpp"

namespace eit {

void LevelStructure::normalize_strength_rows() {
  for (auto& row : strengths) {
    double sum = 0.0;
    for (double v : row) sum += v;
    if (sum > 0.0)
      for (double& v : row) v /= sum;
  }
}

void LevelStructure::validate() const {
  if (ground_offsets[0] != 0.0 || excited_offsets[0] != 0.0)
    throw InvalidParams("LevelStructure: lowest offsets must be 0");
  if (!(ground_offsets[0] < ground_offsets[1] && ground_offsets[1] < ground_offsets[2]))
    throw InvalidParams("LevelStructure: ground offsets must be strictly ascending");
  if (!(excited_offsets[0] < excited_offsets[1] && excited_offsets[1] < excited_offsets[2]))
    throw InvalidParams("LevelStructure: excited offsets must be strictly ascending");
  for (const auto& row : strengths) {
    double sum = 0.0;
    for (double v : row) {
      if (v < 0.0) throw InvalidParams("LevelStructure: strengths must be nonnegative");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      throw InvalidParams("LevelStructure: each strength row must sum to 1");
  }
  if (!(background_fwhm > 0.0))
    throw InvalidParams("LevelStructure: background_fwhm must be > 0");
}

double ClassPopulations::step() const {
  if (class_offset.size() < 2) return 0.0;
  return (class_offset.back() - class_offset.front()) /
         static_cast<double>(class_offset.size() - 1);
}

void ClassPopulations::validate() const {
  if (class_offset.size() != occupancy.size())
    throw InvalidParams("ClassPopulations: offset/occupancy length mismatch");
  if (class_offset.size() < 2)
    throw InvalidParams("ClassPopulations: need at least 2 classes");
  const double h = step();
  if (!(h > 0.0)) throw InvalidParams("ClassPopulations: offsets must ascend");
  for (size_t i = 1; i < class_offset.size(); ++i)
    if (std::fabs(class_offset[i] - class_offset[i - 1] - h) > 1e-6 * h)
      throw NonUniformGrid("ClassPopulations: class grid must be uniform");
  for (const auto& occ : occupancy) {
    double sum = 0.0;
    for (double v : occ) {
      if (v < 0.0) throw NegativeDensity("ClassPopulations: negative occupancy");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw InvalidParams("ClassPopulations: per-class occupancy must sum to 1");
  }
}

ClassPopulations uniform_populations(double span_halfwidth, double step, double center) {
  if (!(span_halfwidth > 0.0) || !(step > 0.0))
    throw InvalidParams("uniform_populations: span and step must be > 0");
  const long n_side = std::lround(span_halfwidth / step);
  if (n_side < 1) throw InvalidParams("uniform_populations: span smaller than step");
  if (2 * n_side + 1 > 4000000)
    throw InvalidParams("uniform_populations: class grid too large");
  ClassPopulations pop;
  pop.class_offset.reserve(2 * n_side + 1);
  for (long i = -n_side; i <= n_side; ++i)
    pop.class_offset.push_back(center + static_cast<double>(i) * step);
  pop.occupancy.assign(pop.class_offset.size(),
                       {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  return pop;
}

void PumpStep::validate() const {
  if (field_frequencies.empty())
    throw InvalidParams("PumpStep: need at least one field frequency");
  if (!(resonance_tolerance > 0.0))
    throw InvalidParams("PumpStep: resonance_tolerance must be > 0");
  if (sweep_halfwidth < 0.0)
    throw InvalidParams("PumpStep: sweep_halfwidth must be >= 0");
  if (!(transfer_fraction > 0.0 && transfer_fraction <= 1.0))
    throw InvalidParams("PumpStep: transfer_fraction must lie in (0, 1]");
}

ResonanceSet enumerate_resonances(const LevelStructure& ls, double field_freq,
                                  double tol) {
  ls.validate();
  ResonanceSet out;
  out.entries.reserve(9);
  for (int g = 0; g < 3; ++g)
    for (int e = 0; e < 3; ++e)
      out.entries.push_back(
          {field_freq - (ls.excited_offsets[e] - ls.ground_offsets[g]), g, e});
  for (size_t i = 0; i < out.entries.size(); ++i)
    for (size_t j = i + 1; j < out.entries.size(); ++j)
      if (std::fabs(out.entries[i].class_offset - out.entries[j].class_offset) <= tol)
        out.collisions.emplace_back(static_cast<int>(i), static_cast<int>(j));
  out.distinct_classes = 9 - static_cast<int>(out.collisions.size());
  // Multi-way collisions can over-count pairs; recount distinct offsets.
  if (!out.collisions.empty()) {
    std::vector<double> offs;
    for (const auto& r : out.entries) offs.push_back(r.class_offset);
    std::sort(offs.begin(), offs.end());
    int distinct = 1;
    for (size_t i = 1; i < offs.size(); ++i)
      if (offs[i] - offs[i - 1] > tol) ++distinct;
    out.distinct_classes = distinct;
  }
  return out;
}

std::array<double, 3> select_class_fields(const LevelStructure& ls, double target_class,
                                          int shared_excited, double tol) {
  ls.validate();
  if (shared_excited < 0 || shared_excited > 2)
    throw InvalidParams("select_class_fields: shared_excited must be 0..2");
  if (!(tol > 0.0)) throw InvalidParams("select_class_fields: tol must be > 0");

  const double es = ls.excited_offsets[shared_excited];
  std::array<double, 3> fields{};
  for (int g = 0; g < 3; ++g)
    fields[g] = target_class + (es - ls.ground_offsets[g]);

  // Equal ground splittings let shifted classes shadow the selection ladder.
  const double d01 = ls.ground_offsets[1] - ls.ground_offsets[0];
  const double d12 = ls.ground_offsets[2] - ls.ground_offsets[1];
  if (std::fabs(d01 - d12) <= tol)
    throw AmbiguousSelection(
        "select_class_fields: ground splittings are degenerate (g1-g0 == g2-g1)");

  // Exhaustive check over every class offset any field can reach: apart from
  // the target and its fixed companions at target + (shared - other excited),
  // no class may be resonant with all three fields.
  std::vector<double> candidates;
  for (double f : fields)
    for (int g = 0; g < 3; ++g)
      for (int e = 0; e < 3; ++e)
        candidates.push_back(f - (ls.excited_offsets[e] - ls.ground_offsets[g]));

  auto resonant_with = [&](double c, double f) {
    for (int g = 0; g < 3; ++g)
      for (int e = 0; e < 3; ++e)
        if (std::fabs(c + ls.excited_offsets[e] - ls.ground_offsets[g] - f) <= tol)
          return true;
    return false;
  };
  for (double c : candidates) {
    bool companion = false;
    for (int e = 0; e < 3; ++e)
      if (std::fabs(c - (target_class + es - ls.excited_offsets[e])) <= tol)
        companion = true;  // includes the target itself (e == shared_excited)
    if (companion) continue;
    int hit = 0;
    for (double f : fields)
      if (resonant_with(c, f)) ++hit;
    if (hit == 3) {
      std::ostringstream os;
      os << "select_class_fields: class at offset " << c
         << " is resonant with all three fields (degenerate splittings)";
      throw AmbiguousSelection(os.str());
    }
  }
  return fields;
}

ClassPopulations apply_pump_step(const ClassPopulations& pop, const LevelStructure& ls,
                                 const PumpStep& step, SaturatedPolicy policy,
                                 PumpReport* report) {
  pop.validate();
  ls.validate();
  step.validate();

  ClassPopulations out = pop;
  const double window = step.sweep_halfwidth + step.resonance_tolerance;
  std::vector<double> saturated;

  for (size_t ci = 0; ci < out.class_offset.size(); ++ci) {
    const double c = out.class_offset[ci];
    std::array<bool, 3> resonant{false, false, false};
    std::array<std::array<bool, 3>, 3> pumped_via{};  // [ground][excited]
    for (int g = 0; g < 3; ++g)
      for (int e = 0; e < 3; ++e) {
        const double transition = c + ls.excited_offsets[e] - ls.ground_offsets[g];
        for (double f : step.field_frequencies)
          if (std::fabs(transition - f) <= window) {
            resonant[g] = true;
            pumped_via[g][e] = true;
          }
      }
    const int nres = resonant[0] + resonant[1] + resonant[2];
    if (nres == 0) continue;
    if (nres == 3) {
      saturated.push_back(c);
      continue;  // nowhere to settle; handled per policy below
    }

    auto& occ = out.occupancy[ci];
    int iterations = 0;
    for (;;) {
      if (++iterations > 100000)
        throw NoConvergence("apply_pump_step: fixed point not reached");
      double max_change = 0.0;
      for (int g = 0; g < 3; ++g) {
        if (!resonant[g]) continue;
        const double moved = step.transfer_fraction * occ[g];
        if (moved <= 0.0) continue;
        // Branching weights from the pumped excited level(s) into the
        // non-resonant grounds; equal split if all weights vanish.
        std::array<double, 3> w{0.0, 0.0, 0.0};
        double norm = 0.0;
        for (int gp = 0; gp < 3; ++gp) {
          if (resonant[gp]) continue;
          for (int e = 0; e < 3; ++e)
            if (pumped_via[g][e]) w[gp] += ls.strengths[gp][e];
          norm += w[gp];
        }
        if (norm <= 0.0) {
          for (int gp = 0; gp < 3; ++gp)
            if (!resonant[gp]) {
              w[gp] = 1.0;
              norm += 1.0;
            }
        }
        occ[g] -= moved;
        for (int gp = 0; gp < 3; ++gp)
          if (!resonant[gp] && w[gp] > 0.0) occ[gp] += moved * w[gp] / norm;
        max_change = std::max(max_change, moved);
      }
      if (max_change < 1e-9) break;
    }
    if (report) report->iterations = std::max(report->iterations, iterations);
  }

  if (!saturated.empty() && policy == SaturatedPolicy::Strict &&
      step.transfer_fraction == 1.0) {
    std::ostringstream os;
    os << "apply_pump_step: " << saturated.size()
       << " classes have all three grounds resonant (first at offset "
       << saturated.front() << "); population has nowhere to settle";
    throw NoConvergence(os.str());
  }
  if (report) report->saturated_classes = std::move(saturated);
  return out;
}

BurnResult run_burn_sequence(const LevelStructure& ls, double target_class,
                             double trench_halfwidth, double feature_fwhm,
                             const BurnOptions& opt) {
  ls.validate();
  if (!(trench_halfwidth > 0.0))
    throw InvalidParams("run_burn_sequence: trench_halfwidth must be > 0");
  if (feature_fwhm < 0.0 || !(feature_fwhm < trench_halfwidth))
    throw InvalidParams(
        "run_burn_sequence: require 0 <= feature_fwhm < trench_halfwidth");
  if (opt.probe_ground < 0 || opt.probe_ground > 2 || opt.control_ground < 0 ||
      opt.control_ground > 2 || opt.probe_ground == opt.control_ground)
    throw InvalidParams("run_burn_sequence: probe/control grounds must differ, 0..2");

  double step = opt.class_step;
  if (step <= 0.0) step = feature_fwhm > 0.0 ? feature_fwhm / 20.0 : trench_halfwidth / 50.0;
  double tol = opt.resonance_tolerance;
  if (tol <= 0.0) tol = 0.5 * step;
  double span = opt.span_halfwidth;
  if (span <= 0.0)
    span = std::fabs(target_class) + ls.ground_span() + ls.excited_span() +
           5.0 * trench_halfwidth;
  if (span < std::fabs(target_class) + trench_halfwidth)
    throw InvalidParams("run_burn_sequence: simulated span does not cover the trench");

  BurnResult res;
  res.report.selection_fields =
      select_class_fields(ls, target_class, opt.shared_excited, tol);
  res.report.probe_frequency = res.report.selection_fields[opt.probe_ground];
  res.report.control_frequency = res.report.selection_fields[opt.control_ground];

  ClassPopulations pop = uniform_populations(span, step, target_class);

  // Stage 1: trench burn with all three selection fields.
  PumpStep s1;
  s1.field_frequencies.assign(res.report.selection_fields.begin(),
                              res.report.selection_fields.end());
  s1.sweep_halfwidth = trench_halfwidth;
  s1.resonance_tolerance = tol;
  s1.transfer_fraction = opt.transfer_fraction;
  PumpReport r1;
  pop = apply_pump_step(pop, ls, s1, SaturatedPolicy::Freeze, &r1);
  res.report.stage1_saturated = static_cast<int>(r1.saturated_classes.size());

  // Stage 2: drop the auxiliary-ground field; the probe and control fields
  // empty both lambda grounds across the trench.
  PumpStep s2 = s1;
  s2.field_frequencies = {res.report.probe_frequency, res.report.control_frequency};
  PumpReport r2;
  pop = apply_pump_step(pop, ls, s2, SaturatedPolicy::Freeze, &r2);
  res.report.stage2_saturated = static_cast<int>(r2.saturated_classes.size());

  // Stage 3: repump the feature into the probe ground; the active control
  // field keeps the control ground empty, so everything lands in the probe
  // ground directly.
  if (feature_fwhm > 0.0) {
    for (size_t i = 0; i < pop.class_offset.size(); ++i) {
      if (std::fabs(pop.class_offset[i] - target_class) > 0.5 * feature_fwhm) continue;
      auto& occ = pop.occupancy[i];
      const double moved = occ[3 - opt.probe_ground - opt.control_ground] +
                           occ[opt.control_ground];
      occ[opt.probe_ground] += moved;
      occ[3 - opt.probe_ground - opt.control_ground] = 0.0;
      occ[opt.control_ground] = 0.0;
    }
  }

  // Audit: populated resonances left at the probe/control frequencies
  // outside the repumped feature (e.g. trench narrower than the splittings).
  for (size_t i = 0; i < pop.class_offset.size(); ++i) {
    const double c = pop.class_offset[i];
    const bool in_feature =
        feature_fwhm > 0.0 && std::fabs(c - target_class) <= 0.5 * feature_fwhm + step;
    for (int g = 0; g < 3; ++g) {
      if (pop.occupancy[i][g] <= 1e-9) continue;
      for (int e = 0; e < 3; ++e) {
        const double transition = c + ls.excited_offsets[e] - ls.ground_offsets[g];
        const bool probe_hit = std::fabs(transition - res.report.probe_frequency) <= tol;
        const bool control_hit =
            std::fabs(transition - res.report.control_frequency) <= tol;
        if ((probe_hit || control_hit) && !(in_feature && g == opt.probe_ground))
          ++res.report.probe_control_leaks;
      }
    }
  }

  pop.validate();
  res.populations = std::move(pop);
  return res;
}

BroadeningProfile profile_from_populations(const ClassPopulations& pop,
                                           const LevelStructure& ls, int probe_ground,
                                           double kernel_fwhm, double reference_shift,
                                           double resample_step) {
  pop.validate();
  ls.validate();
  if (probe_ground < 0 || probe_ground > 2)
    throw InvalidParams("profile_from_populations: probe_ground must be 0..2");
  if (!(kernel_fwhm > 0.0))
    throw InvalidParams("profile_from_populations: kernel_fwhm must be > 0");

  // Collect the comb of populated probe transitions, weighted by occupancy,
  // transition strength, and the broad background density of the class.
  struct Line {
    double position;
    double weight;
  };
  std::vector<Line> lines;
  lines.reserve(pop.class_offset.size() * 3);
  const double g_off = ls.ground_offsets[probe_ground];
  double total_weight = 0.0;
  for (size_t i = 0; i < pop.class_offset.size(); ++i) {
    const double occ = pop.occupancy[i][probe_ground];
    if (occ <= 0.0) continue;
    const double c = pop.class_offset[i];
    const double hw = 0.5 * ls.background_fwhm;
    const double bg = hw / (3.14159265358979323846 * (c * c + hw * hw));
    for (int e = 0; e < 3; ++e) {
      const double s = ls.strengths[probe_ground][e];
      if (s <= 0.0) continue;
      const double w = occ * s * bg;
      lines.push_back({c + ls.excited_offsets[e] - g_off - reference_shift, w});
      total_weight += w;
    }
  }
  if (total_weight <= 0.0)
    throw AllZero("profile_from_populations: no absorption on the probe transition");

  double lo = lines.front().position, hi = lines.front().position;
  for (const Line& l : lines) {
    lo = std::min(lo, l.position);
    hi = std::max(hi, l.position);
  }
  lo -= 5.0 * kernel_fwhm;
  hi += 5.0 * kernel_fwhm;

  double dx = resample_step;
  if (dx <= 0.0) dx = std::max(kernel_fwhm / 5.0, pop.step() / 2.0);
  long count = std::lround((hi - lo) / dx) + 1;
  if (count < 3) count = 3;
  if (count > 2000000)
    throw InvalidParams("profile_from_populations: resample grid too large");

  // Dense accumulation of every line's Lorentzian kernel on the resample
  // grid; cost is lines x samples, bounded by the grid-size cap above.
  std::vector<double> xs(count), density(count, 0.0);
  for (long i = 0; i < count; ++i) xs[i] = lo + static_cast<double>(i) * dx;
  const double khw = 0.5 * kernel_fwhm;
  for (const Line& l : lines) {
    for (long i = 0; i < count; ++i) {
      const double d = xs[i] - l.position;
      density[i] += l.weight * khw / (3.14159265358979323846 * (d * d + khw * khw));
    }
  }
  return BroadeningProfile::from_table(xs, density);
}

void write_populations_csv(const std::string& path, const ClassPopulations& pop) {
  std::vector<std::vector<double>> rows;
  rows.reserve(pop.class_offset.size());
  for (size_t i = 0; i < pop.class_offset.size(); ++i)
    rows.push_back({pop.class_offset[i], pop.occupancy[i][0], pop.occupancy[i][1],
                    pop.occupancy[i][2]});
  csv::write_file(path, {"class_offset", "pop_g1", "pop_g2", "pop_g3"}, rows);
}

}  // namespace eit
