#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "expanderlab/entropy.hpp"
#include "expanderlab/expander_ode.hpp"
#include "expanderlab/flow.hpp"
#include "expanderlab/report.hpp"

namespace expanderlab {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SweepRow {
  double parameter = 0.0;
  /// C^0 distance (or the row's primary metric).
  double distance = kNaN;
  double distance_c1 = kNaN;
  double a = kNaN;
  double lambda = kNaN;
  /// Secondary metric, e.g. the self-similarity defect of a flow row.
  double extra = kNaN;
  int pass_count = 0;
  /// "ok", or the error kind that stopped this row.
  std::string status = "ok";
};

struct SweepTable {
  std::string name;
  std::vector<SweepRow> rows;
  std::vector<std::pair<std::string, double>> summary;

  double get(const std::string& key) const;
};

struct ExperimentOptions {
  ShootOptions shoot;
  int jobs = 1;
  std::uint64_t seed = 1;
};

/// Distances between shoot(tau_i) and shoot(tau_limit) on [0, R_window].
SweepTable compactness_sweep(int n, const std::vector<double>& tau_seq, double tau_limit, double R_window,
                             const ExperimentOptions& opts = {});

/// a(tau) on a log-spaced sample of the interval plus a dyadic continuity
/// study at its geometric midpoint. Continuity rows carry status "modulus".
SweepTable properness_probe(int n, std::pair<double, double> tau_interval, int samples,
                            const ExperimentOptions& opts = {});

struct MCFOptions {
  int nodes = 2048;
  double r_max = 40.0;
  FlowParams flow;
  int jobs = 1;
};

/// Flow of the mollified cone to t = 1 against the shooting profile.
SweepTable mcf_vs_shooting(int n, double tau, const std::vector<double>& eps_list, const MCFOptions& opts = {});

/// Richardson extrapolation of d(eps) to eps = 0 from the last three rows.
std::pair<double, double> extrapolate_in_eps(const std::vector<double>& eps, const std::vector<double>& d);

struct PinchSample {
  double t = 0.0;
  double theta = 0.0;
  double margin = 0.0;
};

struct Dossier {
  int n = 2;
  double theta0 = 0.0;
  double t_cut = 0.0;
  double extinction = 0.0;
  double theta_cut = 0.0;
  double tau = 0.0;
  double a = 0.0;
  double lambda_expander = 1.0;
  double lambda_cone = 1.0;
  bool flat = false;
  bool pass = false;
  std::string failed_stage;
  std::vector<PinchSample> pinching;
  std::vector<CheckReport> checks;
};

struct PipelineOptions {
  ShootOptions shoot;
  EntropySearch search;
  int pinch_samples = 17;
};

Dossier existence_pipeline(int n, double theta0, double t_cut, const PipelineOptions& opts = {});

}  // namespace expanderlab
