#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fastrd/ddm.hpp"
#include "fastrd/stepper.hpp"

namespace fastrd {

/// Largest amplification-root modulus over the modes the filter keeps
/// (sigma(kappa k / N) > cutoff), for the filtered per-mode recurrence.
inline double max_retained_root_modulus(const Grid1D& g, double dt, const FilterSpec& spec,
                                        double cutoff = 1e-12) {
  double worst = 0.0;
  for (int k = 1; k < g.intervals(); ++k) {
    const double s = spec.factor(k, g.intervals());
    if (s > cutoff)
      worst = std::max(worst, max_root_modulus(dt * discrete_laplacian_symbol(g, k), s));
  }
  return worst;
}

struct Problem1D {
  Grid1D grid;
  ReactionSystem reaction;
  std::function<BoundaryValues1D(double t)> boundary;
  Field initial;
  double t0 = 0.0;
};

struct FilterConfig {
  bool enabled = true;
  ShiftOrder shift_order = ShiftOrder::first;
  /// kappa = kappa_fraction * kappa_critical(dt, h).
  double kappa_fraction = 1.0;
  bool kappa_adapt = false;
  GrowthRule kappa_rule{};
  double kappa_increase = 1.1;
};

struct DecompositionConfig {
  int n_subdomains = 1;
  int overlap = 2;
  bool overlap_adapt = false;
  GrowthRule overlap_rule{};
};

struct RunOutcome {
  int steps = 0;
  bool stable = true;
  std::string failure;  // empty when stable
};

/// Drives the stabilized two-step scheme on (0, pi).
class Solver1D {
 public:
  Solver1D(Problem1D problem, StepConfig step, FilterConfig filter = {},
           DecompositionConfig dd = {},
           double blowup_threshold = default_blowup_threshold)
      : problem_(std::move(problem)),
        step_(step),
        filter_(filter),
        dd_(dd),
        blowup_threshold_(blowup_threshold),
        kappa_monitor_(filter.kappa_rule, filter.kappa_increase),
        interface_monitor_(dd.overlap_rule),
        curr_(problem_.initial),
        prev_(problem_.initial),
        time_(problem_.t0) {
    step_.validate();
    if (!(problem_.initial.grid() == problem_.grid) ||
        problem_.initial.components() != problem_.reaction.components)
      throw InvalidArgument("Solver1D: initial field does not match grid or reaction");
    if (!(filter_.kappa_fraction > 0.0))
      throw InvalidArgument("Solver1D: kappa_fraction must be > 0");
    layout_ = make_layout(problem_.grid, dd_.n_subdomains, dd_.overlap);
  }

  /// Kappa the filter uses at the next step.
  double kappa() const {
    return filter_.kappa_fraction *
           kappa_critical(step_.dt, problem_.grid.spacing()) *
           kappa_monitor_.multiplier();
  }

  /// One step plus postprocess. Throws NewtonDivergence.
  void advance() {
    const double t_next = time_ + step_.dt;
    const BoundaryValues1D bc = problem_.boundary(t_next);
    Field next = steps_ == 0
                     ? startup_step(curr_, problem_.reaction, step_, bc, time_)
                     : step(SchemeState(curr_, prev_, time_, step_.dt),
                            problem_.reaction, step_, bc);
    if (filter_.enabled) next = postprocess(next, t_next);
    prev_ = std::move(curr_);
    curr_ = std::move(next);
    time_ = t_next;
    ++steps_;
  }

  /// Advances up to `n` steps, stopping at blow-up or Newton failure.
  RunOutcome run(int n) {
    RunOutcome out;
    for (int i = 0; i < n; ++i) {
      try {
        advance();
      } catch (const NewtonDivergence& e) {
        out.stable = false;
        out.failure = e.what();
        break;
      }
      ++out.steps;
      if (blown_up(curr_, blowup_threshold_)) {
        out.stable = false;
        out.failure = "blow-up at step " + std::to_string(steps_);
        break;
      }
    }
    return out;
  }

  const Field& solution() const { return curr_; }
  const Field& previous() const { return prev_; }
  double time() const { return time_; }
  int steps() const { return steps_; }
  const SubdomainLayout& layout() const { return layout_; }
  const StepConfig& step_config() const { return step_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  double interface_growth() const { return interface_monitor_.last_growth(); }

 private:
  Field postprocess(const Field& next, double t_next) {
    const FilterSpec spec{8, sigma8, kappa()};
    DdStats stats;
    const int last = problem_.grid.intervals();
    Field out = next;

    if (layout_.n_subdomains == 1) {
      if (filter_.shift_order == ShiftOrder::first) {
        out = postprocess_shift1(next, spec, &stats.filter);
      } else {
        auto c = [&](int node) { return curvature(next, node, t_next); };
        out = postprocess_shift3(next, c(0), c(last), spec, &stats.filter);
      }
    } else {
      out = postprocess_dd(next, layout_, filter_.shift_order, spec,
                           [&](int node) { return curvature(next, node, t_next); },
                           &stats);
    }

    if (filter_.kappa_adapt) kappa_monitor_.observe(stats.filter.top_band_energy);
    if (dd_.overlap_adapt && layout_.n_subdomains > 1) {
      interface_monitor_.observe(stats.interface_energy);
      growth_.push_back(interface_monitor_.last_growth());
      auto adapted = adapt_overlap(growth_, layout_, problem_.grid, dd_.overlap_rule);
      if (adapted.changed) {
        layout_ = std::move(adapted.layout);
        growth_.clear();
      } else if (adapted.saturated) {
        if (!saturation_reported_) warnings_.push_back(adapted.warning);
        saturation_reported_ = true;
        growth_.clear();
      }
    }
    return out;
  }

  std::vector<double> curvature(const Field& next, int node, double t_next) const {
    return steps_ == 0
               ? curvature_from_pde(next, curr_, node, problem_.reaction, t_next,
                                    step_.dt)
               : curvature_from_pde(next, curr_, prev_, node, problem_.reaction,
                                    t_next, step_.dt);
  }

  Problem1D problem_;
  StepConfig step_;
  FilterConfig filter_;
  DecompositionConfig dd_;
  double blowup_threshold_;
  KappaMonitor kappa_monitor_;
  GrowthMonitor interface_monitor_;
  SubdomainLayout layout_;
  std::vector<double> growth_;
  std::vector<std::string> warnings_;
  bool saturation_reported_ = false;

  Field curr_;
  Field prev_;
  double time_;
  int steps_ = 0;
};

}  // namespace fastrd
