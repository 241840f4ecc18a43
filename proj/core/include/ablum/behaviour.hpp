#pragma once

// Decision layer for intensity transitions: attitude effect, descriptive-norm
// pressure, inertia and the logistic giving-in threshold (GIT). Everything here
// is a pure function of its arguments.

#include <cstddef>
#include <span>

#include "ablum/network.hpp"

namespace ablum {

// Per-cell behavioural parameters. All values live in [0, 1] except the
// attitude, which lives in [-1, 1] (negative = productivist).
struct BehaviouralProfile {
  double attitude = 0.0;
  double inertia_coeff = 0.0;
  double norm_weight = 0.5;
  double cm_int = 0.5;
  double cm_ext = 0.5;
  double git_upper = 1.0;

  friend bool operator==(const BehaviouralProfile&, const BehaviouralProfile&) = default;
};

struct BehaviourGlobals {
  double logistic_steepness = 10.0;
  // When false the decision layer is bypassed and any positive utility
  // surplus suffices (threshold 0): the purely economic baseline.
  bool behaviour_enabled = true;

  friend bool operator==(const BehaviourGlobals&, const BehaviourGlobals&) = default;
};

void validate(const BehaviouralProfile& profile);
void validate(const BehaviourGlobals& globals);

// +attitude for extensification, -attitude for intensification.
// Throws InvalidTransition when the two intensities coincide.
double attitude_effect(double attitude, double i_current, double i_candidate);

// Net social pressure: conforming fraction minus critical mass.
double social_influence(double fraction_conforming, double critical_mass);

// min(1, max(-1, 2 s)).
double clip_social(double s);

// w * S~ + (1 - w) * A_eff - lambda * |dI|
double influence_score(const BehaviouralProfile& profile, double s_clipped,
                       double attitude_eff, double i_current, double i_candidate);

// L / (1 + exp(k x)), exponent clamped to [-60, 60].
double giving_in_threshold(const BehaviouralProfile& profile,
                           const BehaviourGlobals& globals, double x);

// Intermediate values of one transition evaluation, exposed for diagnostics.
struct TransitionAssessment {
  double fraction = 0.0;
  double social = 0.0;
  double social_clipped = 0.0;
  double attitude_eff = 0.0;
  double score = 0.0;
  double threshold = 0.0;
};

// Evaluates the move of `cell` from `i_current` to `i_candidate` against an
// intensity snapshot (one value per cell, indexed like the network).
// Intensification counts neighbours at or above the candidate intensity and
// uses cm_int; extensification counts neighbours at or below it and uses cm_ext.
TransitionAssessment assess_transition(const BehaviouralProfile& profile,
                                       const BehaviourGlobals& globals,
                                       const SocialNetwork& network,
                                       std::span<const double> intensities,
                                       CellIndex cell, double i_current,
                                       double i_candidate);

// Threshold value of assess_transition.
double evaluate_transition(const BehaviouralProfile& profile,
                           const BehaviourGlobals& globals,
                           const SocialNetwork& network,
                           std::span<const double> intensities, CellIndex cell,
                           double i_current, double i_candidate);

}  // namespace ablum
