#include "ablum/behaviour.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ablum/errors.hpp"

namespace ablum {

namespace {

void check_range(const char* name, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi)) {
    throw ConfigError(std::string(name) + " = " + std::to_string(v) + " out of range [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

constexpr double kExponentClamp = 60.0;

}  // namespace

void validate(const BehaviouralProfile& p) {
  check_range("attitude", p.attitude, -1.0, 1.0);
  check_range("inertia_coeff", p.inertia_coeff, 0.0, 1.0);
  check_range("norm_weight", p.norm_weight, 0.0, 1.0);
  check_range("cm_int", p.cm_int, 0.0, 1.0);
  check_range("cm_ext", p.cm_ext, 0.0, 1.0);
  check_range("git_upper", p.git_upper, 0.0, 1.0);
}

void validate(const BehaviourGlobals& g) {
  if (!(g.logistic_steepness > 0.0) || !std::isfinite(g.logistic_steepness)) {
    throw ConfigError("logistic steepness k must be positive");
  }
}

double attitude_effect(double attitude, double i_current, double i_candidate) {
  if (i_candidate == i_current) {
    throw InvalidTransition("attitude effect requested for a self-transition");
  }
  return i_candidate > i_current ? -attitude : attitude;
}

double social_influence(double fraction_conforming, double critical_mass) {
  return fraction_conforming - critical_mass;
}

double clip_social(double s) { return std::min(1.0, std::max(-1.0, 2.0 * s)); }

double influence_score(const BehaviouralProfile& p, double s_clipped, double attitude_eff,
                       double i_current, double i_candidate) {
  return p.norm_weight * s_clipped + (1.0 - p.norm_weight) * attitude_eff -
         p.inertia_coeff * std::abs(i_candidate - i_current);
}

double giving_in_threshold(const BehaviouralProfile& p, const BehaviourGlobals& g, double x) {
  const double e = std::clamp(g.logistic_steepness * x, -kExponentClamp, kExponentClamp);
  return p.git_upper / (1.0 + std::exp(e));
}

TransitionAssessment assess_transition(const BehaviouralProfile& profile,
                                       const BehaviourGlobals& globals,
                                       const SocialNetwork& network,
                                       std::span<const double> intensities, CellIndex cell,
                                       double i_current, double i_candidate) {
  if (i_candidate == i_current) {
    throw InvalidTransition("cell " + std::to_string(cell) + " evaluated against its own AFT");
  }
  const bool intensify = i_candidate > i_current;
  const IntensityPredicate predicate{
      intensify ? IntensityDirection::kAtOrAbove : IntensityDirection::kAtOrBelow,
      i_candidate};

  TransitionAssessment r;
  r.fraction = neighbour_intensity_fraction(network, intensities, cell, predicate);
  r.social = social_influence(r.fraction, intensify ? profile.cm_int : profile.cm_ext);
  r.social_clipped = clip_social(r.social);
  r.attitude_eff = attitude_effect(profile.attitude, i_current, i_candidate);
  r.score = influence_score(profile, r.social_clipped, r.attitude_eff, i_current, i_candidate);
  r.threshold = globals.behaviour_enabled ? giving_in_threshold(profile, globals, r.score) : 0.0;
  return r;
}

double evaluate_transition(const BehaviouralProfile& profile, const BehaviourGlobals& globals,
                           const SocialNetwork& network, std::span<const double> intensities,
                           CellIndex cell, double i_current, double i_candidate) {
  return assess_transition(profile, globals, network, intensities, cell, i_current, i_candidate)
      .threshold;
}

}  // namespace ablum
