#ifndef PHENO_SVG_HPP
#define PHENO_SVG_HPP

#include <string>
#include <vector>

#include "pheno/explain.hpp"

namespace pheno {

// Beeswarm-style summary plot: one row per feature (most important on top),
// one dot per participant placed by contribution, colored by feature value.
std::string svg_summary_plot(const std::vector<SummaryFeature>& features,
                             std::size_t max_features = 10);

// Single-participant force plot: contributions laid out as signed segments
// from the base value to the model output on a [0, 1] probability axis.
std::string svg_force_plot(const ShapExplanation& e, std::size_t max_labels = 6);

}  // namespace pheno

#endif
