#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "forge/core/mesh.hpp"
#include "forge/templates/instance.hpp"

namespace forge {

struct FitConfig {
  int max_iters = 500;
  // Initial step in normalized parameter units (bounds mapped to [0, 1]).
  double step_size = 0.02;
  // Stop when the best loss improves by less than this fraction over `kWindow` iterations.
  double convergence_tol = 1e-6;
  std::size_t mesh_samples = 2048;
  int resolution = 24;
  std::uint64_t seed = 0;
  int multi_start = 3;

  static constexpr int kWindow = 20;

  /// Throws Error(kInvalidArgument) naming the offending field.
  void validate() const;
};

struct CellLoss {
  std::vector<int> discrete;
  double loss = 0.0;
};

struct FitResult {
  ConceptInstance best;
  double final_loss = 0.0;
  double initial_loss = 0.0;
  // Loss of the initial instance followed by the loss after every iteration.
  std::vector<double> loss_trace;
  int iterations_used = 0;
  bool converged = false;
  // Member-parameter clamps reported by the best instance's expansion.
  std::vector<std::string> violations;
  // Best loss of every discrete cell, in grid order (fit_with_discrete only).
  std::vector<CellLoss> cell_losses;
};

/// Called after every iteration with the trace so far; return false to stop early.
using FitProgress = std::function<bool(const std::vector<double>& trace)>;

/// Descent over the continuous parameters and the pose of `init`, discrete
/// parameters held fixed. Throws Error(kNumeric) if the initial loss is not
/// finite.
FitResult fit_continuous(const TemplateRegistry& registry, const ConceptInstance& init, const PointCloud& target,
                         const FitConfig& config, const FitProgress& progress = {});

/// Exhaustive search over the discrete grid; `multi_start` jittered descents
/// per cell starting from default_init. Ties go to the lexicographically
/// smallest discrete vector.
FitResult fit_with_discrete(const TemplateRegistry& registry, const std::string& template_id,
                            const PointCloud& target, const FitConfig& config);

/// Identity rotation, translation at the target centroid, length parameters
/// scaled by the ratio of target to default-instance bounding-box extents.
ConceptInstance default_init(const TemplateRegistry& registry, const std::string& template_id,
                             const PointCloud& target);

}  // namespace forge
