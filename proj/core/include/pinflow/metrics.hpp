#pragma once

/// @file metrics.hpp
/// @brief Empirical densities and distances between densities on a grid

#include "pinflow/grid.hpp"
#include "pinflow/particles.hpp"
#include "pinflow/vec2.hpp"

#include <vector>

namespace pinflow {

/// Gaussian-kernel density (1/N) sum_i G_bw(x - x_i) on the grid nodes
///
/// Each kernel is renormalized on the grid, so the deposit integrates to one up to
/// rounding. With periodic set, distances use the minimum image of the grid box.
/// Throws ConfigError when bandwidth < 2 max(hx, hy) or the ensemble is empty.
ScalarField deposit_empirical(const std::vector<Vec2>& positions, const Grid2D& g, double bandwidth,
                              bool periodic = false);
ScalarField deposit_empirical(const VortexEnsemble& ens, const Grid2D& g, double bandwidth, bool periodic = false);

/// Negative Sobolev distance ||grad Lap^-1 (m1 - m2)||_2 on the grid box treated as a torus
/// (means subtracted); throws ConfigError on mismatched grids
double hminus1_distance(const ScalarField& m1, const ScalarField& m2);

/// Exact 1-Wasserstein distance between two grid densities of equal mass by min-cost flow
///
/// Intended as a slow oracle on tiny grids (at most 1024 nodes). Ground cost is the
/// Euclidean node distance, or the minimum-image distance when periodic is set.
double wasserstein1_exact(const ScalarField& m1, const ScalarField& m2, bool periodic = false);

/// First moment int x m dx
Vec2 first_moment(const ScalarField& m);

} // namespace pinflow
