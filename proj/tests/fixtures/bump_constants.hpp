// tests/fixtures/bump_constants.hpp
//
// Frozen constants for the bump-adaptation acceptance check.
//
// The thresholds below were fixed by a reference run of the independent
// scalar implementation in tests/oracle/bump_reference_main.cpp BEFORE the
// production pipeline was wired up.  The verbatim output of that run is
// recorded in tests/fixtures/bump_reference_output.txt.  Reproduce it with:
//
//   g++ -std=c++20 -O2 -Itests tests/oracle/bump_reference_main.cpp -o bump_ref
//   ./bump_ref
//
// Fixture design notes (from the reference study):
//  * Amplitude descent at the pinned rate 0.8 is a plain quadratic descent
//    in the identity parametrisation; it is stable iff the amplitude-space
//    Hessian's largest eigenvalue stays below 2/0.8 = 2.5.  That eigenvalue
//    scales with the squared bump heights and varies with the trained basis,
//    so the acceptance run pins a network seed whose trained basis has a
//    comfortable margin (reference seeds 1 and 5: lmax 0.70 / 0.75).
//  * kBumpEpsAccept is twice the worst adapted MSE among the reference
//    seeds that met the 0.25x target within the adaptation budget
//    (2 x 0.002434 = 0.004868); the factor-of-two margin covers the
//    switch from the scalar reference to the production implementation
//    (different RNG draws, minibatch order, and accumulation order).
//  * The relative target (adapted <= 0.25 x unadapted) binds harder than
//    the absolute cap for this geometry (0.25 x unadapted is about 2.5e-3
//    to 3.2e-3); the absolute cap guards against a degenerate run inflating
//    the unadapted error to make the ratio easy.
#pragma once

#include <cstdint>

namespace bumpfix {

// --- task geometry (two Gaussian bumps; task two rescales amplitudes) ---
inline constexpr double kBumpCenter = 1.5;      // bumps at -1.5 and +1.5
inline constexpr double kBumpWidth = 1.10;      // shared Gaussian width
inline constexpr double kBumpHeightL = 0.30;    // task-one left height
inline constexpr double kBumpHeightR = 0.15;    // task-one right height
inline constexpr double kBumpFactorL = 0.3;     // task-two left multiplier
inline constexpr double kBumpFactorR = 1.8;     // task-two right multiplier
inline constexpr double kBumpXLo = -4.5;
inline constexpr double kBumpXHi = 4.5;
inline constexpr double kBumpNoiseSd = 0.005;
inline constexpr int kBumpNPoints = 240;

// --- network and schedules ---
inline constexpr int kBumpHiddenUnits = 4;
inline constexpr double kBumpTrainLr = 0.2;     // full-batch training rate
inline constexpr int kBumpTrainIters = 20000;   // full-batch training steps
inline constexpr double kBumpAdaptLr = 0.8;     // pinned adaptation rate
inline constexpr int kBumpAdaptSweeps = 4000;   // full-batch amplitude steps

// --- frozen acceptance thresholds (reference run, see header comment) ---
inline constexpr double kBumpRatioAccept = 0.25;
inline constexpr double kBumpEpsAccept = 0.004868;

// Reference per-seed results for the two seeds that met the target
// (identity amplitudes, descent rate 0.8, 4000 full-batch steps):
//   seed 1: unadapted 0.011572  adapted 0.002434  ratio 0.2103  lmax 0.70
//   seed 5: unadapted 0.012819  adapted 0.001763  ratio 0.1375  lmax 0.75

}  // namespace bumpfix
