#pragma once

#include <cstdint>
#include <string>

#include "rashomon/dataset.hpp"

namespace rashomon {

// Generators for controlled experiments. Each produces a binary-labelled
// Dataset whose ground truth is known, so explanation pipelines can be
// checked against planted structure rather than eyeballed.

// Linear score on the first three of k features (2.0*x0 - 1.6*x1 + 1.2*x2),
// label = score > 0, then `noise` fraction of labels flipped uniformly at
// random. Remaining features are independent standard normals.
Dataset make_planted(std::size_t n, std::size_t k, double noise, std::uint64_t seed,
                     const std::string& name = "planted");

// Two informative features combined by XOR of their signs; the rest noise.
// Linear families cannot separate it, tree families can.
Dataset make_xor(std::size_t n, std::size_t k, double noise, std::uint64_t seed,
                 const std::string& name = "xor");

// Linearly separable with margin: label decided by x0 + x1, then the points
// inside |score| < margin re-drawn. lr reaches kappa 1.0 on it.
Dataset make_separable(std::size_t n, std::size_t k, double margin, std::uint64_t seed,
                       const std::string& name = "separable");

}  // namespace rashomon
