// C_V topic coherence: boolean sliding-window co-occurrence, NPMI context
// vectors, one-set segmentation, cosine aggregation.
//
// Over every document's token sequence, windows of `window` consecutive
// positions are slid one step at a time (documents shorter than the window
// contribute a single whole-document window). Window counts give boolean
// probabilities P_i, P_ij, from which
//     NPMI(i,j) = [log(P_ij + eps) - log(P_i P_j)] / -log(P_ij + eps),
// with the perfect-association limit (both words in every window) pinned to
// +1. Each top word's context vector is its NPMI row against the full top
// set; the one-set segmentation compares every word vector to the summed set
// vector by cosine, and C_V is the mean of those cosines.
#pragma once

#include <vector>

namespace ttm {

struct CoherenceResult {
  double cv = 0.0;
  std::vector<int> absent;  // top words with zero occurrences in the
                            // reference: their context vector is zero
};

CoherenceResult coherence_cv(const std::vector<int>& top_words,
                             const std::vector<std::vector<int>>& reference,
                             int window = 110, double npmi_eps = 1e-12);

}  // namespace ttm
