#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gcnsamp/sampling.hpp"

namespace gcnsamp {

// Entries i.i.d. N(0, 1); with `normalize` every row is scaled to unit norm.
Matrix gen_features(Index n, Index d, std::uint64_t seed, bool normalize = false);

// A P-hat: column j scaled by phat of its group.
CsrMatrix gen_ahat(const NormalizedAdjacency& a, const DegreeGrouping& grouping, std::span<const double> phat);

/// y = (sin(Ahat X W*) .* tanh(Ahat X W*)) C*.
struct LabelTarget {
  Matrix w_star;  // d x p
  Matrix c_star;  // p x K
};

// W* and C* with entries i.i.d. N(0, 1).
LabelTarget gen_label_target(Index d, Index p, Index k, std::uint64_t seed);
Matrix gen_labels(const CsrMatrix& ahat, const Matrix& X, const LabelTarget& target);

/// F*(X) = A* (Phi(r1) .* r2) C*,  r_b = A* phi_b(A* X W_b*) V_b*.
/// Columns of W_b* and V_b* have unit norm and |C*| <= 1.
struct ConceptTarget {
  Matrix w1, w2;  // d x p1
  Matrix v1, v2;  // p1 x p2
  Matrix c;       // p2 x K
  std::string phi1 = "identity";
  std::string phi2 = "identity";
  std::string outer = "identity";
};

// Random instance satisfying the constraints.
ConceptTarget gen_concept_target(Index d, Index p1, Index p2, Index k, std::uint64_t seed);
// Throws ConfigError on a violated constraint or unknown activation.
void check_concept_target(const ConceptTarget& t);
Matrix eval_concept_target(const CsrMatrix& astar, const Matrix& X, const ConceptTarget& t);

// Elementwise activation by name: sin, cos, exp, tanh, identity.
Matrix apply_activation(const std::string& name, const Matrix& x);

struct Split {
  std::vector<NodeId> omega;  // sorted
  std::vector<NodeId> test;   // sorted
};

// Disjoint uniform subsets; deterministic in seed.
Split split_nodes(Index n, Index n_train, Index n_test, std::uint64_t seed);

// CSV "node,role" with role in {train, test}.
void write_split_csv(const Split& s, std::ostream& out);
Split read_split_csv(std::istream& in, Index n_nodes);

struct SyntheticDataset {
  Matrix X;
  Matrix Y;
  Split split;
  std::vector<double> phat;
};

}  // namespace gcnsamp
