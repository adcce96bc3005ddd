#pragma once

// Reference values computed with scipy; regenerate with
// reference/gen_reference_corpus.py.

#include <vector>

namespace corpus {

struct WelchCase {
  std::vector<double> a, b;
  double t, df, p;
};

struct AnovaCase {
  std::vector<std::vector<double>> groups;
  double f;
  double df1, df2;
  double p;
};

struct KsCase {
  std::vector<double> a, b;
  double d, p;
};

struct CiCase {
  std::vector<double> x;
  double mean, low, high;
};

#include "reference/reference_corpus.inc"

}  // namespace corpus
