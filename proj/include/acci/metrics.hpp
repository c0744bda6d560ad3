#pragma once

#include <string>

#include "acci/partition.hpp"

namespace acci {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Harmonic mean, 0 when p + r = 0.
Prf make_prf(double precision, double recall);

Prf muc(const Partition& gold, const Partition& pred);
Prf b_cubed(const Partition& gold, const Partition& pred);
Prf ceaf_e(const Partition& gold, const Partition& pred);
Prf lea(const Partition& gold, const Partition& pred);

double conll(double muc_f1, double b_cubed_f1, double ceaf_e_f1);

struct MetricReport {
  Prf muc, b_cubed, ceaf_e, lea;
  double conll_f1 = 0.0;
};

MetricReport evaluate(const Partition& gold, const Partition& pred);

double round_to(double value, int decimals);

// Values rounded to 4 decimals.
std::string report_json(const MetricReport& r);
std::string report_table(const MetricReport& r);

}  // namespace acci
