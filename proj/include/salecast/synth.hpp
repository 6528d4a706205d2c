#pragma once

#include <cstdint>

#include "salecast/frame.hpp"

namespace salecast {

// Synthetic market + socio generator with a known logistic ground truth.
// The class-1 probability is sigmoid(signal_strength * (z_hpi + 0.8*z_effr
// + 0.35*z_sfla)) where z is the per-column standardization over the
// generated rows; hpi and effr are rough month to month, so a model without
// the socio join can only approximate them through the sale-month features
// while the joined view reads them directly. The best achievable accuracy is
// mean(max(p, 1-p)) over the rows.
struct SynthConfig {
  std::size_t n_rows = 10000;
  std::uint64_t seed = 1;
  double signal_strength = 4.8;
  int start_year = 2010;
  int n_months = 120;
};

struct SynthResult {
  Frame market;       // canonical market schema columns
  Frame socio_frame;  // month,gdp,cpi,ppi,hpi,effr
  SocioTable socio;
  double bayes_accuracy = 0.0;
  double prevalence = 0.0;
};

SynthResult generate_synth(const SynthConfig& config);

}  // namespace salecast
