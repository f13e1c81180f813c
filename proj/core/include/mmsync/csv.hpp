#pragma once

#include <iosfwd>

#include "mmsync/crlb.hpp"
#include "mmsync/estimators.hpp"
#include "mmsync/signal_model.hpp"

namespace mmsync {

/// One row per chain, `re,im` pairs per sample, no header.
void write_block_csv(const ReceivedBlock& block, std::ostream& out);

/// Inverse of write_block_csv. Blank lines and `#` comment lines are
/// skipped. Throws CsvError with 1-based row and column on malformed input.
ReceivedBlock read_block_csv(std::istream& in);

/// A training sequence stored as a single `re,im` row.
void write_training_csv(const TrainingBlock& t, std::ostream& out);
TrainingBlock read_training_csv(std::istream& in);

/// Header plus one data row: cfo_hat, fft_size, peak_bin, peak_offset,
/// noise_var_hat, snr_hat, then alpha_hat_i, beta_hat_i, gamma_hat_i.
void write_estimate_csv(const EstimateReport& est, std::ostream& out);

/// snr_db,parameter,bound; one row per bound in report order.
void write_crlb_csv(const CrlbReport& bounds, double snr_db, std::ostream& out);

}  // namespace mmsync
