#pragma once

#include <string>

#include "piranha/net.hpp"
#include "piranha/optimizer.hpp"
#include "piranha/series.hpp"

namespace piranha {

/**
 * Reads comma-separated numeric text, one time step per line, '#' starting
 * a comment line. Each data line must carry exactly m fields. Values are
 * normalized per channel onto [-1,1] and the affine map is kept on the
 * returned Series for denormalization.
 */
Series load_series(const std::string& path, int m, PadMode pad = PadMode::none);

/// Writes raw (denormalized) series rows as CSV; the inverse of load_series.
void write_series(const Series& s, const std::string& path);

/**
 * Text weight format:
 *   piranha-weights v1 <n> <m>
 * followed by the n rows of F and the n rows of G, 17-significant-digit
 * decimals. Round trips are bitwise exact.
 */
void save_weights(const Weights& w, const std::string& path);
Weights load_weights(const std::string& path);

/// CSV trace: header "iter,objective,grad_norm,alpha,f_norm_inf,ms".
void write_trace(const TrainTrace& trace, const std::string& path);

/// Replay output: target and predicted rows side by side, denormalized.
void write_replay(const Series& x, const std::vector<Eigen::VectorXd>& predictions,
                  int t_switch, const std::string& path);

} // namespace piranha
