// Copyright 2026 The texvib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "texvib/codec/model_domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "texvib/error.hpp"

namespace texvib::codec {

namespace {

constexpr double kRangeTolerance = 1e-6;

double source_coord(Eigen::Index i, Eigen::Index dst, Eigen::Index src) {
  if (dst <= 1 || src <= 1) return 0.0;
  return static_cast<double>(i) * static_cast<double>(src - 1) / static_cast<double>(dst - 1);
}

}  // namespace

Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& src, Eigen::Index rows, Eigen::Index cols) {
  if (src.rows() == rows && src.cols() == cols) return src;
  if (src.size() == 0 || rows <= 0 || cols <= 0) {
    fail(ErrorCode::kDimension, "resize_bilinear: empty source or target");
  }
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double y = source_coord(i, rows, src.rows());
    const Eigen::Index y0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(y), src.rows() - 1);
    const Eigen::Index y1 = std::min<Eigen::Index>(y0 + 1, src.rows() - 1);
    const double fy = y - static_cast<double>(y0);
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double x = source_coord(j, cols, src.cols());
      const Eigen::Index x0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(x), src.cols() - 1);
      const Eigen::Index x1 = std::min<Eigen::Index>(x0 + 1, src.cols() - 1);
      const double fx = x - static_cast<double>(x0);
      const double top = src(y0, x0) * (1 - fx) + src(y0, x1) * fx;
      const double bottom = src(y1, x0) * (1 - fx) + src(y1, x1) * fx;
      out(i, j) = top * (1 - fy) + bottom * fy;
    }
  }
  return out;
}

double floor_linear(const NormStats& stats, const CodecConfig& cfg) {
  return std::pow(10.0, (stats.log_max + cfg.log_floor_db) / 20.0);
}

ModelSpectrogram to_model_domain(const ComplexSpectrogram& spec, const NormStats& stats,
                                 const CodecConfig& cfg) {
  cfg.validate();
  stats.validate();
  const int bins = cfg.crop_bins();
  if (spec.data.rows() < std::max(bins, cfg.model_freq_bins) ||
      spec.data.cols() < cfg.model_time_frames) {
    fail(ErrorCode::kDimension,
         "to_model_domain: spectrogram " + std::to_string(spec.data.rows()) + "x" +
             std::to_string(spec.data.cols()) + " is smaller than the crop region " +
             std::to_string(std::max(bins, cfg.model_freq_bins)) + "x" +
             std::to_string(cfg.model_time_frames));
  }
  const double floor = floor_linear(stats, cfg);
  const double span = stats.log_max - stats.log_min;
  Eigen::MatrixXd block(bins, cfg.model_time_frames);
  for (int r = 0; r < bins; ++r) {
    for (int t = 0; t < cfg.model_time_frames; ++t) {
      const double mag = std::abs(spec.data(r, t));
      if (!std::isfinite(mag)) fail(ErrorCode::kNumeric, "to_model_domain: non-finite STFT entry");
      const double db = std::clamp(20.0 * std::log10(std::max(mag, floor)), stats.log_min,
                                   stats.log_max);
      block(r, t) = (db - stats.log_min) / span;
    }
  }
  const Eigen::MatrixXd resized = resize_bilinear(block, cfg.model_freq_bins, cfg.model_time_frames);

  ModelSpectrogram out;
  out.stats = stats;
  out.config = cfg;
  out.data = resized.cwiseMax(0.0).cwiseMin(1.0).cast<float>();
  return out;
}

MagnitudeMatrix from_model_domain(const ModelSpectrogram& m, const CodecConfig& cfg) {
  cfg.validate();
  m.stats.validate();
  if (m.data.rows() != cfg.model_freq_bins || m.data.cols() != cfg.model_time_frames) {
    fail(ErrorCode::kDimension, "from_model_domain: model spectrogram is " +
                                    std::to_string(m.data.rows()) + "x" +
                                    std::to_string(m.data.cols()) + ", codec expects " +
                                    std::to_string(cfg.model_freq_bins) + "x" +
                                    std::to_string(cfg.model_time_frames));
  }
  Eigen::MatrixXd values = m.data.cast<double>();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values.data()[i];
    if (!(v >= -kRangeTolerance && v <= 1.0 + kRangeTolerance)) {
      fail(ErrorCode::kInvalidArgument,
           "from_model_domain: entry " + std::to_string(v) + " outside [0, 1]");
    }
  }
  values = values.cwiseMax(0.0).cwiseMin(1.0);
  const int bins = cfg.crop_bins();
  const Eigen::MatrixXd block = resize_bilinear(values, bins, cfg.model_time_frames);

  const double span = m.stats.log_max - m.stats.log_min;
  MagnitudeMatrix mag = MagnitudeMatrix::Zero(cfg.num_bins(), cfg.model_time_frames);
  for (int r = 0; r < bins; ++r) {
    for (int t = 0; t < cfg.model_time_frames; ++t) {
      mag(r, t) = std::pow(10.0, (m.stats.log_min + block(r, t) * span) / 20.0);
    }
  }
  return mag;
}

}  // namespace texvib::codec
