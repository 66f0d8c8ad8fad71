#include "miwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "miwave/errors.hpp"

namespace miwave {

namespace {

// Products such as 0.1 * 30 land a hair above the intended integer.
constexpr double kCeilSlack = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double interpolate_table(const TablePsd& table, double f) {
  const auto& xs = table.freqs;
  const auto& ys = table.values;
  if (f <= xs.front()) return ys.front();
  if (f >= xs.back()) return ys.back();
  const auto hi = std::upper_bound(xs.begin(), xs.end(), f);
  const auto j = static_cast<std::size_t>(hi - xs.begin());
  const double t = (f - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

void validate_table(const TablePsd& table) {
  if (table.freqs.size() != table.values.size()) {
    throw InvalidArgument("PSD table: frequency and value columns differ in length");
  }
  if (table.freqs.size() < 2) {
    throw InvalidArgument("PSD table: need at least two rows");
  }
  for (std::size_t i = 1; i < table.freqs.size(); ++i) {
    if (!(table.freqs[i] > table.freqs[i - 1])) {
      throw InvalidArgument("PSD table: frequencies must be strictly increasing");
    }
  }
}

}  // namespace

FrequencyGrid::FrequencyGrid(double band_width, double duration, int half_order)
    : band_width_(band_width), duration_(duration), half_order_(half_order) {
  freqs_.reserve(static_cast<std::size_t>(2 * half_order + 1));
  for (int m = -half_order; m <= half_order; ++m) {
    freqs_.push_back(static_cast<double>(m) / duration);
  }
}

FrequencyGrid FrequencyGrid::make(double band_width, double duration) {
  if (!(band_width > 0.0) || !std::isfinite(band_width)) {
    throw InvalidArgument("make_grid: band width must be positive and finite");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw InvalidArgument("make_grid: duration must be positive and finite");
  }
  auto m = static_cast<long long>(std::ceil(band_width * duration - kCeilSlack));
  if (m % 2 != 0) ++m;
  m = std::max<long long>(m, 2);
  return FrequencyGrid(band_width, duration, static_cast<int>(m / 2));
}

bool FrequencyGrid::operator==(const FrequencyGrid& other) const {
  return half_order_ == other.half_order_ && duration_ == other.duration_ &&
         band_width_ == other.band_width_;
}

FrequencyGrid make_grid(double band_width, double duration) {
  return FrequencyGrid::make(band_width, duration);
}

SpectralDensity::SpectralDensity(FrequencyGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.num_bins()) {
    throw InvalidArgument("SpectralDensity: " + std::to_string(values_.size()) +
                          " values for a grid of " + std::to_string(grid_.num_bins()) + " bins");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("SpectralDensity: values must be finite and nonnegative");
    }
  }
}

SpectralDensity SpectralDensity::constant(const FrequencyGrid& grid, double level) {
  return SpectralDensity(grid, std::vector<double>(grid.num_bins(), level));
}

double SpectralDensity::max() const { return *std::max_element(values_.begin(), values_.end()); }

double SpectralDensity::min() const { return *std::min_element(values_.begin(), values_.end()); }

double integrate(const SpectralDensity& sd) {
  double sum = 0.0;
  for (double v : sd.values()) sum += v;
  return sum * sd.grid().spacing();
}

SpectralDensity build_parametric_psd(const PsdShape& shape, const FrequencyGrid& grid,
                                     PsdRole role) {
  using std::numbers::pi;
  const double w = grid.band_width();

  if (const auto* table = std::get_if<TablePsd>(&shape)) validate_table(*table);

  auto evaluate = Overloaded{
      [](const FlatPsd& p, double) { return p.level; },
      [w](const NoiseValleyPsd& p, double f) {
        const double hi = p.floor * std::pow(10.0, p.depth_db / 10.0);
        return p.floor + (hi - p.floor) * 0.5 * (1.0 - std::cos(2.0 * pi * f / w));
      },
      [w](const ClutterPeakPsd& p, double f) {
        const double peak = p.peak_amplitude * std::exp(-f * f / (2.0 * p.peak_width * p.peak_width));
        const double ripple = std::cos(2.0 * pi * f * p.ripple_cycles / w);
        return p.floor + peak + p.ripple_amplitude * ripple * ripple;
      },
      [](const ClutterNotchPsd& p, double f) {
        return p.level *
               (1.0 - p.notch_depth * std::exp(-f * f / (2.0 * p.notch_width * p.notch_width)));
      },
      [](const TablePsd& p, double f) { return interpolate_table(p, f); },
  };

  std::vector<double> values(grid.num_bins());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = grid.freq(i);
    const double v = std::visit([&](const auto& p) { return evaluate(p, f); }, shape);
    if (!std::isfinite(v)) throw InvalidArgument("PSD builder produced a non-finite value");
    if (role == PsdRole::noise && !(v > 0.0)) {
      throw InvalidArgument("noise PSD must be strictly positive (bin f = " + std::to_string(f) +
                            " Hz)");
    }
    if (v < 0.0) {
      throw InvalidArgument("channel PSD must be nonnegative (bin f = " + std::to_string(f) +
                            " Hz)");
    }
    values[i] = v;
  }
  return SpectralDensity(grid, std::move(values));
}

TablePsd load_psd_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open PSD table " + path.string());
  TablePsd table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::replace(line.begin(), line.end(), ',', ' ');
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double f = 0.0;
    double v = 0.0;
    if (!(row >> f >> v)) {
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) +
                            ": expected two numeric columns");
    }
    table.freqs.push_back(f);
    table.values.push_back(v);
  }
  validate_table(table);
  return table;
}

Scenario::Scenario(SpectralDensity noise_psd, SpectralDensity channel_psd, double target_variance,
                   double energy)
    : noise_psd_(std::move(noise_psd)),
      channel_psd_(std::move(channel_psd)),
      target_variance_(target_variance),
      energy_(energy) {
  if (!(noise_psd_.grid() == channel_psd_.grid())) {
    throw InvalidArgument("Scenario: noise and channel PSDs live on different grids");
  }
  for (double v : noise_psd_.values()) {
    if (!(v > 0.0)) throw InvalidArgument("Scenario: noise PSD must be strictly positive");
  }
  if (!(target_variance_ > 0.0) || !std::isfinite(target_variance_)) {
    throw InvalidArgument("Scenario: target variance must be positive");
  }
  if (!(energy_ > 0.0) || !std::isfinite(energy_)) {
    throw InvalidArgument("Scenario: energy must be positive");
  }
}

std::vector<std::size_t> Scenario::zero_channel_bins() const {
  std::vector<std::size_t> bins;
  for (std::size_t i = 0; i < channel_psd_.size(); ++i) {
    if (channel_psd_[i] == 0.0) bins.push_back(i);
  }
  return bins;
}

Scenario Scenario::with_energy(double energy) const {
  return Scenario(noise_psd_, channel_psd_, target_variance_, energy);
}

Scenario Scenario::with_target_variance(double target_variance) const {
  return Scenario(noise_psd_, channel_psd_, target_variance, energy_);
}

}  // namespace miwave
