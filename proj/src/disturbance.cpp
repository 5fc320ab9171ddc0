#include "cbfaug/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace cbfaug {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double interpolate(const std::vector<double>& t, const std::vector<double>& v, double x) {
  if (x <= t.front()) return v.front();
  if (x >= t.back()) return v.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const auto i = static_cast<std::size_t>(it - t.begin());
  const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - w) * v[i - 1] + w * v[i];
}

std::vector<double> filtered_noise(const disturbance::FilteredNoise& spec, double dt, std::size_t count) {
  Lcg64 rng(spec.seed);
  const double a = std::exp(-spec.bandwidth * dt);
  const double b = spec.rms * std::sqrt(1.0 - a * a);
  std::vector<double> samples(count);
  // Start from the stationary distribution so the rms holds from t = 0.
  double y = spec.rms * rng.normal();
  for (auto& s : samples) {
    s = y;
    y = a * y + b * rng.normal();
  }
  return samples;
}

}  // namespace

std::uint64_t Lcg64::next() {
  state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
  return state_;
}

double Lcg64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Lcg64::normal() {
  double sum = 0.0;
  for (int i = 0; i < 12; ++i) sum += uniform();
  return sum - 6.0;
}

disturbance::Table load_disturbance_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open disturbance file " + path.string());
  disturbance::Table table;
  table.path = path;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      // A header row must not parse as numbers.
      std::istringstream probe(line);
      double x;
      if (probe >> x) throw InputError(path.string() + ":" + std::to_string(line_no) + ": missing header row");
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t, v;
    std::string rest;
    if (!(row >> t >> v) || (row >> rest)) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected two numeric columns");
    }
    if (!table.time.empty() && !(t > table.time.back())) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": time must be strictly increasing");
    }
    table.time.push_back(t);
    table.value.push_back(v);
  }
  if (!header_seen) throw InputError(path.string() + ": empty disturbance file");
  if (table.time.empty()) throw InputError(path.string() + ": no data rows");
  return table;
}

DisturbanceSignal::DisturbanceSignal(std::vector<DisturbanceProfile> profiles, double dt, double t_final)
    : profiles_(std::move(profiles)), noise_(profiles_.size()), dt_(dt) {
  const auto count = static_cast<std::size_t>(std::floor(t_final / dt)) + 2;
  for (std::size_t k = 0; k < profiles_.size(); ++k) {
    if (const auto* fn = std::get_if<disturbance::FilteredNoise>(&profiles_[k])) {
      noise_[k] = filtered_noise(*fn, dt, count);
    }
  }
}

double DisturbanceSignal::evaluate(std::size_t k, double t) const {
  return std::visit(
      Overloaded{
          [](const disturbance::None&) { return 0.0; },
          [t](const disturbance::Step& s) { return t >= s.t0 ? s.amplitude : 0.0; },
          [t](const disturbance::OneMinusCos& s) {
            if (t < s.t0 || t > s.t0 + s.duration) return 0.0;
            return 0.5 * s.amplitude * (1.0 - std::cos(2.0 * std::numbers::pi * (t - s.t0) / s.duration));
          },
          [&](const disturbance::FilteredNoise&) {
            const auto& samples = noise_[k];
            const double pos = std::max(0.0, t / dt_);
            const auto i = std::min(static_cast<std::size_t>(pos), samples.size() - 2);
            const double w = std::min(1.0, pos - static_cast<double>(i));
            return (1.0 - w) * samples[i] + w * samples[i + 1];
          },
          [t](const disturbance::Table& tab) { return interpolate(tab.time, tab.value, t); },
      },
      profiles_[k]);
}

Vector DisturbanceSignal::operator()(double t) const {
  Vector d(size());
  for (std::size_t k = 0; k < profiles_.size(); ++k) d(static_cast<Eigen::Index>(k)) = evaluate(k, t);
  return d;
}

std::string describe(const DisturbanceProfile& profile) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const disturbance::None&) { os << "none"; },
                 [&](const disturbance::Step& s) { os << "step{t0=" << s.t0 << ",amplitude=" << s.amplitude << "}"; },
                 [&](const disturbance::OneMinusCos& s) {
                   os << "one_minus_cos{t0=" << s.t0 << ",duration=" << s.duration << ",amplitude=" << s.amplitude
                      << "}";
                 },
                 [&](const disturbance::FilteredNoise& s) {
                   os << "filtered_noise{seed=" << s.seed << ",bandwidth=" << s.bandwidth << ",rms=" << s.rms << "}";
                 },
                 [&](const disturbance::Table& s) { os << "csv{path=" << s.path.string() << "}"; },
             },
             profile);
  return os.str();
}

}  // namespace cbfaug
