#include "shm/modal.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace shm {

std::string_view to_string(ModalSource s) noexcept { return s == ModalSource::Oma ? "oma" : "fea"; }

Eigen::VectorXcd normalize_shape(const Eigen::Ref<const Eigen::VectorXcd>& shape) {
  const double norm = shape.norm();
  if (norm == 0.0 || !std::isfinite(norm)) throw Error(Errc::ZeroVector, "cannot normalize a zero mode shape");
  Eigen::VectorXcd out = shape / norm;
  Eigen::Index largest = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (std::abs(out[i]) > best) {
      best = std::abs(out[i]);
      largest = i;
    }
  }
  out *= std::conj(out[largest]) / best;
  out[largest] = {std::abs(out[largest]), 0.0};
  return out;
}

void sort_and_merge(ModalSet& set, double rel_tol) {
  std::stable_sort(set.modes.begin(), set.modes.end(),
                   [](const Mode& a, const Mode& b) { return a.frequency < b.frequency; });
  std::vector<Mode> merged;
  merged.reserve(set.modes.size());
  for (auto& m : set.modes) {
    if (!merged.empty() && m.frequency - merged.back().frequency <= rel_tol * merged.back().frequency) continue;
    merged.push_back(std::move(m));
  }
  set.modes = std::move(merged);
}

Eigen::MatrixXd mac_matrix(const ModalSet& a, const ModalSet& b) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(a.modes.size()), static_cast<Eigen::Index>(b.modes.size()));
  for (std::size_t i = 0; i < a.modes.size(); ++i)
    for (std::size_t j = 0; j < b.modes.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mac(a.modes[i].shape, b.modes[j].shape);
  return out;
}

ModeMatchReport match_modes(const ModalSet& oma, const ModalSet& fea, double mac_min) {
  for (const auto& o : oma.modes)
    for (const auto& f : fea.modes)
      if (o.shape.size() != f.shape.size())
        throw Error(Errc::ShapeLengthMismatch, "OMA and FEA shapes must be sampled at the same channels");

  const Eigen::MatrixXd m = mac_matrix(oma, fea);
  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  for (std::size_t i = 0; i < oma.modes.size(); ++i)
    for (std::size_t j = 0; j < fea.modes.size(); ++j) {
      const double v = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v >= mac_min) candidates.emplace_back(v, i, j);
    }
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
  });

  std::vector<bool> used_oma(oma.modes.size(), false);
  std::vector<bool> used_fea(fea.modes.size(), false);
  ModeMatchReport report;
  for (const auto& [v, i, j] : candidates) {
    if (used_oma[i] || used_fea[j]) continue;
    used_oma[i] = used_fea[j] = true;
    const double f_fea = fea.modes[j].frequency;
    report.pairs.push_back({i, j, oma.modes[i], fea.modes[j], v, (oma.modes[i].frequency - f_fea) / f_fea});
  }
  for (std::size_t i = 0; i < used_oma.size(); ++i)
    if (!used_oma[i]) report.unmatched_oma.push_back(i);
  for (std::size_t j = 0; j < used_fea.size(); ++j)
    if (!used_fea[j]) report.unmatched_fea.push_back(j);
  return report;
}

}  // namespace shm
