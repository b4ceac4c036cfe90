#pragma once

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "shm/error.hpp"

namespace shm {

enum class ModalSource { Oma, Fea };

std::string_view to_string(ModalSource s) noexcept;

struct Mode {
  double frequency = 0.0;  // Hz
  double damping = 0.0;    // ratio of critical
  Eigen::VectorXcd shape;  // unit length, largest component real-positive
};

/// Modes sorted by ascending frequency.
struct ModalSet {
  std::vector<Mode> modes;
  ModalSource source = ModalSource::Oma;
};

// Unit Euclidean length, then rotated so the largest-magnitude component
// (first one on ties) is real and positive.
Eigen::VectorXcd normalize_shape(const Eigen::Ref<const Eigen::VectorXcd>& shape);

// Sorts by frequency and drops modes whose frequency repeats an earlier one
// within `rel_tol`.
void sort_and_merge(ModalSet& set, double rel_tol = 1e-9);

/// Modal assurance criterion |aᴴb|² / ((aᴴa)(bᴴb)), in [0, 1].
template <typename DerivedA, typename DerivedB>
double mac(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw Error(Errc::LengthMismatch, "mode shapes differ in length");
  const double aa = a.squaredNorm();
  const double bb = b.squaredNorm();
  if (aa == 0.0 || bb == 0.0) throw Error(Errc::ZeroVector, "MAC of a zero vector");
  const double cross = std::norm(std::complex<double>(a.dot(b)));
  const double value = cross / (aa * bb);
  return value > 1.0 ? 1.0 : value;
}

// MAC of every (row: a, column: b) pair.
Eigen::MatrixXd mac_matrix(const ModalSet& a, const ModalSet& b);

struct ModePair {
  std::size_t oma_index = 0;
  std::size_t fea_index = 0;
  Mode oma;
  Mode fea;
  double mac = 0.0;
  double freq_diff_rel = 0.0;  // (f_oma - f_fea) / f_fea
};

struct ModeMatchReport {
  std::vector<ModePair> pairs;  // descending MAC
  std::vector<std::size_t> unmatched_oma;
  std::vector<std::size_t> unmatched_fea;
};

/// Greedy pairing on descending MAC. Candidates below `mac_min` are never paired.
ModeMatchReport match_modes(const ModalSet& oma, const ModalSet& fea, double mac_min);

}  // namespace shm
