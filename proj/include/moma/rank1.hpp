#pragma once

// Incremental inverse of a principal submatrix Z[a, a] under single-index
// additions and removals (bordering / Schur-complement updates).

#include <algorithm>
#include <complex>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "moma/errors.hpp"

namespace moma {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Updates and pivots whose magnitude falls below this are treated as singular.
inline constexpr double kSingularPivot = 1e-12;

/// Sherman-Morrison: inverse of (A + u v^T) given Y = A^{-1}. Returns false
/// (leaving `y` untouched) when 1 + v^T Y u is numerically zero.
inline bool sherman_morrison(CMatrix& y, const CVector& u, const CVector& v) {
  const CVector yu = y * u;
  const Eigen::RowVectorXcd vy = v.transpose() * y;
  const cplx denom = cplx(1.0) + (v.transpose() * yu)(0, 0);
  if (std::abs(denom) < kSingularPivot) return false;
  y.noalias() -= (yu * vy) / denom;
  return true;
}

class InverseState {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  InverseState(std::shared_ptr<const CMatrix> z, std::vector<std::size_t> active)
      : z_(std::move(z)), active_(std::move(active)) {
    if (!z_ || z_->rows() != z_->cols()) throw ContractError("InverseState: matrix must be square");
    pos_.assign(static_cast<std::size_t>(z_->rows()), npos);
    for (std::size_t i = 0; i < active_.size(); ++i) {
      if (active_[i] >= pos_.size() || pos_[active_[i]] != npos) throw ContractError("InverseState: bad active index list");
      pos_[active_[i]] = i;
    }
    refactor();
  }

  const CMatrix& matrix() const { return *z_; }
  const std::vector<std::size_t>& active() const { return active_; }
  const CMatrix& inverse() const { return y_; }
  std::size_t position(std::size_t k) const { return pos_[k]; }
  bool is_active(std::size_t k) const { return pos_[k] != npos; }
  std::size_t updates_since_refactor() const { return updates_; }

  CMatrix reduced() const {
    const auto k = static_cast<Eigen::Index>(active_.size());
    CMatrix r(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) r(i, j) = (*z_)(static_cast<Eigen::Index>(active_[i]), static_cast<Eigen::Index>(active_[j]));
    return r;
  }

  /// Direct LU inversion of the current reduced matrix.
  void refactor() {
    updates_ = 0;
    if (active_.empty()) {
      y_.resize(0, 0);
      return;
    }
    const CMatrix r = reduced();
    Eigen::PartialPivLU<CMatrix> lu(r);
    if (std::abs(lu.determinant()) == 0.0) throw ContractError("InverseState: reduced matrix is singular");
    y_ = lu.inverse();
  }

  /// Borders the inverse with index k. Returns false when the Schur
  /// complement is numerically zero; the state is then unchanged.
  bool add(std::size_t k) {
    if (is_active(k)) throw ContractError("InverseState::add: index already active");
    const auto n = static_cast<Eigen::Index>(active_.size());
    const auto kk = static_cast<Eigen::Index>(k);
    CVector b(n), c(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      b(i) = (*z_)(static_cast<Eigen::Index>(active_[i]), kk);
      c(i) = (*z_)(kk, static_cast<Eigen::Index>(active_[i]));
    }
    const CVector u = y_ * b;
    const CVector v = y_.transpose() * c;
    const cplx s = (*z_)(kk, kk) - (c.transpose() * u)(0, 0);
    if (std::abs(s) < kSingularPivot) return false;
    CMatrix ny(n + 1, n + 1);
    ny.topLeftCorner(n, n) = y_ + (u * v.transpose()) / s;
    ny.topRightCorner(n, 1) = -u / s;
    ny.bottomLeftCorner(1, n) = -v.transpose() / s;
    ny(n, n) = cplx(1.0) / s;
    y_.swap(ny);
    pos_[k] = active_.size();
    active_.push_back(k);
    ++updates_;
    return true;
  }

  /// Deletes index k from the inverse. Returns false when the corresponding
  /// pivot of the inverse is numerically zero.
  bool remove(std::size_t k) {
    if (!is_active(k)) throw ContractError("InverseState::remove: index not active");
    const auto p = static_cast<Eigen::Index>(pos_[k]);
    const auto n = static_cast<Eigen::Index>(active_.size());
    const cplx piv = y_(p, p);
    if (std::abs(piv) < kSingularPivot) return false;
    // Move row/column p to the end, then take the Schur complement.
    const Eigen::Index last = n - 1;
    if (p != last) {
      y_.row(p).swap(y_.row(last));
      y_.col(p).swap(y_.col(last));
      std::swap(active_[static_cast<std::size_t>(p)], active_[static_cast<std::size_t>(last)]);
      pos_[active_[static_cast<std::size_t>(p)]] = static_cast<std::size_t>(p);
    }
    CMatrix ny = y_.topLeftCorner(last, last) - (y_.topRightCorner(last, 1) * y_.bottomLeftCorner(1, last)) / y_(last, last);
    y_.swap(ny);
    active_.pop_back();
    pos_[k] = npos;
    ++updates_;
    return true;
  }

  /// ||Y Z_aa - I||_F / sqrt(k): deviation of the tracked inverse from exact.
  double identity_residual() const {
    if (active_.empty()) return 0.0;
    const auto k = static_cast<Eigen::Index>(active_.size());
    return (y_ * reduced() - CMatrix::Identity(k, k)).norm() / std::sqrt(static_cast<double>(k));
  }

 private:
  std::shared_ptr<const CMatrix> z_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> pos_;
  CMatrix y_;
  std::size_t updates_ = 0;
};

}  // namespace moma
