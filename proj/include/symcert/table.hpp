#pragma once

#include <Eigen/Dense>

#include <cstddef>

#include "symcert/errors.hpp"

namespace symcert {

/// A candidate representation f: W -> Z as a finite table, one latent row
/// per world-state index.
class RepresentationTable {
 public:
  explicit RepresentationTable(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
    if (!rows_.allFinite()) throw InvalidArgument("representation table contains non-finite values");
  }

  std::size_t size() const { return std::size_t(rows_.rows()); }
  std::size_t dim() const { return std::size_t(rows_.cols()); }
  Eigen::VectorXd vector(std::size_t state) const { return rows_.row(Eigen::Index(state)).transpose(); }
  const Eigen::MatrixXd& rows() const { return rows_; }

 private:
  Eigen::MatrixXd rows_;
};

}  // namespace symcert
