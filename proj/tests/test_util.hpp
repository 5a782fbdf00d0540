#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <string>

#include "covtweet/numopt.hpp"

namespace covtweet::testutil {

inline std::filesystem::path data_dir() { return COVTWEET_DATA_DIR; }
inline std::filesystem::path emoji_tsv() {
  return data_dir() / "lexicons" / "emoji.tsv";
}
inline std::filesystem::path contractions_tsv() {
  return data_dir() / "lexicons" / "contractions.tsv";
}
inline std::filesystem::path mini_train_tsv() {
  return data_dir() / "mini" / "train.tsv";
}
inline std::filesystem::path mini_valid_tsv() {
  return data_dir() / "mini" / "valid.tsv";
}

inline std::filesystem::path write_temp_file(const std::string& name,
                                             const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

// Max relative error between the analytic gradient and central finite
// differences of obj at x.
inline double gradient_check(const numopt::Objective& obj,
                             const Eigen::VectorXd& x, double eps = 1e-6) {
  Eigen::VectorXd grad(obj.dim);
  obj.eval(x, grad);
  Eigen::VectorXd scratch(obj.dim);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < obj.dim; ++i) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[i] += eps;
    xm[i] -= eps;
    const double fd =
        (obj.eval(xp, scratch) - obj.eval(xm, scratch)) / (2.0 * eps);
    const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
    worst = std::max(worst, std::abs(fd - grad[i]) / denom);
  }
  return worst;
}

}  // namespace covtweet::testutil
