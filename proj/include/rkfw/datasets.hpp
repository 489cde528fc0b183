#ifndef RKFW_DATASETS_HPP_
#define RKFW_DATASETS_HPP_

#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rkfw/problems.hpp"

namespace rkfw {

struct SvmlightData {
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;
  std::vector<std::string> warnings;
};

/// `label idx:val idx:val ...` rows with 1-based indices and optional `#`
/// comments. Labels 0/1/-1 map to -1/1/-1. Errors carry the line number.
SvmlightData read_svmlight(std::istream& in, Eigen::Index max_feature = 10'000'000);
SvmlightData load_svmlight(const std::string& path);

/// Tab-separated `user item rating [timestamp]` rows with 1-based ids; returns
/// 0-based indices and the raw rating. Ratings must lie in [1, 5] and each
/// (user, item) pair may appear once.
std::vector<Rating> read_movielens(std::istream& in);
std::vector<Rating> load_movielens(const std::string& path);

}  // namespace rkfw

#endif  // RKFW_DATASETS_HPP_
