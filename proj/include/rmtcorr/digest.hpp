#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace rmtcorr {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Digest of a matrix's shape and raw column-major doubles.
std::string sha256_matrix(const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace rmtcorr
