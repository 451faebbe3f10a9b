#ifndef ROOTMLE_IO_HPP
#define ROOTMLE_IO_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rootmle/optimizer.hpp"

namespace rootmle {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Square table of nonnegative integers, comma or whitespace separated, one
/// row per line. Blank lines and lines starting with '#' are ignored.
CountMatrix parse_counts_csv(const std::string& text);
CountMatrix read_counts_csv(const std::filesystem::path& path);
std::string format_counts_csv(const CountMatrix& counts);

/// One line per state. A line is either `absorbing` or s-1 tokens, each
/// `free` or a fixed probability for that column.
ConstraintMask parse_mask_csv(const std::string& text);
ConstraintMask read_mask_csv(const std::filesystem::path& path);
std::string format_mask_csv(const ConstraintMask& mask);

/// Real matrix in the same layout as the counts table.
Eigen::MatrixXd parse_matrix_csv(const std::string& text);
std::string format_matrix_csv(const Eigen::MatrixXd& m, int precision = 17);

/// `key = value` lines; '#' starts a comment.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Overrides fields of `base` from a key=value settings text. Unknown keys
/// are rejected.
OptimizerSettings parse_settings(const std::string& text, OptimizerSettings base = {});
OptimizerSettings read_settings(const std::filesystem::path& path, OptimizerSettings base = {});
std::string format_settings(const OptimizerSettings& settings);

/// Comma-separated integers.
std::vector<int> parse_int_list(const std::string& text);
std::vector<std::int64_t> parse_int64_list(const std::string& text);
std::string format_double(double value);

}  // namespace rootmle

#endif  // ROOTMLE_IO_HPP
