#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "covdim/dimtest.hpp"
#include "covdim/kron.hpp"
#include "covdim/simulate.hpp"

namespace covdim {

// Reads group_<id>.csv files (header of p column names, then rows of
// observations) and returns groups sorted by id, transposed to p x n.
std::vector<GroupSample> load_groups(const std::filesystem::path& dir);

// Long-format CSV: obs,row,col,value with a complete p x q grid per obs.
std::vector<Eigen::MatrixXd> load_matrix_observations(
    const std::filesystem::path& file);

// Reports are written as <out>.json (stable key order, no timestamp) plus a
// sibling <out>.csv where tabular. `config_json` is the resolved run
// configuration serialized by the CLI.
void emit_report(const TestReport& r, const std::filesystem::path& out,
                 const std::string& config_json);
void emit_report(const SequentialReport& r, const std::filesystem::path& out,
                 const std::string& config_json);
void emit_report(const McResult& r, const std::filesystem::path& out,
                 const std::string& config_json);
void emit_report(const RssSummary& r, const std::filesystem::path& out,
                 const std::string& config_json);

}  // namespace covdim
