#ifndef DGOCP_IO_HPP
#define DGOCP_IO_HPP

#include "dgocp/assembly.hpp"

#include <map>
#include <optional>
#include <string>

namespace dgocp {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Legacy ASCII VTK of the triangulation, with optional per-element scalars.
void write_mesh_vtk(const std::string& path, const Mesh& mesh,
                    const std::vector<std::pair<std::string, Vector>>& cell_data = {});

/// Legacy ASCII VTK of discontinuous P1 fields: every element gets its own three points.
void write_fields_vtk(const std::string& path, const std::vector<std::pair<std::string, DGFunction>>& fields);

void write_matrix_market(const std::string& path, const SparseMatrix& A);

/// One row of the per-iteration history.
struct RunRecord {
    int iteration = 0;
    Index time_steps = 0;
    Index ndof = 0;
    Index elements = 0;
    double eta_y = 0, eta_z = 0, eta_q = 0, eta_q_bar = 0;
    double theta_y = 0, theta_z = 0, theta_q = 0;
    double theta_yT = 0, theta_zT = 0, xi = 0, upsilon = 0;
    std::optional<double> err_y, err_z, err_q, err_mu, true_err, eff_index;
    double wall_time = 0;  // seconds; reported on stdout, kept out of the CSV so reruns compare equal
};

std::string history_csv_header();
std::string history_csv_row(const RunRecord& r);
void write_history_csv(const std::string& path, const std::vector<RunRecord>& rows);

/// Flat "key = value" file; '#' starts a comment. Later keys override earlier ones.
std::map<std::string, std::string> read_key_values(const std::string& path);
std::map<std::string, std::string> parse_key_values(const std::string& text);

}  // namespace dgocp

#endif  // DGOCP_IO_HPP
