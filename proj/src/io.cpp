#include "dgocp/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace dgocp {

namespace {

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << std::setprecision(16);
    return out;
}

void write_cells(std::ostream& out, Index n, const std::function<std::array<Index, 3>(Index)>& ids)
{
    out << "CELLS " << n << ' ' << 4 * n << '\n';
    for (Index k = 0; k < n; ++k) {
        const auto v = ids(k);
        out << "3 " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    }
    out << "CELL_TYPES " << n << '\n';
    for (Index k = 0; k < n; ++k) {
        out << "5\n";
    }
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void write_mesh_vtk(const std::string& path, const Mesh& mesh,
                    const std::vector<std::pair<std::string, Vector>>& cell_data)
{
    std::ofstream out = open_out(path);
    out << "# vtk DataFile Version 3.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const Vertex& v : mesh.vertices()) {
        out << v.x.x() << ' ' << v.x.y() << " 0\n";
    }
    write_cells(out, mesh.num_elements(), [&](Index k) { return mesh.element(k).vertices; });
    out << "CELL_DATA " << mesh.num_elements() << '\n';
    out << "SCALARS level int 1\nLOOKUP_TABLE default\n";
    for (const Element& el : mesh.elements()) {
        out << el.level << '\n';
    }
    for (const auto& [name, values] : cell_data) {
        if (values.size() != mesh.num_elements()) {
            throw IoError("cell data '" + name + "' does not match the element count");
        }
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (Index k = 0; k < values.size(); ++k) {
            out << values[k] << '\n';
        }
    }
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

void write_fields_vtk(const std::string& path, const std::vector<std::pair<std::string, DGFunction>>& fields)
{
    if (fields.empty()) {
        throw IoError("no fields to write");
    }
    const Mesh& mesh = *fields.front().second.mesh;
    for (const auto& f : fields) {
        if (f.second.mesh.get() != &mesh) {
            throw IoError("fields written together must share a mesh");
        }
    }
    std::ofstream out = open_out(path);
    const Index n = mesh.num_elements();
    out << "# vtk DataFile Version 3.0\nfields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << 3 * n << " double\n";
    for (Index k = 0; k < n; ++k) {
        for (Index v : mesh.element(k).vertices) {
            out << mesh.point(v).x() << ' ' << mesh.point(v).y() << " 0\n";
        }
    }
    write_cells(out, n, [](Index k) { return std::array<Index, 3>{3 * k, 3 * k + 1, 3 * k + 2}; });
    out << "POINT_DATA " << 3 * n << '\n';
    for (const auto& [name, f] : fields) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (Index i = 0; i < 3 * n; ++i) {
            out << f.coeffs[i] << '\n';
        }
    }
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

void write_matrix_market(const std::string& path, const SparseMatrix& A)
{
    std::ofstream out = open_out(path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
    for (Index i = 0; i < A.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
        }
    }
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

std::string history_csv_header()
{
    return "iter,time_steps,ndof,elements,eta_y,eta_z,eta_q,eta_q_bar,theta_y,theta_z,theta_q,theta_yT,"
           "theta_zT,xi,upsilon,err_y,err_z,err_q,err_mu,true_err,eff_index";
}

std::string history_csv_row(const RunRecord& r)
{
    std::ostringstream os;
    os << std::setprecision(10);
    os << r.iteration << ',' << r.time_steps << ',' << r.ndof << ',' << r.elements;
    for (double v : {r.eta_y, r.eta_z, r.eta_q, r.eta_q_bar, r.theta_y, r.theta_z, r.theta_q, r.theta_yT,
                     r.theta_zT, r.xi, r.upsilon}) {
        os << ',' << v;
    }
    for (const auto& v : {r.err_y, r.err_z, r.err_q, r.err_mu, r.true_err, r.eff_index}) {
        os << ',';
        if (v) {
            os << *v;
        }
    }
    return os.str();
}

void write_history_csv(const std::string& path, const std::vector<RunRecord>& rows)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << history_csv_header() << '\n';
    for (const RunRecord& r : rows) {
        out << history_csv_row(r) << '\n';
    }
}

std::map<std::string, std::string> parse_key_values(const std::string& text)
{
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw IoError("line " + std::to_string(number) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw IoError("line " + std::to_string(number) + ": empty key");
        }
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> read_key_values(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_key_values(buffer.str());
}

}  // namespace dgocp
