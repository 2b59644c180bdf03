#include "fockdyson/numerics.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace fockdyson::numerics {

void write_matrix(std::ostream& out, const ComplexSparseMatrix& m) {
    const Eigen::SparseMatrix<Complex, Eigen::RowMajor> rows(m.storage());
    out << m.dim() << ' ' << m.nnz() << ' ' << (m.hermitian() ? 1 : 0) << '\n';
    out << std::setprecision(17);
    for (Index r = 0; r < rows.outerSize(); ++r)
        for (decltype(rows)::InnerIterator it(rows, r); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' '
                << it.value().imag() << '\n';
}

void write_matrix(const std::string& path, const ComplexSparseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open matrix file for writing: " + path);
    write_matrix(out, m);
    if (!out) throw Error("failed writing matrix file: " + path);
}

ComplexSparseMatrix read_matrix(std::istream& in, const Tolerances& tol) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("matrix file: missing header");
    std::istringstream header(line);
    Index dim = -1;
    Index nnz = -1;
    std::string herm;
    if (!(header >> dim >> nnz >> herm) || dim < 0 || nnz < 0)
        throw ParseError("matrix file: header must be `dim nnz hermitian`, got: " + line);
    bool hermitian = false;
    if (herm == "1" || herm == "true")
        hermitian = true;
    else if (herm != "0" && herm != "false")
        throw ParseError("matrix file: hermitian flag must be 0/1/true/false, got: " + herm);

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(nnz));
    for (Index k = 0; k < nnz; ++k) {
        if (!std::getline(in, line))
            throw ParseError("matrix file: expected " + std::to_string(nnz) + " entries, got " +
                             std::to_string(k));
        std::istringstream entry(line);
        Index r = 0;
        Index c = 0;
        double re = 0.0;
        double im = 0.0;
        if (!(entry >> r >> c >> re >> im))
            throw ParseError("matrix file: malformed entry line: " + line);
        if (r < 0 || c < 0 || r >= dim || c >= dim)
            throw ParseError("matrix file: entry index out of range: " + line);
        triplets.emplace_back(r, c, Complex(re, im));
    }
    return ComplexSparseMatrix::from_triplets(dim, triplets, hermitian, tol);
}

ComplexSparseMatrix read_matrix(const std::string& path, const Tolerances& tol) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open matrix file: " + path);
    return read_matrix(in, tol);
}

}  // namespace fockdyson::numerics
