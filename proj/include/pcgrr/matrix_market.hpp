#pragma once

#include "pcgrr/sparse.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace pcgrr {

struct MatrixMarketData {
    CsrMatrix matrix;
    /// Number of coordinate triplets in the file (one triangle for symmetric files).
    std::size_t raw_entries = 0;
    std::string field;     ///< "real" or "integer"
    std::string symmetry;  ///< "symmetric" or "general"
};

/// Reads a `matrix coordinate {real|integer} {symmetric|general}` file and
/// returns the fully expanded symmetric matrix. General files must be
/// numerically symmetric. Duplicate triplets are summed.
MatrixMarketData read_matrix_market(std::istream& in);
MatrixMarketData read_matrix_market_file(const std::filesystem::path& path);

/// Writes the lower triangle as `matrix coordinate real symmetric`, values
/// printed with 17 significant digits so a read round-trips exactly.
void write_matrix_market(const CsrMatrix& A, std::ostream& out);

} // namespace pcgrr
