#pragma once

// JSON file formats, schema version "1". Complex entries are [re, im] pairs
// and matrices are arrays of rows.

#include "msys/error.hpp"
#include "msys/factorization.hpp"
#include "msys/system.hpp"

#include <json.hpp>

#include <filesystem>
#include <string_view>

namespace msys::io {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1";

/// Malformed or inconsistent file content.
class ParseError : public Error {
 public:
  using Error::Error;
};

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, Index rows, Index cols, std::string_view what);

Json system_to_json(const MultiSystem& s);
/// Parses and validates a system document.
MultiSystem system_from_json(const Json& j);

/// {"schema_version", "n_params", "dim_u", "dim_y",
///  "coefficients": [{"index": [...], "matrix": ...}, ...]}
Json germ_to_json(const PolyGerm& g);
PolyGerm germ_from_json(const Json& j);

/// {"schema_version", "ambient_dim", "dim", "basis"}; orthonormality is
/// re-checked on load.
Json subspace_to_json(const Subspace& s);
Subspace subspace_from_json(const Json& j);

Json chain_to_json(const LinearFactorChain& chain);
LinearFactorChain chain_from_json(const Json& j);

Json tail_to_json(const TailFunction& tail);

Json complex_vector_to_json(const ComplexVector& v);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

MultiSystem read_system_file(const std::filesystem::path& path);
void write_system_file(const std::filesystem::path& path, const MultiSystem& s);
PolyGerm read_germ_file(const std::filesystem::path& path);
Subspace read_subspace_file(const std::filesystem::path& path);

}  // namespace msys::io
