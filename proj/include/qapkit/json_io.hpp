// JSON encodings of the library objects, text-table renderers for the CLI,
// parsers that read those text tables back into the same JSON objects, and
// the golden-table comparison used by fixtures.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "qapkit/numeric_kak.hpp"
#include "qapkit/partition.hpp"
#include "qapkit/qap.hpp"
#include "qapkit/rootsystem.hpp"
#include "qapkit/sequence.hpp"

namespace qapkit {

using Json = nlohmann::json;

class FormatError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------ basic objects

Json to_json(const BiSubalgebra &B);
BiSubalgebra bisubalgebra_from_json(const Json &j);
Json to_json(const CommutatorPartition &P);
Json to_json(const CosetPartition &P);
Json spinor_list(int p, const std::vector<uint64_t> &labels);
/// Accepts "S[z|a]" and the bare "z|a" form.
uint64_t parse_label(const std::string &s, int p = -1);

// ------------------------------------------------- enumeration listings

struct ListingFilter {
    bool abelian_only = false;
    bool cartan_only = false;
    std::string name() const;  // "all" | "abelian" | "cartan"
};
Json listing_json(int p, int order, const ListingFilter &f, const std::vector<BiSubalgebra> &items);
std::string render_listing(int p, int order, const ListingFilter &f, const std::vector<BiSubalgebra> &items);

// ------------------------------------------------------ quotient tables

/// {"name", "f", "i", "eps", "members"}; the identity key of a co-quotient
/// center row is named "0". In lambda mode "members" is replaced by a
/// "lambda" string (the cell's lambda rendering, "{0}" when null).
Json cell_json(const QAPartition &P, Key k, bool identity_as_zero = false, bool lambda = false);
Json to_json(const QAPartition &P, bool lambda = false);
Json to_json(const CoQuotientAlgebra &Q, bool lambda = false);
/// render_quotient / render_coquotient, or with lambda = true the same layout
/// with lambda-rendered cells and a "render=lambda" header token.
std::string render_quotient_table(const QAPartition &P, bool lambda);
std::string render_coquotient_table(const CoQuotientAlgebra &Q, bool lambda);

// ------------------------------------------------------------ root tables

Json to_json(const RootSystem &rs, const RootPartition &part, const RootReport *report = nullptr);
/// render_partition plus, when a report is given, a verification line and
/// one "failure:" line per recorded failure.
std::string render_roots(const RootSystem &rs, const RootPartition &part, const RootReport *report = nullptr);

// ---------------------------------------------------------- decompositions

struct DecompositionRow {
    Decomposition D;
    TypeDecision decision;
};
Json decomposition_json(const DecompositionRow &row, bool lambda);
Json decompositions_json(const QAPartition &P, const std::string &type_filter,
                         const std::vector<DecompositionRow> &rows, bool lambda);
std::string render_decompositions(const QAPartition &P, const std::string &type_filter,
                                  const std::vector<DecompositionRow> &rows, bool lambda);
Json divided_json(const DividedDecomposition &D, bool lambda);
std::string render_divided(const DividedDecomposition &D, bool lambda);

// -------------------------------------------------------------- sequences

Json to_json(const DecompositionSequence &S);
std::string render_sequence(const DecompositionSequence &S);
/// Rebuilds the partition from "p", "cartan", "center" and the level forms.
DecompositionSequence sequence_from_json(const Json &j);

// ------------------------------------------------------------- numerics

Json matrix_json(const CMat &M);  // rows of "a+bi" literals
CMat matrix_from_json(const Json &j);
Json to_json(const KAKResult &r, bool matrices);
Json to_json(const FactorTree &t, bool matrices);

// ---------------------------------------------------------- text parsers

/// Parses any table produced by render_listing, render_quotient,
/// render_coquotient, render_roots, render_decompositions, render_divided or
/// render_sequence back into the JSON object the matching encoder produces.
Json parse_table_text(const std::string &text);

// -------------------------------------------------------- golden fixtures

struct FixtureReport {
    bool ok = true;
    std::string table;  // "quotient" or "co-quotient"
    size_t rows_checked = 0;
    std::vector<std::string> failures;
};

/// Fixture layout: {"p", "cartan": [labels], "center": [labels],
/// "coquotient_center": label | null, "top": [labels], "rows": [{"left",
/// "W", "right", "W_hat"}]}. Rebuilds the table from the inputs and compares
/// member-for-member (rows with names by key name, unnamed rows as
/// unordered pairs of cells).
FixtureReport compare_fixture(const Json &fixture);

}  // namespace qapkit
