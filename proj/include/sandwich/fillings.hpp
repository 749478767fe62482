#pragma once

// Milnor-fibre data attached to an incidence matrix: the Gram matrix of the
// sphere classes, the handle description of the cap (which depends on the
// germ only), Euler numbers, a diagnostic kernel lattice, and the class
// comparisons behind filling counts.

#include <cstddef>
#include <string>
#include <vector>

#include "sandwich/format.hpp"
#include "sandwich/germ.hpp"
#include "sandwich/incidence.hpp"
#include "sandwich/linalg.hpp"

namespace sandwich {

using IntMatrix = std::vector<std::vector<long long>>;

/// -(l_i + 2 delta_i) on the diagonal, -C_i.C_k off it.
IntMatrix sphere_gram_closed_form(const ConstraintSet& cs);

/// -M M^T, cross-checked against the closed form. Throws
/// Error("ConstraintMismatch") if M violates the germ's constraints or the
/// two computations disagree.
IntMatrix sphere_gram(const DecoratedGerm& germ, const IncidenceMatrix& m);

struct HandleRecord {
  std::string branch;          // branch name
  long long framing = 0;       // -(l_i + 2 delta_i)
  std::string piece;           // F_i, a vertex label of E(C, l)
  int piece_weight = 0;        // self-intersection of F_i
  int fiber_framing_offset = 1;

  bool operator==(const HandleRecord&) const = default;
};

/// One 2-handle per branch, attached along a fibre over the marked piece.
struct CapDescription {
  std::vector<HandleRecord> handles;

  std::string render(OutputFormat format = OutputFormat::Text) const;
  bool operator==(const CapDescription&) const = default;
};

/// Depends on (C, l) only; there is deliberately no matrix parameter.
/// Throws Error("NotStandard") for non-standard germs and propagates marking
/// errors.
CapDescription cap_description(const DecoratedGerm& germ, MRule rule = MRule::PaperCalibrated);

/// 1 + n - r.
long long euler_number(const IncidenceMatrix& m);

/// {v in Z^n : M v = 0} with the form induced by the diagonal -1 form.
struct KernelLattice {
  std::size_t rank = 0;
  Matrix<Integer> basis;  // rows, Hermite normal form
  Matrix<Integer> gram;   // -B B^T
};

KernelLattice kernel_lattice(const IncidenceMatrix& m);

enum class Distinction { SameClass, DistinctFillings };
std::string to_string(Distinction d);

struct DistinctionVerdict {
  Distinction verdict = Distinction::SameClass;
  std::string reason;
};

/// Throws Error("ConstraintMismatch") if either matrix fails validation.
DistinctionVerdict distinguish(const DecoratedGerm& germ, const IncidenceMatrix& a, const IncidenceMatrix& b);

struct GermMatrixSet {
  DecoratedGerm germ;
  std::vector<IncidenceMatrix> matrices;
};

/// Number of column-permutation classes across all sets. Every pair of germs
/// must be topologically equivalent (Error("NotEquivalentGerms")) and every
/// matrix must satisfy its germ's constraints (Error("ConstraintMismatch")).
std::size_t filling_lower_bound(const std::vector<GermMatrixSet>& sets);

/// Whether a class count only reflects the necessary conditions on the
/// matrix or matrices actually realised by deformations.
enum class CountKind { NecessaryCondition, Realized };
std::string to_string(CountKind kind);

struct FillingReport {
  IncidenceMatrix matrix;  // canonical
  IntMatrix gram;
  long long euler = 0;
  KernelLattice lattice;
};

FillingReport filling_report(const DecoratedGerm& germ, const IncidenceMatrix& m);

/// Cap description (when the germ is standard), one block per matrix, and a
/// final "<kind> classes: N" line counting distinct classes.
std::string render_reports(const DecoratedGerm& germ, const std::vector<FillingReport>& reports, CountKind kind,
                           OutputFormat format = OutputFormat::Text, MRule rule = MRule::PaperCalibrated);

}  // namespace sandwich
