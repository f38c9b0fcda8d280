#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mint/measurement.hpp"
#include "mint/protocol.hpp"

namespace mint {

/// Discrete Fourier transform modulo n, scaled to a unitary; every entry has
/// modulus 1/sqrt(n).
CMatrix fourier_unitary(Eigen::Index n);

/// The nine domino states on 3 ox 3 in listing order: psi1, psi2+-, psi3+-,
/// psi4+-, psi5+-.
ProductBasis domino_basis();

/// The sixteen-state augmentation on 4 ox 4: the domino block embedded in
/// span{0,1,2} ox span{0,1,2} plus the two tiles psi6_i = (U3|i>)|3> and
/// psi7_j = |3>(U4|j>). The default tile unitaries are the Fourier
/// transforms; custom ones must be unitary with no zero entries.
ProductBasis augmented_domino_basis();
ProductBasis augmented_domino_basis(const CMatrix& u3, const CMatrix& u4);

/// Computational product basis |i>|j> with labels "i,j".
ProductBasis computational_basis(Eigen::Index d_A, Eigen::Index d_B);

/// The peel-off protocol: Alice measures {I - |3><3|, |3><3|}; on the first
/// outcome Bob repeats it. extended = true continues each |3> branch with
/// the other party's tile basis measurement; the domino block stays a leaf
/// and is completed separably by peel_off_family.
ProtocolTree peel_off_tree(bool extended);
ProtocolTree peel_off_tree(bool extended, const CMatrix& u3, const CMatrix& u4);

/// Completion measurements per leaf of peel_off_tree(extended), chaining to
/// the von Neumann measurement of the augmented basis.
CompletionFamily peel_off_family(bool extended);
CompletionFamily peel_off_family(bool extended, const CMatrix& u3, const CMatrix& u4);

/// Von Neumann measurement onto the four Bell states; no element has tensor
/// product form.
Measurement bell_measurement();

/// Seeded random POVM: E_i = S^{-1/2} G_i+ G_i S^{-1/2} with Gaussian G_i
/// and S their sum, so completeness holds by construction.
Measurement random_povm(Eigen::Index dim, std::size_t outcomes, unsigned seed);

using FixtureObject = std::variant<ProductBasis, Measurement, ProtocolTree, CompletionFamily>;

/// Catalog lookup by name: domino, augmented-domino, peel-off,
/// peel-off-extended, peel-off-m2, peel-off-extended-m2, bell, and
/// computational-<dA>x<dB>. Throws DomainError for unknown names.
FixtureObject fixture(const std::string& name);

/// Fixed catalog names plus the computational-<dA>x<dB> pattern entry.
std::vector<std::string> fixture_names();

}  // namespace mint
