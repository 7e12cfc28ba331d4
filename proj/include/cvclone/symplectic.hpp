#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "cvclone/phase_space.hpp"

namespace cvclone {

/// Affine phase-space map r -> S r + d acting on a subset of modes.
///
/// `matrix` and `displacement` are expressed on the local register formed by
/// `modes` (in that order); `apply` and `compose` embed them into larger
/// registers on demand.
struct SymplecticOp {
    Matrix matrix;
    Vector displacement;
    std::vector<ModeLabel> modes;

    std::size_t num_modes() const { return modes.size(); }
};

/// Identity map on the given modes.
SymplecticOp identity_op(std::vector<ModeLabel> modes);

/// Builds an op, validating dimensions, distinct modes and symplecticity.
SymplecticOp make_op(Matrix matrix, Vector displacement, std::vector<ModeLabel> modes);

/// ||S Omega S^T - Omega||_max <= tol.
bool is_symplectic(const Matrix &s, double tol = kStructuralTol);

/// QND gate generated by H = p_c p_t, U = exp(-i kappa p_c p_t):
/// x_c -> x_c + kappa p_t, x_t -> x_t + kappa p_c, momenta unchanged.
SymplecticOp qnd_pp(double kappa, ModeLabel control, ModeLabel target);

/// QND gate generated by H = x_c p_t:
/// x_t -> x_t + kappa x_c, p_c -> p_c - kappa p_t. kappa=1 is the CV C-NOT,
/// kappa=-1 its inverse.
SymplecticOp qnd_xp(double kappa, ModeLabel control, ModeLabel target);

/// x -> x cos(theta) + p sin(theta), p -> -x sin(theta) + p cos(theta).
SymplecticOp phase_rotation(double theta, ModeLabel mode);

/// Balanced beam splitter, applied identically to both quadratures:
///   out1 = (in1 - in2)/sqrt(2),  out2 = (in1 + in2)/sqrt(2).
/// This is the only place the sign convention is fixed.
SymplecticOp beam_splitter_balanced(ModeLabel mode1, ModeLabel mode2);

/// x -> factor * x, p -> p / factor.
SymplecticOp squeezer(double factor, ModeLabel mode);

/// Pure displacement; `d` holds (x,p) pairs for each listed mode.
SymplecticOp displace(const Vector &d, std::vector<ModeLabel> modes);

/// Lift an op onto a register of `num_modes` modes, returning (S, d).
std::pair<Matrix, Vector> embed(const SymplecticOp &op, std::size_t num_modes);

GaussianState apply(const SymplecticOp &op, const GaussianState &state);

/// Single op equivalent to applying `ops` front to back. The result acts on
/// the sorted union of the operand modes.
SymplecticOp compose(std::span<const SymplecticOp> ops);
SymplecticOp compose(std::initializer_list<SymplecticOp> ops);

SymplecticOp inverse(const SymplecticOp &op);

void to_json(nlohmann::json &j, const SymplecticOp &op);

} // namespace cvclone
