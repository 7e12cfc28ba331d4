#include "cvclone/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cvclone/errors.hpp"

namespace cvclone {
namespace {

void require_distinct(const std::vector<ModeLabel> &modes) {
    std::set<std::size_t> seen;
    for (const auto &m : modes)
        if (!seen.insert(m.index).second)
            throw DomainError("gate acts twice on mode " + std::to_string(m.index));
}

// Local 2x2 block view for a two-mode gate on (x_c, p_c, x_t, p_t).
Matrix two_mode_identity() { return Matrix::Identity(4, 4); }

} // namespace

SymplecticOp identity_op(std::vector<ModeLabel> modes) {
    const auto dim = static_cast<Eigen::Index>(2 * modes.size());
    return make_op(Matrix::Identity(dim, dim), Vector::Zero(dim), std::move(modes));
}

bool is_symplectic(const Matrix &s, double tol) {
    if (s.rows() != s.cols() || s.rows() % 2 != 0)
        return false;
    const Matrix omega = symplectic_form(static_cast<std::size_t>(s.rows() / 2));
    if (s.rows() == 0)
        return true;
    return (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff() <= tol;
}

SymplecticOp make_op(Matrix matrix, Vector displacement, std::vector<ModeLabel> modes) {
    const auto dim = static_cast<Eigen::Index>(2 * modes.size());
    if (matrix.rows() != dim || matrix.cols() != dim || displacement.size() != dim)
        throw DomainError("op dimensions do not match its mode list");
    require_distinct(modes);
    if (!matrix.allFinite() || !displacement.allFinite())
        throw DomainError("op contains non-finite entries");
    if (!is_symplectic(matrix))
        throw InvariantViolation("symplectic", "S Omega S^T != Omega");
    return {std::move(matrix), std::move(displacement), std::move(modes)};
}

SymplecticOp qnd_pp(double kappa, ModeLabel control, ModeLabel target) {
    if (control == target)
        throw DomainError("qnd_pp: control and target must differ");
    Matrix s = two_mode_identity();
    s(0, 3) = kappa; // x_c += kappa p_t
    s(2, 1) = kappa; // x_t += kappa p_c
    return make_op(std::move(s), Vector::Zero(4), {control, target});
}

SymplecticOp qnd_xp(double kappa, ModeLabel control, ModeLabel target) {
    if (control == target)
        throw DomainError("qnd_xp: control and target must differ");
    Matrix s = two_mode_identity();
    s(2, 0) = kappa;  // x_t += kappa x_c
    s(1, 3) = -kappa; // p_c -= kappa p_t
    return make_op(std::move(s), Vector::Zero(4), {control, target});
}

SymplecticOp phase_rotation(double theta, ModeLabel mode) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Matrix r(2, 2);
    r << c, s, -s, c;
    return make_op(std::move(r), Vector::Zero(2), {mode});
}

SymplecticOp beam_splitter_balanced(ModeLabel mode1, ModeLabel mode2) {
    if (mode1 == mode2)
        throw DomainError("beam splitter: modes must differ");
    const double h = 1.0 / std::sqrt(2.0);
    Matrix s = Matrix::Zero(4, 4);
    for (Eigen::Index q = 0; q < 2; ++q) {
        s(q, q) = h;
        s(q, 2 + q) = -h;
        s(2 + q, q) = h;
        s(2 + q, 2 + q) = h;
    }
    return make_op(std::move(s), Vector::Zero(4), {mode1, mode2});
}

SymplecticOp squeezer(double factor, ModeLabel mode) {
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw DomainError("squeezer factor must be positive and finite");
    Matrix s = Matrix::Zero(2, 2);
    s(0, 0) = factor;
    s(1, 1) = 1.0 / factor;
    return make_op(std::move(s), Vector::Zero(2), {mode});
}

SymplecticOp displace(const Vector &d, std::vector<ModeLabel> modes) {
    if (d.size() != static_cast<Eigen::Index>(2 * modes.size()))
        throw DomainError("displacement length must be twice the number of modes");
    const auto dim = d.size();
    return make_op(Matrix::Identity(dim, dim), d, std::move(modes));
}

std::pair<Matrix, Vector> embed(const SymplecticOp &op, std::size_t num_modes) {
    const auto dim = static_cast<Eigen::Index>(2 * num_modes);
    Matrix s = Matrix::Identity(dim, dim);
    Vector d = Vector::Zero(dim);
    std::vector<Eigen::Index> rows;
    for (const auto &m : op.modes) {
        if (m.index >= num_modes)
            throw DomainError("op addresses mode " + std::to_string(m.index) + " outside a " +
                              std::to_string(num_modes) + "-mode register");
        rows.push_back(static_cast<Eigen::Index>(2 * m.index));
        rows.push_back(static_cast<Eigen::Index>(2 * m.index + 1));
    }
    s(rows, rows) = op.matrix;
    d(rows) = op.displacement;
    return {std::move(s), std::move(d)};
}

GaussianState apply(const SymplecticOp &op, const GaussianState &state) {
    const auto [s, d] = embed(op, state.num_modes());
    Matrix cov = s * state.cov() * s.transpose();
    cov = 0.5 * (cov + cov.transpose());
    return {s * state.mean() + d, std::move(cov)};
}

SymplecticOp compose(std::span<const SymplecticOp> ops) {
    std::set<std::size_t> indices;
    for (const auto &op : ops)
        for (const auto &m : op.modes)
            indices.insert(m.index);

    // Work on a register spanning all touched indices, then compress.
    const std::size_t span_modes = indices.empty() ? 0 : *indices.rbegin() + 1;
    const auto dim = static_cast<Eigen::Index>(2 * span_modes);
    Matrix s = Matrix::Identity(dim, dim);
    Vector d = Vector::Zero(dim);
    for (const auto &op : ops) {
        const auto [so, dop] = embed(op, span_modes);
        s = so * s;
        d = so * d + dop;
    }

    std::vector<ModeLabel> modes;
    std::vector<Eigen::Index> rows;
    for (auto i : indices) {
        ModeLabel label{i};
        for (const auto &op : ops)
            for (const auto &m : op.modes)
                if (m.index == i)
                    label = m;
        modes.push_back(label);
        rows.push_back(static_cast<Eigen::Index>(2 * i));
        rows.push_back(static_cast<Eigen::Index>(2 * i + 1));
    }
    return make_op(s(rows, rows), d(rows), std::move(modes));
}

SymplecticOp compose(std::initializer_list<SymplecticOp> ops) {
    return compose(std::span<const SymplecticOp>(ops.begin(), ops.size()));
}

SymplecticOp inverse(const SymplecticOp &op) {
    // S^{-1} = -Omega S^T Omega for symplectic S.
    const Matrix omega = symplectic_form(op.num_modes());
    Matrix inv = -omega * op.matrix.transpose() * omega;
    Vector d = -inv * op.displacement;
    return make_op(std::move(inv), std::move(d), op.modes);
}

void to_json(nlohmann::json &j, const SymplecticOp &op) {
    std::vector<std::vector<double>> matrix;
    for (Eigen::Index r = 0; r < op.matrix.rows(); ++r) {
        std::vector<double> row;
        for (Eigen::Index c = 0; c < op.matrix.cols(); ++c)
            row.push_back(op.matrix(r, c));
        matrix.push_back(std::move(row));
    }
    std::vector<std::size_t> modes;
    for (const auto &m : op.modes)
        modes.push_back(m.index);
    j = nlohmann::json{{"matrix", matrix},
                       {"displacement", std::vector<double>(op.displacement.data(),
                                                            op.displacement.data() + op.displacement.size())},
                       {"modes", modes}};
}

} // namespace cvclone
