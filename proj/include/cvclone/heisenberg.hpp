#pragma once

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cvclone/phase_space.hpp"
#include "cvclone/symplectic.hpp"

namespace cvclone::heisenberg {

using Rational = boost::multiprecision::cpp_rational;

Rational rational(long long numerator, long long denominator = 1);

/// Exact number a + b*sqrt(2) with rational a, b. Closed under the four
/// field operations, which covers every gate parameter of the catalog
/// (balanced beam splitters, quarter-turn rotations, sqrt(2) squeezers).
class Surd {
  public:
    Surd() = default;
    Surd(Rational a, Rational b = 0) : a_(std::move(a)), b_(std::move(b)) {}
    Surd(long long value) : a_(value) {}

    static Surd sqrt2(Rational scale = 1) { return {0, std::move(scale)}; }

    const Rational &rational_part() const { return a_; }
    const Rational &sqrt2_part() const { return b_; }

    bool is_zero() const { return a_ == 0 && b_ == 0; }
    double to_double() const;
    std::string to_string() const;

    Surd operator-() const { return {-a_, -b_}; }
    friend Surd operator+(const Surd &x, const Surd &y) { return {x.a_ + y.a_, x.b_ + y.b_}; }
    friend Surd operator-(const Surd &x, const Surd &y) { return {x.a_ - y.a_, x.b_ - y.b_}; }
    friend Surd operator*(const Surd &x, const Surd &y) {
        return {x.a_ * y.a_ + 2 * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_};
    }
    friend Surd operator/(const Surd &x, const Surd &y);
    Surd &operator+=(const Surd &y) { return *this = *this + y; }
    friend bool operator==(const Surd &x, const Surd &y) { return x.a_ == y.a_ && x.b_ == y.b_; }

  private:
    Rational a_{0};
    Rational b_{0};
};

/// An input quadrature operator, e.g. x_L^in.
struct Symbol {
    std::size_t mode = 0;
    Axis axis = Axis::X;
    friend auto operator<=>(const Symbol &, const Symbol &) = default;
};

/// Linear combination of input quadrature operators plus a c-number offset.
struct LinearOperatorExpr {
    std::map<Symbol, Surd> coefficients;
    Surd constant;

    Surd coefficient(const Symbol &s) const;
    void add(const LinearOperatorExpr &other, const Surd &scale);
    void prune();
};

struct TableRow {
    std::size_t mode = 0;
    Axis axis = Axis::X;
    LinearOperatorExpr expr;
};

/// Output quadratures of a register expressed through its input quadratures.
struct OperatorTable {
    std::size_t num_input_modes = 0;
    std::vector<std::string> mode_names;
    std::vector<TableRow> rows;

    const TableRow &row(std::size_t mode, Axis axis) const;
    /// Surviving (unmeasured) modes in register order.
    std::vector<std::size_t> surviving_modes() const;
    /// Real coefficient matrix: one row per output quadrature, one column per
    /// input quadrature in interleaved order.
    Matrix coefficient_matrix() const;
    std::string to_string() const;
};

// Gate descriptors. Mode indices always refer to the input register; they do
// not shift when a mode is measured.
struct QndXp {
    Surd kappa;
    std::size_t control, target;
};
struct QndPp {
    Surd kappa;
    std::size_t control, target;
};
/// Rotation by eighth_turns * pi/4.
struct Rotation {
    int eighth_turns;
    std::size_t mode;
};
struct BeamSplitter {
    std::size_t mode1, mode2;
};
struct Squeeze {
    Surd factor;
    std::size_t mode;
};
struct Displace {
    Surd dx, dp;
    std::size_t mode;
};
struct FeedGain {
    std::size_t target;
    Axis axis;
    Surd gain;
};
/// Ideal quadrature measurement whose record is fed forward as displacements.
/// Represented by substituting the measured operator into the targets.
struct MeasureFeed {
    std::size_t mode;
    Axis axis;
    std::vector<FeedGain> gains;
};

using GateDescriptor = std::variant<QndXp, QndPp, Rotation, BeamSplitter, Squeeze, Displace, MeasureFeed>;

std::string describe(const GateDescriptor &gate);

OperatorTable identity_table(std::size_t num_modes, std::vector<std::string> mode_names = {});

/// Propagate the identity table through `circuit` in order.
OperatorTable propagate(std::size_t num_modes, std::span<const GateDescriptor> circuit,
                        std::vector<std::string> mode_names = {});

struct CommutatorViolation {
    std::size_t row_i, row_j;
    Surd expected;
    Surd actual;
    std::string description;
};

struct CommutatorReport {
    bool ok = true;
    std::vector<CommutatorViolation> violations;
};

/// Verify [out_i, out_j] = i Omega_ij for every pair of rows, exactly.
CommutatorReport check_commutators(const OperatorTable &table);

/// Var(out) = sum coeff^2 Var(in) for uncorrelated inputs. Keys of the result
/// are (mode, axis) of the output rows.
std::map<Symbol, double> added_noise_variances(const OperatorTable &table,
                                               const std::map<Symbol, double> &input_variances);

/// Numeric counterpart of a unitary gate descriptor (throws for MeasureFeed).
SymplecticOp numeric_op(const GateDescriptor &gate);

} // namespace cvclone::heisenberg
