#include "cvclone/heisenberg.hpp"

#include <cmath>
#include <sstream>

#include "cvclone/errors.hpp"

namespace cvclone::heisenberg {
namespace {

std::string rational_string(const Rational &r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

// cos and sin of k*pi/4.
std::pair<Surd, Surd> eighth_turn(int k) {
    const Surd h = Surd::sqrt2(rational(1, 2));
    const int m = ((k % 8) + 8) % 8;
    switch (m) {
    case 0:
        return {1, 0};
    case 1:
        return {h, h};
    case 2:
        return {0, 1};
    case 3:
        return {-h, h};
    case 4:
        return {-1, 0};
    case 5:
        return {-h, -h};
    case 6:
        return {0, -1};
    default:
        return {h, -h};
    }
}

std::string symbol_name(const OperatorTable &t, std::size_t mode, Axis axis, const char *suffix) {
    return to_string(axis) + "_" + t.mode_names.at(mode) + suffix;
}

class Propagator {
  public:
    Propagator(OperatorTable table) : t_(std::move(table)) {}

    LinearOperatorExpr &at(std::size_t mode, Axis axis) {
        for (auto &r : t_.rows)
            if (r.mode == mode && r.axis == axis)
                return r.expr;
        throw DomainError("gate addresses mode " + std::to_string(mode) + ", which is absent or already measured");
    }

    static LinearOperatorExpr combine(const LinearOperatorExpr &u, const Surd &cu, const LinearOperatorExpr &v,
                                      const Surd &cv) {
        LinearOperatorExpr out;
        out.add(u, cu);
        out.add(v, cv);
        return out;
    }

    void operator()(const QndXp &g) {
        distinct(g.control, g.target);
        const auto xc = at(g.control, Axis::X);
        const auto pt = at(g.target, Axis::P);
        at(g.target, Axis::X).add(xc, g.kappa);
        at(g.control, Axis::P).add(pt, -g.kappa);
    }

    void operator()(const QndPp &g) {
        distinct(g.control, g.target);
        const auto pc = at(g.control, Axis::P);
        const auto pt = at(g.target, Axis::P);
        at(g.control, Axis::X).add(pt, g.kappa);
        at(g.target, Axis::X).add(pc, g.kappa);
    }

    void operator()(const Rotation &g) {
        const auto [c, s] = eighth_turn(g.eighth_turns);
        const auto x = at(g.mode, Axis::X);
        const auto p = at(g.mode, Axis::P);
        at(g.mode, Axis::X) = combine(x, c, p, s);
        at(g.mode, Axis::P) = combine(x, -s, p, c);
    }

    void operator()(const BeamSplitter &g) {
        distinct(g.mode1, g.mode2);
        const Surd h = Surd::sqrt2(rational(1, 2));
        for (Axis axis : {Axis::X, Axis::P}) {
            const auto a = at(g.mode1, axis);
            const auto b = at(g.mode2, axis);
            at(g.mode1, axis) = combine(a, h, b, -h);
            at(g.mode2, axis) = combine(a, h, b, h);
        }
    }

    void operator()(const Squeeze &g) {
        if (g.factor.to_double() <= 0.0)
            throw DomainError("squeeze factor must be positive");
        auto &x = at(g.mode, Axis::X);
        auto &p = at(g.mode, Axis::P);
        LinearOperatorExpr nx, np;
        nx.add(x, g.factor);
        np.add(p, Surd(1) / g.factor);
        x = nx;
        p = np;
    }

    void operator()(const Displace &g) {
        at(g.mode, Axis::X).constant += g.dx;
        at(g.mode, Axis::P).constant += g.dp;
    }

    void operator()(const MeasureFeed &g) {
        const auto measured = at(g.mode, g.axis);
        for (const auto &fg : g.gains) {
            if (fg.target == g.mode)
                throw DomainError("feedback cannot target the measured mode");
            at(fg.target, fg.axis).add(measured, fg.gain);
        }
        std::erase_if(t_.rows, [&](const TableRow &r) { return r.mode == g.mode; });
    }

    OperatorTable take() {
        for (auto &r : t_.rows)
            r.expr.prune();
        return std::move(t_);
    }

  private:
    static void distinct(std::size_t a, std::size_t b) {
        if (a == b)
            throw DomainError("two-mode gate addresses the same mode twice");
    }

    OperatorTable t_;
};

// [u, v] / i for expressions over canonical inputs.
Surd commutator(const LinearOperatorExpr &u, const LinearOperatorExpr &v) {
    Surd total;
    for (const auto &[sym, cu] : u.coefficients) {
        if (sym.axis == Axis::X) {
            const auto cv = v.coefficient({sym.mode, Axis::P});
            total += cu * cv;
        } else {
            const auto cv = v.coefficient({sym.mode, Axis::X});
            total += -(cu * cv);
        }
    }
    return total;
}

} // namespace

Rational rational(long long numerator, long long denominator) {
    if (denominator == 0)
        throw DomainError("rational with zero denominator");
    return Rational(numerator) / Rational(denominator);
}

Surd operator/(const Surd &x, const Surd &y) {
    const Rational norm = y.a_ * y.a_ - 2 * y.b_ * y.b_;
    if (norm == 0)
        throw DomainError("division by zero surd");
    const Surd conj{y.a_, -y.b_};
    const Surd num = x * conj;
    return {num.a_ / norm, num.b_ / norm};
}

double Surd::to_double() const {
    return a_.convert_to<double>() + b_.convert_to<double>() * std::sqrt(2.0);
}

std::string Surd::to_string() const {
    if (b_ == 0)
        return rational_string(a_);
    std::string root;
    if (b_ == 1)
        root = "sqrt(2)";
    else if (b_ == -1)
        root = "-sqrt(2)";
    else if (boost::multiprecision::numerator(b_) == 1)
        root = "sqrt(2)/" + rational_string(Rational(boost::multiprecision::denominator(b_)));
    else if (boost::multiprecision::numerator(b_) == -1)
        root = "-sqrt(2)/" + rational_string(Rational(boost::multiprecision::denominator(b_)));
    else
        root = rational_string(b_) + "*sqrt(2)";
    if (a_ == 0)
        return root;
    if (root.front() == '-')
        return "(" + rational_string(a_) + " - " + root.substr(1) + ")";
    return "(" + rational_string(a_) + " + " + root + ")";
}

Surd LinearOperatorExpr::coefficient(const Symbol &s) const {
    auto it = coefficients.find(s);
    return it == coefficients.end() ? Surd{} : it->second;
}

void LinearOperatorExpr::add(const LinearOperatorExpr &other, const Surd &scale) {
    for (const auto &[sym, c] : other.coefficients)
        coefficients[sym] += c * scale;
    constant += other.constant * scale;
    prune();
}

void LinearOperatorExpr::prune() {
    std::erase_if(coefficients, [](const auto &kv) { return kv.second.is_zero(); });
}

const TableRow &OperatorTable::row(std::size_t mode, Axis axis) const {
    for (const auto &r : rows)
        if (r.mode == mode && r.axis == axis)
            return r;
    throw DomainError("no output row for mode " + std::to_string(mode));
}

std::vector<std::size_t> OperatorTable::surviving_modes() const {
    std::vector<std::size_t> modes;
    for (const auto &r : rows)
        if (modes.empty() || modes.back() != r.mode)
            modes.push_back(r.mode);
    return modes;
}

Matrix OperatorTable::coefficient_matrix() const {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(2 * num_input_modes));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto &[sym, c] : rows[i].expr.coefficients)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(quadrature_index(sym.mode, sym.axis))) =
                c.to_double();
    return m;
}

std::string OperatorTable::to_string() const {
    std::ostringstream os;
    for (const auto &r : rows) {
        os << symbol_name(*this, r.mode, r.axis, "_out") << " =";
        bool first = true;
        for (const auto &[sym, c] : r.expr.coefficients) {
            const auto name = symbol_name(*this, sym.mode, sym.axis, "_in");
            const bool negative = c.sqrt2_part() == 0 ? c.rational_part() < 0
                                                      : (c.rational_part() == 0 && c.sqrt2_part() < 0);
            const Surd magnitude = negative ? -c : c;
            os << (first ? (negative ? " -" : " ") : (negative ? " - " : " + "));
            if (!(magnitude == Surd(1)))
                os << magnitude.to_string() << "*";
            os << name;
            first = false;
        }
        if (!r.expr.constant.is_zero()) {
            os << (first ? " " : " + ") << r.expr.constant.to_string();
            first = false;
        }
        if (first)
            os << " 0";
        os << "\n";
    }
    return os.str();
}

std::string describe(const GateDescriptor &gate) {
    return std::visit(
        [](const auto &g) -> std::string {
            using G = std::decay_t<decltype(g)>;
            std::ostringstream os;
            if constexpr (std::is_same_v<G, QndXp>)
                os << "qnd_xp(" << g.kappa.to_string() << "; " << g.control << "->" << g.target << ")";
            else if constexpr (std::is_same_v<G, QndPp>)
                os << "qnd_pp(" << g.kappa.to_string() << "; " << g.control << "," << g.target << ")";
            else if constexpr (std::is_same_v<G, Rotation>)
                os << "rotation(" << g.eighth_turns << "*pi/4; " << g.mode << ")";
            else if constexpr (std::is_same_v<G, BeamSplitter>)
                os << "beam_splitter(" << g.mode1 << "," << g.mode2 << ")";
            else if constexpr (std::is_same_v<G, Squeeze>)
                os << "squeezer(" << g.factor.to_string() << "; " << g.mode << ")";
            else if constexpr (std::is_same_v<G, Displace>)
                os << "displace(" << g.dx.to_string() << "," << g.dp.to_string() << "; " << g.mode << ")";
            else
                os << "measure_feed(" << to_string(g.axis) << "_" << g.mode << ", " << g.gains.size() << " targets)";
            return os.str();
        },
        gate);
}

OperatorTable identity_table(std::size_t num_modes, std::vector<std::string> mode_names) {
    if (num_modes == 0)
        throw DomainError("operator table needs at least one mode");
    if (mode_names.empty())
        for (std::size_t m = 0; m < num_modes; ++m)
            mode_names.push_back(std::to_string(m));
    if (mode_names.size() != num_modes)
        throw DomainError("mode_names size does not match num_modes");

    OperatorTable t{num_modes, std::move(mode_names), {}};
    for (std::size_t m = 0; m < num_modes; ++m)
        for (Axis axis : {Axis::X, Axis::P}) {
            TableRow r{m, axis, {}};
            r.expr.coefficients[{m, axis}] = Surd(1);
            t.rows.push_back(std::move(r));
        }
    return t;
}

OperatorTable propagate(std::size_t num_modes, std::span<const GateDescriptor> circuit,
                        std::vector<std::string> mode_names) {
    Propagator p(identity_table(num_modes, std::move(mode_names)));
    for (const auto &gate : circuit)
        std::visit(p, gate);
    return p.take();
}

CommutatorReport check_commutators(const OperatorTable &table) {
    CommutatorReport report;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (std::size_t j = i + 1; j < table.rows.size(); ++j) {
            const auto &ri = table.rows[i];
            const auto &rj = table.rows[j];
            Surd expected;
            if (ri.mode == rj.mode && ri.axis != rj.axis)
                expected = ri.axis == Axis::X ? Surd(1) : Surd(-1);
            const Surd actual = commutator(ri.expr, rj.expr);
            if (!(actual == expected)) {
                report.ok = false;
                report.violations.push_back(
                    {i, j, expected, actual,
                     "[" + symbol_name(table, ri.mode, ri.axis, "_out") + ", " +
                         symbol_name(table, rj.mode, rj.axis, "_out") + "] = i*" + actual.to_string() +
                         ", expected i*" + expected.to_string()});
            }
        }
    return report;
}

std::map<Symbol, double> added_noise_variances(const OperatorTable &table,
                                               const std::map<Symbol, double> &input_variances) {
    std::map<Symbol, double> out;
    for (const auto &r : table.rows) {
        double var = 0.0;
        for (const auto &[sym, c] : r.expr.coefficients) {
            auto it = input_variances.find(sym);
            if (it == input_variances.end())
                throw DomainError("missing input variance for " + to_string(sym.axis) + "_" +
                                  table.mode_names.at(sym.mode));
            if (!(it->second > 0.0))
                throw DomainError("input variances must be positive");
            const double cd = c.to_double();
            var += cd * cd * it->second;
        }
        out[{r.mode, r.axis}] = var;
    }
    return out;
}

SymplecticOp numeric_op(const GateDescriptor &gate) {
    return std::visit(
        [](const auto &g) -> SymplecticOp {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, QndXp>)
                return qnd_xp(g.kappa.to_double(), g.control, g.target);
            else if constexpr (std::is_same_v<G, QndPp>)
                return qnd_pp(g.kappa.to_double(), g.control, g.target);
            else if constexpr (std::is_same_v<G, Rotation>)
                return phase_rotation(g.eighth_turns * std::atan(1.0), g.mode);
            else if constexpr (std::is_same_v<G, BeamSplitter>)
                return beam_splitter_balanced(g.mode1, g.mode2);
            else if constexpr (std::is_same_v<G, Squeeze>)
                return squeezer(g.factor.to_double(), g.mode);
            else if constexpr (std::is_same_v<G, Displace>) {
                Vector d(2);
                d << g.dx.to_double(), g.dp.to_double();
                return displace(d, {g.mode});
            } else
                throw DomainError("measure_feed has no unitary symplectic counterpart");
        },
        gate);
}

} // namespace cvclone::heisenberg
