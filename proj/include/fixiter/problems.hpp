#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fixiter/analysis.hpp"
#include "fixiter/config.hpp"
#include "fixiter/linalg.hpp"
#include "fixiter/mapping.hpp"
#include "fixiter/point.hpp"

namespace fixiter {

/// A mapping plus everything needed to run and judge an experiment on it.
/// The domain C is implicitly the whole ambient space (closed, convex, and
/// every built-in T is a self-map of it).
struct ProblemSpec {
    std::string name;
    MappingSpec mapping;
    std::string domain_note;
    Point default_start;
    NormKind recommended_norm = NormKind::euclidean();
    std::optional<ConditionAFunction> condition_A_f;
};

namespace detail {

inline constexpr std::uint64_t kProblemValidationSeed = 0x5eedf17e;
inline constexpr int kProblemValidationSamples = 200;

/// Names that are safe inside artifact filenames.
inline bool is_slug(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

/// Residual check for a declared fixed-point set: finite sets point by
/// point, affine subspaces at the origin and one step along each direction.
inline double worst_declared_fixed_residual(const MappingSpec& t) {
    if (!t.fixed_points) return 0.0;
    double worst = 0.0;
    if (const auto* fin = std::get_if<FinitePointSet>(&*t.fixed_points)) {
        for (const Point& p : fin->points)
            worst = std::max(worst, fixed_point_residual(t, p));
    } else {
        const auto& sub = std::get<AffineSubspace>(*t.fixed_points);
        worst = fixed_point_residual(t, sub.origin);
        for (const Point& d : sub.directions) {
            Point q = combine(1.0, sub.origin, 1.0, d);
            worst = std::max(worst, fixed_point_residual(t, q));
        }
    }
    return worst;
}

inline void check_problem(const ProblemSpec& p, int anchor_line) {
    auto fail = [&](const std::string& msg) {
        if (anchor_line > 0) throw config::ConfigError(anchor_line, "problem '" + p.name + "': " + msg);
        throw std::logic_error("problem '" + p.name + "': " + msg);
    };
    if (!is_slug(p.name)) fail("name: must use only [A-Za-z0-9_-]");
    if (p.default_start.dim() != p.mapping.dim()) fail("start: dimension mismatch with mapping");
    if (p.mapping.fixed_points && fixed_set_dim(*p.mapping.fixed_points) != p.mapping.dim())
        fail("fixed_points: dimension mismatch with mapping");
    double fr = worst_declared_fixed_residual(p.mapping);
    if (!(fr <= 1e-12)) {
        std::ostringstream os;
        os << "declared fixed points are not fixed (worst residual " << fr << ")";
        fail(os.str());
    }
    ClassValidation v = validate_mapping_class(p.mapping, kProblemValidationSamples,
                                               kProblemValidationSeed, p.recommended_norm);
    if (!v.passed) fail("class validation failed: " + v.summary());
}

}  // namespace detail

/// Construct and validate a problem; throws std::logic_error on a bad spec.
inline ProblemSpec make_problem(ProblemSpec p) {
    detail::check_problem(p, 0);
    return p;
}

/// Norm from a config value: euclidean | max | a number p >= 1.
inline NormKind parse_norm(const config::Node& node) {
    if (node.type == config::NodeType::number) {
        double pv = node.number;
        if (!(pv >= 1.0)) throw config::ConfigError(node.line, "norm: p must be >= 1");
        return NormKind::p_norm(pv);
    }
    const std::string& s = node.as_text();
    if (s == "euclidean") return NormKind::euclidean();
    if (s == "max") return NormKind::max();
    throw config::ConfigError(node.line, "norm: unknown '" + s + "' (expected euclidean, max, or a number p)");
}

/// The shipped suite. Covers: 1-d and n-d contractions (with the n-d one
/// near the nonexpansive edge), a nonexpansive isometry with a unique fixed
/// point, a nonexpansive map with a non-singleton fixed-point set, and a
/// rotation on which unaveraged iteration provably cannot converge.
inline const std::vector<ProblemSpec>& builtin_suite() {
    static const std::vector<ProblemSpec> suite = [] {
        std::vector<ProblemSpec> out;

        // (a) x -> x/2. Contraction, L = 1/2, F = {0}. Exactly
        // representable arithmetic: traces on it are bit-reproducible.
        out.push_back(make_problem(ProblemSpec{
            "halving",
            contraction(AffineMap{Matrix::from_rows({{0.5}}), {0.0}}, 0.5,
                        FixedPointSet(FinitePointSet{{Point{0.0}}})),
            "C = R (whole line)",
            Point{1.0},
            NormKind::euclidean(),
            ConditionAFunction::linear(0.5),
        }));

        // (b) x -> (x+4)/3. Contraction, L = 1/3, F = {2}.
        out.push_back(make_problem(ProblemSpec{
            "shifted_thirds",
            contraction(AffineMap{Matrix::from_rows({{1.0 / 3.0}}), {4.0 / 3.0}}, 1.0 / 3.0,
                        FixedPointSet(FinitePointSet{{Point{2.0}}})),
            "C = R (whole line)",
            Point{5.0},
            NormKind::euclidean(),
            ConditionAFunction::linear(2.0 / 3.0),
        }));

        // (c) 3-d affine: 0.9 * blockdiag(R(0.7), 1) x + c. The matrix is
        // normal with ||A|| = 0.9 exactly, so the contraction sits near the
        // nonexpansive edge; sigma_min(I - A) = 0.1 gives the gauge slope.
        {
            double th = 0.7, s = 0.9;
            Matrix A = Matrix::from_rows({{s * std::cos(th), -s * std::sin(th), 0.0},
                                          {s * std::sin(th), s * std::cos(th), 0.0},
                                          {0.0, 0.0, s}});
            std::vector<double> c = {0.5, -0.3, 0.25};
            Matrix ImA = Matrix::identity(3);
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) ImA(i, j) -= A(i, j);
            Point p(solve(ImA, c));  // unique fixed point of x -> Ax + c
            out.push_back(make_problem(ProblemSpec{
                "spiral3d",
                contraction(AffineMap{A, c}, 0.9, FixedPointSet(FinitePointSet{{p}})),
                "C = R^3 (whole space)",
                Point{2.0, -1.0, 1.5},
                NormKind::euclidean(),
                ConditionAFunction::linear(0.1),
            }));
        }

        // (d) rotation by 1 radian. Nonexpansive isometry, F = {0};
        // ||x - Tx|| = 2 sin(1/2) ||x|| holds with equality everywhere.
        out.push_back(make_problem(ProblemSpec{
            "rotation_unit",
            nonexpansive(Rotation2D{1.0}, FixedPointSet(FinitePointSet{{Point{0.0, 0.0}}})),
            "C = R^2 (whole plane)",
            Point{1.0, 0.5},
            NormKind::euclidean(),
            ConditionAFunction::linear(2.0 * std::sin(0.5)),
        }));

        // (e) coordinate swap (x,y) -> (y,x). Nonexpansive; F is the whole
        // diagonal, the non-singleton case. ||x - Tx|| = 2 d(x, F) exactly.
        out.push_back(make_problem(ProblemSpec{
            "swap",
            nonexpansive(CoordinateSwap{},
                         FixedPointSet(AffineSubspace{Point{0.0, 0.0}, {Point{1.0, 1.0}}})),
            "C = R^2 (whole plane); F(T) = the diagonal y = x",
            Point{1.5, -0.5},
            NormKind::euclidean(),
            ConditionAFunction::linear(2.0),
        }));

        // (f) rotation by pi/2. Picard orbits are 4-cycles, so unaveraged
        // iteration cannot converge: the suite's negative control.
        out.push_back(make_problem(ProblemSpec{
            "rotation_quarter",
            nonexpansive(Rotation2D{std::asin(1.0)},  // pi/2
                         FixedPointSet(FinitePointSet{{Point{0.0, 0.0}}})),
            "C = R^2 (whole plane)",
            Point{1.0, 0.0},
            NormKind::euclidean(),
            ConditionAFunction::linear(2.0 * std::sin(std::asin(1.0) / 2.0)),
        }));

        return out;
    }();
    return suite;
}

inline const ProblemSpec* find_builtin(const std::string& name) {
    for (const ProblemSpec& p : builtin_suite())
        if (p.name == name) return &p;
    return nullptr;
}

namespace detail {

inline FixedPointSet parse_fixed_points(const config::Node& node, std::size_t dim) {
    // Either a list of points: [[p...], ...], or a block:
    //   fixed_line { origin = [..] directions = [[..], ...] }
    if (node.type == config::NodeType::list) {
        FinitePointSet fin;
        for (const auto& row : node.as_list()) {
            Point p(row.as_vector());
            if (p.dim() != dim)
                throw config::ConfigError(row.line, "fixed point: dimension mismatch with mapping");
            fin.points.push_back(std::move(p));
        }
        if (fin.points.empty()) throw config::ConfigError(node.line, "fixed_points: empty");
        return fin;
    }
    const auto& blk = node.as_block();
    AffineSubspace sub{Point(config::require(blk, "origin", node.line).as_vector()), {}};
    for (const auto& d : config::require(blk, "directions", node.line).as_list())
        sub.directions.push_back(Point(d.as_vector()));
    if (sub.directions.empty()) throw config::ConfigError(node.line, "directions: empty");
    if (fixed_set_dim(FixedPointSet(sub)) != dim ||
        sub.directions.front().dim() != dim)
        throw config::ConfigError(node.line, "fixed subspace: dimension mismatch with mapping");
    for (const Point& d : sub.directions)
        if (d.dim() != dim) throw config::ConfigError(node.line, "fixed subspace: ragged directions");
    return sub;
}

}  // namespace detail

/// Build a problem from a `problem { ... }` config block. Keys:
///   name, kind (affine | rotation | swap), class (contraction | nonexpansive),
///   A / c (affine), theta (rotation), L (contractions), start,
///   fixed_points or fixed_line { origin, directions }, condition_a_slope, note.
/// Fails with a line-anchored error on malformed shapes or when class
/// validation finds a ratio above the declared limit.
inline ProblemSpec load_problem(const config::Node& node) {
    const auto& blk = node.as_block();
    ProblemSpec p;
    p.name = config::require(blk, "name", node.line).as_text();

    const std::string& kind = config::require(blk, "kind", node.line).as_text();
    MappingKind mk;
    if (kind == "affine") {
        const config::Node& a_node = config::require(blk, "A", node.line);
        Matrix A = [&] {
            try {
                return Matrix::from_rows(a_node.as_matrix());
            } catch (const std::invalid_argument& e) {
                throw config::ConfigError(a_node.line, std::string("A: ") + e.what());
            }
        }();
        if (A.rows != A.cols)
            throw config::ConfigError(a_node.line, "A: must be square for a self-map");
        const config::Node& c_node = config::require(blk, "c", node.line);
        std::vector<double> c = c_node.as_vector();
        if (c.size() != A.rows)
            throw config::ConfigError(c_node.line, "c: length must match the rows of A");
        mk = AffineMap{std::move(A), std::move(c)};
    } else if (kind == "rotation") {
        mk = Rotation2D{config::require(blk, "theta", node.line).as_number()};
    } else if (kind == "swap") {
        mk = CoordinateSwap{};
    } else {
        throw config::ConfigError(node.line, "kind: unknown '" + kind + "' (expected affine, rotation, or swap)");
    }

    const std::string& cls = config::require(blk, "class", node.line).as_text();
    std::optional<FixedPointSet> fixed;
    MappingSpec tmp{mk, MappingClass::nonexpansive, 1.0, std::nullopt};
    std::size_t dim = tmp.dim();
    if (const config::Node* fp = config::find(blk, "fixed_points"))
        fixed = detail::parse_fixed_points(*fp, dim);
    else if (const config::Node* fl = config::find(blk, "fixed_line"))
        fixed = detail::parse_fixed_points(*fl, dim);

    if (cls == "contraction") {
        const config::Node& l_node = config::require(blk, "L", node.line);
        double L = l_node.as_number();
        if (!(L > 0.0 && L < 1.0)) throw config::ConfigError(l_node.line, "L: must lie in (0,1)");
        p.mapping = contraction(std::move(mk), L, std::move(fixed));
    } else if (cls == "nonexpansive") {
        p.mapping = nonexpansive(std::move(mk), std::move(fixed));
    } else {
        throw config::ConfigError(node.line, "class: unknown '" + cls + "' (expected contraction or nonexpansive)");
    }

    // An identity map fixes everything; record that so downstream checks
    // have a distance target and rate comparisons know to skip it.
    if (p.mapping.degenerate_identity() && !p.mapping.fixed_points) {
        AffineSubspace all{Point(std::vector<double>(dim, 0.0)), {}};
        for (std::size_t i = 0; i < dim; ++i) {
            std::vector<double> e(dim, 0.0);
            e[i] = 1.0;
            all.directions.push_back(Point(std::move(e)));
        }
        p.mapping.fixed_points = FixedPointSet(std::move(all));
    }

    if (const config::Node* st = config::find(blk, "start")) {
        p.default_start = Point(st->as_vector());
        if (p.default_start.dim() != dim)
            throw config::ConfigError(st->line, "start: dimension mismatch with mapping");
    } else {
        p.default_start = Point(std::vector<double>(dim, 1.0));
    }
    if (const config::Node* slope = config::find(blk, "condition_a_slope")) {
        double v = slope->as_number();
        if (!(v > 0.0)) throw config::ConfigError(slope->line, "condition_a_slope: must be positive");
        p.condition_A_f = ConditionAFunction::linear(v);
    }
    if (const config::Node* note = config::find(blk, "note")) p.domain_note = note->as_text();
    if (const config::Node* nrm = config::find(blk, "norm")) p.recommended_norm = parse_norm(*nrm);

    detail::check_problem(p, node.line);
    return p;
}

}  // namespace fixiter
