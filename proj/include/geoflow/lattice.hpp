#pragma once

// Fundamental domains, reduction and the Haar reference measure for
// Gamma = PSL(2,Z) acting on H^2 (modular surface) and
// Gamma = PSL(2,Z[i]) acting on H^3 (Picard manifold).
//
// Modular domain:  Re z in [-1/2, 1/2), |z| >= 1, and Re z <= 0 on |z| = 1.
// Picard domain:   Re z in [-1/2, 1/2), Im z in [0, 1/2], |z|^2 + h^2 >= 1,
//                  with Re z <= 0 on the sphere and on the faces Im z = 0, 1/2.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "geoflow/errors.hpp"
#include "geoflow/group.hpp"
#include "geoflow/parallel.hpp"

namespace geoflow {

enum class LatticeTag { Modular, Picard };

inline const char* to_string(LatticeTag l) { return l == LatticeTag::Modular ? "modular" : "picard"; }

inline LatticeTag parse_lattice(const std::string& s) {
    if (s == "modular") return LatticeTag::Modular;
    if (s == "picard") return LatticeTag::Picard;
    throw InvalidInput("unknown lattice '" + s + "' (expected modular or picard)");
}

/// Dimension n of the hyperbolic space covering the quotient.
inline int space_dimension(LatticeTag l) { return l == LatticeTag::Modular ? 2 : 3; }

/// One generator of a reducing word.
struct WordStep {
    enum class Kind : std::uint8_t { Translate, Invert, Fold };
    Kind kind = Kind::Translate;
    int re = 0; ///< translation by re + i*im
    int im = 0;

    static WordStep translate(int re, int im = 0) { return {Kind::Translate, re, im}; }
    static WordStep invert() { return {Kind::Invert, 0, 0}; }
    static WordStep fold() { return {Kind::Fold, 0, 0}; }

    friend bool operator==(const WordStep&, const WordStep&) = default;
};

/// Steps in order of application: the reducing element is s_k ... s_1.
using Word = std::vector<WordStep>;

/// Matrix of a step: T_w = [[1,w],[0,1]], S = [[0,-1],[1,0]], U = diag(i,-i).
inline ComplexElement step_matrix(const WordStep& s) {
    switch (s.kind) {
    case WordStep::Kind::Translate: return make_unipotent(cplx(s.re, s.im));
    case WordStep::Kind::Invert: return ComplexElement(0.0, -1.0, 1.0, 0.0);
    case WordStep::Kind::Fold: return ComplexElement(cplx(0, 1), 0.0, 0.0, cplx(0, -1));
    }
    return ComplexElement();
}

inline ComplexElement word_matrix(const Word& w) {
    ComplexElement g;
    for (const auto& s : w) g = step_matrix(s) * g;
    return g;
}

/// Human-readable word, e.g. "T^-2 S T".
inline std::string to_string(const Word& w) {
    std::ostringstream os;
    bool first = true;
    for (const auto& s : w) {
        if (!first) os << ' ';
        first = false;
        switch (s.kind) {
        case WordStep::Kind::Invert: os << 'S'; break;
        case WordStep::Kind::Fold: os << 'U'; break;
        case WordStep::Kind::Translate:
            if (s.im == 0) {
                os << 'T';
                if (s.re != 1) os << '^' << s.re;
            } else {
                os << "T[" << s.re << (s.im < 0 ? "" : "+") << s.im << "i]";
            }
        }
    }
    return os.str();
}

inline UpperSpacePoint apply_step(const WordStep& s, const UpperSpacePoint& p) {
    switch (s.kind) {
    case WordStep::Kind::Translate: return {p.horizontal + cplx(s.re, s.im), p.height};
    case WordStep::Kind::Invert: {
        const double r2 = std::norm(p.horizontal) + p.height * p.height;
        return {-std::conj(p.horizontal) / r2, p.height / r2};
    }
    case WordStep::Kind::Fold: return {-p.horizontal, p.height};
    }
    return p;
}

inline BoundaryPoint apply_step(const WordStep& s, const BoundaryPoint& p) {
    switch (s.kind) {
    case WordStep::Kind::Translate:
        return p.is_infinite() ? p : BoundaryPoint(p.value() + cplx(s.re, s.im));
    case WordStep::Kind::Invert:
        if (p.is_infinite()) return BoundaryPoint(0.0);
        if (p.value() == cplx(0.0)) return BoundaryPoint::infinity();
        return BoundaryPoint(-1.0 / p.value());
    case WordStep::Kind::Fold: return p.is_infinite() ? p : BoundaryPoint(-p.value());
    }
    return p;
}

/// Replays a word on a frame.
inline FrameCoordinate apply_word(const Word& w, const FrameCoordinate& f) {
    UpperSpacePoint base = f.base;
    BoundaryPoint end = endpoint_of(f.base, f.direction);
    for (const auto& s : w) {
        base = apply_step(s, base);
        end = apply_step(s, end);
    }
    return {base, direction_toward(base, end)};
}

/// A point of Gamma\T^1(H^n): reduced frame and the word that reduced it.
struct QuotientPoint {
    LatticeTag lattice = LatticeTag::Modular;
    FrameCoordinate frame;
    Word word;

    double height() const { return frame.base.height; }
};

inline constexpr int kMaxReductionSteps = 10000;
inline constexpr double kSphereTolerance = 1e-12;
inline constexpr double kFaceTolerance = 1e-14;

namespace detail {

/// Shift so that x - n lies in [-1/2, 1/2).
inline int centering_shift(double x) {
    double n = std::floor(x + 0.5);
    const double r = x - n;
    if (r < -0.5) n -= 1;
    else if (r >= 0.5) n += 1;
    return static_cast<int>(n);
}

/// Shift so that y - n lies in (-1/2, 1/2].
inline int centering_shift_upper(double y) {
    double n = std::ceil(y - 0.5);
    const double r = y - n;
    if (r <= -0.5) n -= 1;
    else if (r > 0.5) n += 1;
    return static_cast<int>(n);
}

class WordBuilder {
public:
    explicit WordBuilder(UpperSpacePoint p) : point_(p) {}

    void push(const WordStep& s) {
        point_ = apply_step(s, point_);
        if (s.kind == WordStep::Kind::Translate && !word_.empty() &&
            word_.back().kind == WordStep::Kind::Translate) {
            word_.back().re += s.re;
            word_.back().im += s.im;
            if (word_.back().re == 0 && word_.back().im == 0) word_.pop_back();
        } else {
            word_.push_back(s);
        }
        if (++steps_ > kMaxReductionSteps)
            throw ReductionDiverged("no fundamental-domain representative after " +
                                    std::to_string(kMaxReductionSteps) + " generator steps");
    }

    const UpperSpacePoint& point() const { return point_; }
    Word take() { return std::move(word_); }

private:
    UpperSpacePoint point_;
    Word word_;
    int steps_ = 0;
};

inline void reduce_modular(WordBuilder& wb) {
    for (;;) {
        const int n = centering_shift(wb.point().horizontal.real());
        if (n != 0) wb.push(WordStep::translate(-n));
        const double r2 = std::norm(wb.point().horizontal) + wb.point().height * wb.point().height;
        if (r2 < 1.0 - kSphereTolerance) {
            wb.push(WordStep::invert());
            continue;
        }
        if (r2 <= 1.0 + kSphereTolerance && wb.point().horizontal.real() > 0.0) wb.push(WordStep::invert());
        return;
    }
}

inline void center_gaussian(WordBuilder& wb) {
    const cplx z = wb.point().horizontal;
    const int nx = centering_shift(z.real());
    const int ny = centering_shift_upper(z.imag());
    if (nx != 0 || ny != 0) wb.push(WordStep::translate(-nx, -ny));
    if (wb.point().horizontal.imag() < 0.0) {
        wb.push(WordStep::fold());
        if (wb.point().horizontal.real() >= 0.5) wb.push(WordStep::translate(-1));
    }
}

inline void reduce_picard(WordBuilder& wb) {
    for (;;) {
        center_gaussian(wb);
        const double r2 = std::norm(wb.point().horizontal) + wb.point().height * wb.point().height;
        if (r2 < 1.0 - kSphereTolerance) {
            wb.push(WordStep::invert());
            continue;
        }
        // Boundary identifications; each maps Re z > 0 to Re z < 0.
        const cplx z = wb.point().horizontal;
        if (z.real() > 0.0) {
            if (r2 <= 1.0 + kSphereTolerance) {
                wb.push(WordStep::invert());
                continue;
            }
            if (std::abs(z.imag()) <= kFaceTolerance) {
                wb.push(WordStep::fold());
                continue;
            }
            if (std::abs(z.imag() - 0.5) <= kFaceTolerance) {
                wb.push(WordStep::fold());
                wb.push(WordStep::translate(0, 1));
                continue;
            }
        }
        return;
    }
}

} // namespace detail

/// Reduces the base point into the closed fundamental domain and carries the
/// direction along with the same group element.
inline QuotientPoint reduce(LatticeTag lattice, const FrameCoordinate& frame) {
    if (lattice == LatticeTag::Modular && frame.base.horizontal.imag() != 0.0)
        throw InvalidInput("modular reduction needs a point of H^2 (Im z = 0)");
    detail::WordBuilder wb(frame.base);
    if (lattice == LatticeTag::Modular) detail::reduce_modular(wb);
    else detail::reduce_picard(wb);
    QuotientPoint q;
    q.lattice = lattice;
    q.frame.base = wb.point();
    q.word = wb.take();
    BoundaryPoint end = endpoint_of(frame.base, frame.direction);
    for (const auto& s : q.word) end = apply_step(s, end);
    q.frame.direction = direction_toward(q.frame.base, end);
    return q;
}

/// Height of the base point of the reduced representative.
inline double height(const QuotientPoint& q) { return q.height(); }

/// True when the base point satisfies the domain inequalities (with slack tol).
inline bool in_fundamental_domain(LatticeTag lattice, const UpperSpacePoint& p, double tol = 1e-9) {
    const cplx z = p.horizontal;
    const double r2 = std::norm(z) + p.height * p.height;
    if (z.real() < -0.5 - tol || z.real() >= 0.5 + tol || r2 < 1.0 - tol) return false;
    if (lattice == LatticeTag::Modular) return z.imag() == 0.0;
    return z.imag() >= -tol && z.imag() <= 0.5 + tol;
}

// ---------------------------------------------------------------------------
// Volume and Haar measure

/// Hyperbolic volume of the fundamental domain.
inline double covolume(LatticeTag lattice) {
    using boost::math::quadrature::gauss_kronrod;
    if (lattice == LatticeTag::Modular) {
        // int dx int_{sqrt(1-x^2)}^inf dy / y^2
        auto inner = [](double x) { return 1.0 / std::sqrt(1.0 - x * x); };
        return gauss_kronrod<double, 61>::integrate(inner, -0.5, 0.5, 15, 1e-14);
    }
    // int dx dy int_{sqrt(1-|z|^2)}^inf dh / h^3 = int dx dy / (2 (1 - |z|^2))
    auto row = [](double y) {
        auto inner = [y](double x) { return 0.5 / (1.0 - x * x - y * y); };
        return gauss_kronrod<double, 61>::integrate(inner, -0.5, 0.5, 15, 1e-14);
    };
    return gauss_kronrod<double, 61>::integrate(row, 0.0, 0.5, 15, 1e-14);
}

/// Haar measure of the cusp region above height `cap`, as a probability.
inline double cusp_tail_mass(LatticeTag lattice, double cap) {
    if (lattice == LatticeTag::Modular) return (1.0 / cap) / covolume(lattice);
    // cross-section area 1/2 times int_cap^inf dh / h^3
    return 0.5 * (0.5 / (cap * cap)) / covolume(lattice);
}

struct HaarSampleSet {
    LatticeTag lattice = LatticeTag::Modular;
    std::vector<QuotientPoint> points;
    std::uint64_t seed = 0;
    double height_cap = 0;
    double tail_mass = 0; ///< measure above height_cap, not represented by points

    /// Every point carries (1 - tail_mass) / size.
    double weight() const { return points.empty() ? 0.0 : (1.0 - tail_mass) / static_cast<double>(points.size()); }
};

inline Direction uniform_direction(LatticeTag lattice, std::mt19937_64& rng) {
    if (lattice == LatticeTag::Modular) {
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        return Direction::from_angle(angle(rng));
    }
    std::normal_distribution<double> gauss;
    for (;;) {
        const double x = gauss(rng), y = gauss(rng), z = gauss(rng);
        const double n = std::sqrt(x * x + y * y + z * z);
        if (n > 1e-12) return Direction{{x / n, y / n, z / n}};
    }
}

/// Rejection sampler for the normalized Haar measure restricted below
/// `height_cap`. Density dx dy / y^2 (modular) or dx dy dh / h^3 (Picard),
/// independent uniform direction.
inline HaarSampleSet haar_sample(LatticeTag lattice, std::int64_t count, std::uint64_t seed, double height_cap,
                                 Parallelism par = {}) {
    if (count < 0) throw InvalidInput("haar_sample count must be nonnegative");
    if (!(height_cap >= 2.0)) throw InvalidInput("haar_sample height_cap must be at least 2");
    HaarSampleSet out;
    out.lattice = lattice;
    out.seed = seed;
    out.height_cap = height_cap;
    out.tail_mass = cusp_tail_mass(lattice, height_cap);
    out.points.resize(static_cast<std::size_t>(count));

    const bool modular = lattice == LatticeTag::Modular;
    // Lowest height reached by the domain and the inverse-CDF constants for
    // h^-2 (modular) or h^-3 (Picard) on [low, cap].
    const double low = modular ? std::sqrt(3.0) / 2.0 : std::sqrt(0.5);
    const double p = modular ? 1.0 : 2.0;
    const double lo_pow = std::pow(low, -p), hi_pow = std::pow(height_cap, -p);

    for_each_block(out.points.size(), par, [&](std::size_t block, std::size_t begin, std::size_t end) {
        auto rng = block_engine(seed, 0x4a61, block);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t i = begin; i < end; ++i) {
            for (;;) {
                const double h = std::pow(lo_pow - unit(rng) * (lo_pow - hi_pow), -1.0 / p);
                const double x = unit(rng) - 0.5;
                const double y = modular ? 0.0 : 0.5 * unit(rng);
                if (x * x + y * y + h * h < 1.0) continue;
                QuotientPoint& q = out.points[i];
                q.lattice = lattice;
                q.frame.base = UpperSpacePoint(cplx(x, y), h);
                q.frame.direction = uniform_direction(lattice, rng);
                break;
            }
        }
    });
    return out;
}

} // namespace geoflow
