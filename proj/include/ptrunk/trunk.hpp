#pragma once

/**
 * @file trunk.hpp
 * @brief Trunk construction: thickness-weighted tree of solution generators,
 *        vertex classification, model-stalk certification, the rule-based
 *        generator for certified subtrees, and isomorphism signatures.
 */

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptrunk/polynomial.hpp"

namespace ptrunk {

inline constexpr std::size_t kNoVertex = std::numeric_limits<std::size_t>::max();

enum class VertexStatus { Interior, DeadEnd, HenselRoot, StalkEntry };

constexpr std::string_view to_string(VertexStatus s) {
    switch (s) {
        case VertexStatus::Interior: return "interior";
        case VertexStatus::DeadEnd: return "dead_end";
        case VertexStatus::HenselRoot: return "hensel_root";
        case VertexStatus::StalkEntry: return "stalk_entry";
    }
    return "unknown";
}

/// Recognition record for u0 x^u U(x) + p^alpha v0 y^v V(y) with U = 1 + O(p^m x), V = 1 + O(p^m y).
struct StalkCertificate {
    unsigned u = 0;
    unsigned v = 0;
    std::uint64_t alpha = 0;
    Integer u0;
    Integer v0;
    unsigned m = 0;
    bool swapped = false;  // true when the u-side is the second variable
    std::size_t entry = kNoVertex;

    friend bool operator==(const StalkCertificate&, const StalkCertificate&) = default;
};

struct TrunkVertex {
    std::size_t index = 0;
    std::size_t parent = kNoVertex;
    std::uint64_t height = 0;
    Point residue;
    std::uint64_t thickness = 0;
    std::uint64_t treetop = 0;
    Polynomial attached;
    VertexStatus status = VertexStatus::Interior;
    bool expanded = false;
    bool symbolic = false;         // subtree is represented by a closed form
    bool stalk_candidate = false;  // model pattern matched mod p only
    std::vector<std::size_t> children;
    std::optional<StalkCertificate> certificate;
    std::vector<Point> pending_roots;  // roots of `attached` mod p, consumed on expansion

    bool is_root() const noexcept { return parent == kNoVertex; }
};

struct BuildOptions {
    bool prune_hensel = true;
    bool certify_stalks = false;
    std::uint64_t vertex_budget = 1'000'000;
    std::uint64_t root_budget = 1'000'000;
    std::optional<std::uint64_t> phi_bound;  // expand only vertices with treetop < bound
    std::optional<Point> skip_root_digit;    // omit this child of the root
};

class Trunk {
public:
    Trunk(Prime p, std::size_t n) : p_(std::move(p)), n_(n) {}

    const Prime& p() const noexcept { return p_; }
    std::size_t nvars() const noexcept { return n_; }
    std::uint64_t root_content = 0;
    std::uint64_t max_height = 0;
    bool truncated = false;
    std::vector<TrunkVertex> vertices;

    const TrunkVertex& root() const { return vertices.at(0); }
    const TrunkVertex& operator[](std::size_t i) const { return vertices.at(i); }
    std::size_t size() const noexcept { return vertices.size(); }

    /// True for a vertex whose children are still unknown.
    static bool is_frontier(const TrunkVertex& v) {
        return !v.expanded && !v.symbolic && v.status != VertexStatus::DeadEnd;
    }

    /// Counts N_e are determined for every e up to this value: min treetop over frontier vertices.
    Valuation resolved_level() const {
        Valuation best = Valuation::infinite();
        for (const auto& v : vertices) {
            if (is_frontier(v)) best = min(best, Valuation(v.treetop));
        }
        return best;
    }

    struct Stats {
        std::size_t interior = 0, dead_end = 0, hensel_root = 0, stalk_entry = 0;
    };
    Stats stats() const {
        Stats s;
        for (const auto& v : vertices) {
            switch (v.status) {
                case VertexStatus::Interior: ++s.interior; break;
                case VertexStatus::DeadEnd: ++s.dead_end; break;
                case VertexStatus::HenselRoot: ++s.hensel_root; break;
                case VertexStatus::StalkEntry: ++s.stalk_entry; break;
            }
        }
        return s;
    }

private:
    Prime p_;
    std::size_t n_;
};

// ---------------------------------------------------------------------------
// Hensel criterion

namespace detail {

inline std::vector<std::uint64_t> digits_u64(const Point& r) {
    std::vector<std::uint64_t> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i].get_ui();
    return out;
}

struct PartialsModP {
    std::vector<ModularEvaluator> evals;

    PartialsModP(const Polynomial& P, const Prime& p) {
        for (std::size_t i = 0; i < P.nvars(); ++i) evals.emplace_back(partial_derivative(P, i), p.value());
    }

    bool some_unit(std::span<const std::uint64_t> r) const {
        return std::any_of(evals.begin(), evals.end(), [&](const ModularEvaluator& e) { return e(r) != 0; });
    }
};

}  // namespace detail

/// Some partial derivative of P is a unit mod p at the root r.
inline bool hensel_check(const Polynomial& P, const Point& r, const Prime& p) {
    if (r.size() != P.nvars()) throw Error(ErrorCode::dimension_mismatch, "point dimension differs from n");
    if (mod_u64(evaluate(P, r), p.value()) != 0) {
        throw Error(ErrorCode::precondition, "hensel_check requires P(r) = 0 mod p");
    }
    for (std::size_t i = 0; i < P.nvars(); ++i) {
        if (mod_u64(evaluate(partial_derivative(P, i), r), p.value()) != 0) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Model-stalk certification

struct CertifyResult {
    std::optional<StalkCertificate> certificate;
    bool candidate = false;  // pattern holds mod p but not mod p^m
};

namespace detail {

struct SideShape {
    unsigned low = 0;        // exponent of the lowest term
    Integer low_coef;
    Valuation low_val;
    Valuation tail_val = Valuation::infinite();  // min valuation over higher terms
};

inline std::optional<SideShape> side_shape(const Polynomial& F, const Prime& p) {
    if (F.is_zero() || sgn(F.constant_term()) != 0) return std::nullopt;
    SideShape s;
    bool first = true;
    for (const auto& [m, c] : F.terms()) {  // ascending exponent
        if (first) {
            s.low = m[0];
            s.low_coef = c;
            s.low_val = val_p(c, p);
            first = false;
        } else {
            s.tail_val = min(s.tail_val, val_p(c, p));
        }
    }
    return s;
}

inline CertifyResult try_orientation(const SideShape& a, const SideShape& b, bool swapped, const Prime& p) {
    CertifyResult out;
    if (a.low_val != Valuation(0) || a.low < 2 || a.low > b.low) return out;
    const std::uint64_t alpha = b.low_val.value();
    const unsigned m = static_cast<unsigned>(val_p(Integer(a.low), p).value()) + 2;
    const bool a_ok = a.tail_val >= Valuation(m);
    const bool b_ok = b.tail_val >= Valuation(alpha + m);
    if (a_ok && b_ok) {
        StalkCertificate c;
        c.u = a.low;
        c.v = b.low;
        c.alpha = alpha;
        c.u0 = a.low_coef;
        c.v0 = b.low_coef / ipow(p.z(), alpha);
        c.m = m;
        c.swapped = swapped;
        out.certificate = c;
    } else if (a.tail_val >= Valuation(1) && b.tail_val >= Valuation(alpha + 1)) {
        out.candidate = true;
    }
    return out;
}

}  // namespace detail

/// Recognise a separated bivariate polynomial as a model stalk; x is tried as the u-side first.
inline CertifyResult certify_model_stalk(const Polynomial& P, const Prime& p) {
    if (P.nvars() != 2) return {};
    auto split = split_separated(P);
    if (!split) return {};
    auto sx = detail::side_shape(split->first, p);
    auto sy = detail::side_shape(split->second, p);
    if (!sx || !sy) return {};
    CertifyResult r1 = detail::try_orientation(*sx, *sy, false, p);
    if (r1.certificate) return r1;
    CertifyResult r2 = detail::try_orientation(*sy, *sx, true, p);
    if (r2.certificate) return r2;
    return {std::nullopt, r1.candidate || r2.candidate};
}

inline CertifyResult certify_model_stalk(const TrunkVertex& v, const Prime& p) {
    CertifyResult r = certify_model_stalk(v.attached, p);
    if (r.certificate) r.certificate->entry = v.index;
    return r;
}

/// u0 x^u + p^alpha v0 y^v in model coordinates (first variable carries x^u).
inline Polynomial model_polynomial(const StalkCertificate& c, const Prime& p, std::uint64_t alpha) {
    Polynomial Q(2);
    Q.add_term(Monomial({c.u, 0}), c.u0);
    Q.add_term(Monomial({0, c.v}), ipow(p.z(), alpha) * c.v0);
    return Q;
}

inline Polynomial model_polynomial(const StalkCertificate& c, const Prime& p) {
    return model_polynomial(c, p, c.alpha);
}

// ---------------------------------------------------------------------------
// Construction

namespace detail {

/// Status of a fresh child, and the roots of its attached polynomial when it may be expanded.
inline void classify_child(TrunkVertex& child, bool parent_unit_partial, const Prime& p, const BuildOptions& opt) {
    if (parent_unit_partial) {
        child.status = VertexStatus::HenselRoot;
        if (!opt.prune_hensel) child.pending_roots = roots_mod_p(child.attached, p, opt.root_budget);
        return;
    }
    child.pending_roots = roots_mod_p(child.attached, p, opt.root_budget);
    if (child.pending_roots.empty()) {
        child.status = VertexStatus::DeadEnd;
        return;
    }
    if (child.thickness == 1) {
        throw Error(ErrorCode::verification_mismatch,
                    "thickness-1 vertex with vanishing gradient has roots; the dead-end property failed");
    }
    if (opt.certify_stalks) {
        CertifyResult c = certify_model_stalk(child, p);
        child.stalk_candidate = c.candidate;
        if (c.certificate) {
            child.status = VertexStatus::StalkEntry;
            child.certificate = c.certificate;
            child.pending_roots.clear();
            return;
        }
    }
    child.status = VertexStatus::Interior;
}

inline bool wants_expansion(const TrunkVertex& v, std::uint64_t H, const BuildOptions& opt) {
    if (v.status == VertexStatus::DeadEnd || v.status == VertexStatus::StalkEntry) return false;
    if (v.status == VertexStatus::HenselRoot && opt.prune_hensel) return false;
    if (v.height >= H) return false;
    if (opt.phi_bound && v.treetop >= *opt.phi_bound) return false;
    return true;
}

inline void mark_symbolic(TrunkVertex& v, const BuildOptions& opt) {
    if (v.status == VertexStatus::StalkEntry) v.symbolic = true;
    if (v.status == VertexStatus::HenselRoot && opt.prune_hensel) v.symbolic = true;
}

/// Expand vertex i in place: one child per root of its attached polynomial, lexicographic.
inline void expand_vertex(Trunk& T, std::size_t i, const BuildOptions& opt) {
    const Prime& p = T.p();
    std::vector<Point> roots = std::move(T.vertices[i].pending_roots);
    T.vertices[i].pending_roots.clear();
    const Polynomial parent_poly = T.vertices[i].attached;
    const detail::PartialsModP partials(parent_poly, p);
    const Integer scale = ipow(p.z(), T.vertices[i].height);
    for (const Point& r : roots) {
        if (i == 0 && opt.skip_root_digit && r == *opt.skip_root_digit) continue;
        if (T.vertices.size() >= opt.vertex_budget) {
            T.truncated = true;
            throw Error(ErrorCode::budget, "trunk vertex budget of " + std::to_string(opt.vertex_budget) + " exceeded");
        }
        auto [t, Q] = thickness(parent_poly, r, p);
        TrunkVertex child;
        child.index = T.vertices.size();
        child.parent = i;
        child.height = T.vertices[i].height + 1;
        child.residue = T.vertices[i].residue;
        for (std::size_t j = 0; j < r.size(); ++j) child.residue[j] += scale * r[j];
        child.thickness = t;
        child.treetop = T.vertices[i].treetop + t;
        child.attached = std::move(Q);
        classify_child(child, partials.some_unit(digits_u64(r)), p, opt);
        mark_symbolic(child, opt);
        T.vertices[i].children.push_back(child.index);
        T.vertices.push_back(std::move(child));
    }
    T.vertices[i].expanded = true;
}

inline TrunkVertex make_root(const Polynomial& P, const Prime& p, const BuildOptions& opt, std::uint64_t& t0) {
    if (P.is_zero()) throw Error(ErrorCode::precondition, "the trunk of the zero polynomial is undefined");
    t0 = content_val(P, p).value();
    TrunkVertex root;
    root.residue.assign(P.nvars(), Integer(0));
    root.thickness = t0;
    root.treetop = t0;
    root.attached = t0 == 0 ? P : P.divide_exact(ipow(p.z(), t0));
    root.pending_roots = roots_mod_p(root.attached, p, opt.root_budget);
    if (root.pending_roots.empty()) {
        root.status = VertexStatus::DeadEnd;
    } else if (opt.certify_stalks) {
        CertifyResult c = certify_model_stalk(root, p);
        root.stalk_candidate = c.candidate;
        if (c.certificate) {
            root.status = VertexStatus::StalkEntry;
            root.certificate = c.certificate;
            root.symbolic = true;
            root.pending_roots.clear();
        }
    }
    return root;
}

}  // namespace detail

/// Breadth-first trunk construction up to height H.
/// On budget exhaustion the partial trunk is returned with `truncated` set.
inline Trunk build_trunk(const Polynomial& P, const Prime& p, std::uint64_t H, const BuildOptions& opt = {}) {
    Trunk T(p, P.nvars());
    T.max_height = H;
    T.vertices.push_back(detail::make_root(P, p, opt, T.root_content));
    try {
        for (std::size_t i = 0; i < T.vertices.size(); ++i) {
            if (detail::wants_expansion(T.vertices[i], H, opt)) detail::expand_vertex(T, i, opt);
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::budget || !T.truncated) throw;
    }
    return T;
}

// ---------------------------------------------------------------------------
// Signatures

struct Signature {
    std::uint64_t value = 0;
    friend bool operator==(const Signature&, const Signature&) = default;
};

namespace detail {

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t combine(std::uint64_t h, std::uint64_t v) { return splitmix(h ^ splitmix(v)); }

}  // namespace detail

/// Recursive multiset hash over (thickness, status, children); pruned vertices hash their parameters.
/// Only vertices within `max_depth` levels of `from` are included.
inline Signature canonical_signature(const Trunk& T, std::size_t from = 0,
                                     std::optional<std::uint64_t> max_depth = std::nullopt) {
    const std::uint64_t base = T[from].height;
    std::vector<std::uint64_t> memo(T.size(), 0);
    // Children always carry larger indices than their parent.
    for (std::size_t i = T.size(); i-- > from;) {
        const TrunkVertex& v = T[i];
        if (max_depth && v.height > base + *max_depth) continue;
        std::uint64_t h = detail::combine(0x51ed2701, v.thickness);
        h = detail::combine(h, static_cast<std::uint64_t>(v.status));
        h = detail::combine(h, v.symbolic ? 1 : 0);
        if (v.certificate) {
            const auto& c = *v.certificate;
            const std::uint64_t pm = T.p().value();
            h = detail::combine(h, c.u);
            h = detail::combine(h, c.v);
            h = detail::combine(h, c.alpha);
            h = detail::combine(h, mod_u64(c.u0, pm));
            h = detail::combine(h, mod_u64(c.v0, pm));
        }
        std::vector<std::uint64_t> kids;
        if (!max_depth || v.height < base + *max_depth) {
            for (std::size_t c : v.children) kids.push_back(memo[c]);
        }
        std::sort(kids.begin(), kids.end());
        h = detail::combine(h, kids.size());
        for (std::uint64_t k : kids) h = detail::combine(h, k);
        memo[i] = h;
    }
    return {memo[from]};
}

// ---------------------------------------------------------------------------
// Rule-based generator for certified subtrees

namespace detail {

/// Copy the strict descendants of `src_root` in `src` under vertex `dst_parent` of `dst`.
inline void graft(Trunk& dst, std::size_t dst_parent, const Trunk& src, std::size_t src_root, std::uint64_t budget) {
    const TrunkVertex& anchor = dst.vertices[dst_parent];
    const std::uint64_t dh = anchor.height;
    const std::uint64_t dphi = anchor.treetop;
    const Point base = anchor.residue;
    const Integer scale = ipow(dst.p().z(), dh);
    std::deque<std::pair<std::size_t, std::size_t>> queue{{src_root, dst_parent}};
    while (!queue.empty()) {
        auto [s, d] = queue.front();
        queue.pop_front();
        for (std::size_t c : src[s].children) {
            if (dst.vertices.size() >= budget) {
                throw Error(ErrorCode::budget, "generator vertex budget exceeded");
            }
            TrunkVertex v = src[c];
            v.index = dst.vertices.size();
            v.parent = d;
            v.height += dh;
            v.treetop += dphi;
            for (std::size_t j = 0; j < v.residue.size(); ++j) v.residue[j] = base[j] + scale * v.residue[j];
            v.children.clear();
            v.pending_roots.clear();
            dst.vertices[d].children.push_back(v.index);
            dst.vertices.push_back(std::move(v));
            queue.emplace_back(c, dst.vertices.size() - 1);
        }
    }
}

class StalkGenerator {
public:
    StalkGenerator(const StalkCertificate& c, const Prime& p, std::uint64_t depth, std::uint64_t budget)
        : c_(c), p_(p), depth_(depth), budget_(budget), out_(p, 2) {}

    Trunk run() {
        out_.max_height = depth_;
        TrunkVertex root;
        root.residue = {Integer(0), Integer(0)};
        root.attached = model_polynomial(c_, p_);
        out_.vertices.push_back(std::move(root));
        stalk(0);
        return std::move(out_);
    }

private:
    std::size_t push(std::size_t parent, std::uint64_t t, Point residue, Polynomial attached, VertexStatus s) {
        if (out_.vertices.size() >= budget_) throw Error(ErrorCode::budget, "generator vertex budget exceeded");
        TrunkVertex v;
        v.index = out_.vertices.size();
        v.parent = parent;
        v.height = out_.vertices[parent].height + 1;
        v.thickness = t;
        v.treetop = out_.vertices[parent].treetop + t;
        v.residue = std::move(residue);
        v.attached = std::move(attached);
        v.status = s;
        out_.vertices[parent].children.push_back(v.index);
        out_.vertices.push_back(std::move(v));
        return out_.vertices.size() - 1;
    }

    std::uint64_t alpha_at(std::uint64_t k) const { return c_.alpha + k * (c_.v - c_.u); }

    /// u0 x^u * p^xshift + p^yshift v0 (S + p^j y)^v
    Polynomial branch_poly(std::uint64_t xshift, std::uint64_t yshift, const Integer& S, std::uint64_t j) const {
        Polynomial X = Polynomial::variable(2, 0);
        Polynomial Y = Polynomial::variable(2, 1);
        Polynomial inner = Polynomial::constant(2, S) + ipow(p_.z(), j) * Y;
        return (ipow(p_.z(), xshift) * c_.u0) * X.pow(c_.u) + (ipow(p_.z(), yshift) * c_.v0) * inner.pow(c_.v);
    }

    void graft_explicit(std::size_t at, const Polynomial& P, bool skip_origin) {
        BuildOptions opt;
        opt.vertex_budget = budget_;
        if (skip_origin) opt.skip_root_digit = Point{Integer(0), Integer(0)};
        const std::uint64_t h = out_.vertices[at].height;
        Trunk sub = build_trunk(P, p_, depth_ - h, opt);
        if (sub.truncated) throw Error(ErrorCode::budget, "generator vertex budget exceeded");
        out_.vertices[at].expanded = true;
        graft(out_, at, sub, 0, budget_);
    }

    void stalk(std::uint64_t k) {
        // Stalk vertices sit at height k with zero residue.
        std::size_t idx = out_.vertices.size() - 1;
        while (true) {
            if (k >= depth_) return;
            const std::uint64_t ak = alpha_at(k);
            const Integer pk = ipow(p_.z(), k);
            std::size_t next =
                push(idx, c_.u, {Integer(0), Integer(0)}, model_polynomial(c_, p_, alpha_at(k + 1)), VertexStatus::Interior);
            out_.vertices[idx].expanded = true;
            if (ak == 0) {
                graft_explicit(idx, model_polynomial(c_, p_, 0), true);
            } else {
                for (std::uint64_t s = 1; s < p_.value(); ++s) branch(idx, Integer(static_cast<unsigned long>(s)), 1, ak, pk);
            }
            idx = next;
            ++k;
        }
    }

    /// Off-stalk vertex at branch level j with digit prefix S (j digits); rem is the exponent before this step.
    void branch(std::size_t parent, const Integer& S, std::uint64_t j, std::uint64_t rem, const Integer& pk) {
        const Point residue{Integer(0), S * pk};
        if (rem < c_.u) {
            push(parent, rem, residue, branch_poly(c_.u - rem, 0, S, j), VertexStatus::DeadEnd);
            return;
        }
        const std::uint64_t after = rem - c_.u;
        Polynomial attached = branch_poly(0, after, S, j);
        if (after == 0) {
            const bool has_roots = !roots_mod_p(attached, p_).empty();
            std::size_t idx = push(parent, c_.u, residue, attached,
                                   has_roots ? VertexStatus::Interior : VertexStatus::DeadEnd);
            if (has_roots && out_.vertices[idx].height < depth_) graft_explicit(idx, attached, false);
            return;
        }
        std::size_t idx = push(parent, c_.u, residue, std::move(attached), VertexStatus::Interior);
        if (out_.vertices[idx].height >= depth_) return;
        out_.vertices[idx].expanded = true;
        const Integer pj = ipow(p_.z(), j);
        for (std::uint64_t s = 0; s < p_.value(); ++s) {
            branch(idx, S + pj * static_cast<unsigned long>(s), j + 1, after, pk);
        }
    }

    StalkCertificate c_;
    Prime p_;
    std::uint64_t depth_;
    std::uint64_t budget_;
    Trunk out_;
};

}  // namespace detail

/// Explicit subtree of a certified model to relative height `depth`, generated from the
/// branch rules rather than by root search. Coordinates are the model's (u-side first).
inline Trunk expand_certified_subtree(const StalkCertificate& cert, const Prime& p, std::uint64_t depth,
                                      std::uint64_t budget = 1'000'000) {
    return detail::StalkGenerator(cert, p, depth, budget).run();
}

}  // namespace ptrunk
