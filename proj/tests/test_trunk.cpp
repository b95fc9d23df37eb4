#include <gtest/gtest.h>

#include "checks.hpp"
#include "ptrunk/emit.hpp"

using namespace ptrunk;

namespace {

Polynomial P(const char* s) { return parse_polynomial(s); }
Point pt(std::initializer_list<long> xs) {
    Point r;
    for (long x : xs) r.emplace_back(x);
    return r;
}
bool is_zero_point(const Point& r) {
    return std::all_of(r.begin(), r.end(), [](const Integer& x) { return x == 0; });
}

BuildOptions certified() {
    BuildOptions o;
    o.certify_stalks = true;
    return o;
}

}  // namespace

TEST(BuildTrunk, RootChildren) {
    const Trunk T = build_trunk(P("x^2 - y^3"), Prime(5), 3);
    const auto& root = T.root();
    ASSERT_EQ(root.children.size(), 5u);
    std::size_t hensel = 0;
    for (std::size_t c : root.children) {
        const auto& v = T[c];
        if (is_zero_point(v.residue)) {
            EXPECT_EQ(v.thickness, 2u);
            EXPECT_EQ(v.status, VertexStatus::Interior);
        } else {
            EXPECT_EQ(v.thickness, 1u);
            EXPECT_EQ(v.status, VertexStatus::HenselRoot);
            EXPECT_TRUE(v.symbolic);
            ++hensel;
        }
    }
    EXPECT_EQ(hensel, 4u);
}

TEST(BuildTrunk, PrincipalChain) {
    const Trunk T = build_trunk(P("x^2 - y^3"), Prime(5), 3);
    std::size_t cur = 0;
    for (unsigned k = 1; k <= 3; ++k) {
        std::size_t next = kNoVertex;
        for (std::size_t c : T[cur].children)
            if (is_zero_point(T[c].residue)) next = c;
        ASSERT_NE(next, kNoVertex);
        const Polynomial want = P("x^2 - y^3 + y^3") - ipow(Integer(5), k) * P("y^3 + 0*x");
        EXPECT_EQ(T[next].attached, want) << k;
        EXPECT_EQ(T[next].treetop, 2u * k);
        cur = next;
    }
}

TEST(BuildTrunk, ZeroHeightIsRootOnly) {
    const Trunk T = build_trunk(P("x^2 - 5*x*y + y^4"), Prime(5), 0);
    EXPECT_EQ(T.size(), 1u);
    EXPECT_EQ(T.resolved_level(), Valuation(0));
}

TEST(BuildTrunk, NonPrimitiveRoot) {
    const Trunk T = build_trunk(P("9*x^2 - 27*y^3"), Prime(3), 2);
    EXPECT_EQ(T.root_content, 2u);
    EXPECT_EQ(T.root().treetop, 2u);
    EXPECT_EQ(T.root().attached, P("x^2 - 3*y^3"));
}

TEST(BuildTrunk, ZeroPolynomialRejected) {
    EXPECT_THROW((void)build_trunk(Polynomial(2), Prime(3), 2), Error);
}

TEST(BuildTrunk, BudgetGivesTruncatedPartialTrunk) {
    BuildOptions o;
    o.vertex_budget = 10;
    const Trunk T = build_trunk(P("x^2 - y^3"), Prime(5), 20, o);
    EXPECT_TRUE(T.truncated);
    EXPECT_LE(T.size(), 10u);
    try {
        (void)truncated_series(T, 20);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::budget);
    }
}

TEST(BuildTrunk, RootSearchBudget) {
    BuildOptions o;
    o.root_budget = 100;
    try {
        (void)build_trunk(P("x*y*z - 1"), Prime(7), 2, o);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::budget);
    }
}

TEST(BuildTrunk, ChildrenInDigitOrder) {
    const Trunk T = build_trunk(P("x^2 - y^3"), Prime(5), 2);
    std::vector<Point> res;
    for (std::size_t c : T.root().children) res.push_back(T[c].residue);
    EXPECT_TRUE(std::is_sorted(res.begin(), res.end()));
}

TEST(Hensel, Examples) {
    EXPECT_TRUE(hensel_check(P("x^2 - y^3"), pt({1, 1}), Prime(5)));
    EXPECT_FALSE(hensel_check(P("x^2 - y^3"), pt({0, 0}), Prime(5)));
    // x^2 - S^3 mod p with S a nonzero square: simple root in x
    EXPECT_TRUE(hensel_check(P("x^2 - (4 + 5*y)^3"), pt({3, 0}), Prime(5)));
    try {
        (void)hensel_check(P("x^2 - y^3"), pt({1, 0}), Prime(5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::precondition);
    }
}

TEST(Certify, Examples) {
    auto a = certify_model_stalk(P("x^2 - 125*y^3"), Prime(5));
    ASSERT_TRUE(a.certificate);
    EXPECT_EQ(a.certificate->u, 2u);
    EXPECT_EQ(a.certificate->v, 3u);
    EXPECT_EQ(a.certificate->alpha, 3u);
    EXPECT_EQ(a.certificate->u0, 1);
    EXPECT_EQ(a.certificate->v0, -1);

    for (std::uint64_t pv : {2u, 3u, 5u, 7u}) {
        auto b = certify_model_stalk(P("x^2 - y^3"), Prime(pv));
        ASSERT_TRUE(b.certificate) << pv;
        EXPECT_EQ(b.certificate->alpha, 0u);
    }
    EXPECT_FALSE(certify_model_stalk(P("x + y"), Prime(5)).certificate);
    EXPECT_FALSE(certify_model_stalk(P("x*y"), Prime(5)).certificate);
}

TEST(Certify, OrientationAndTails) {
    auto s = certify_model_stalk(P("y^2 + 3*x^5"), Prime(5));
    ASSERT_TRUE(s.certificate);
    EXPECT_TRUE(s.certificate->swapped);
    EXPECT_EQ(s.certificate->u, 2u);
    EXPECT_EQ(s.certificate->v, 5u);
    // tail divisible by p^m (m = 2 here)
    EXPECT_TRUE(certify_model_stalk(P("x^2 + 25*x^3 - y^3"), Prime(5)).certificate);
    // tail only divisible by p: flagged, not certified
    auto c = certify_model_stalk(P("x^2 + 5*x^3 - y^3"), Prime(5));
    EXPECT_FALSE(c.certificate);
    EXPECT_TRUE(c.candidate);
}

TEST(Signature, DeadEndLeafIsConstant) {
    Trunk a(Prime(5), 2), b(Prime(5), 1);
    TrunkVertex v;
    v.thickness = 1;
    v.status = VertexStatus::DeadEnd;
    v.attached = P("x^2 + 2 + 0*y");
    a.vertices.push_back(v);
    v.attached = P("3*x + 1");
    b.vertices.push_back(v);
    EXPECT_EQ(canonical_signature(a), canonical_signature(b));
}

TEST(Signature, DistinguishesStalkShapes) {
    EXPECT_NE(canonical_signature(build_trunk(P("x^2 - y^3"), Prime(5), 3)),
              canonical_signature(build_trunk(P("x^2 - y^5"), Prime(5), 3)));
}

TEST(Signature, TranslationInvariance) {
    std::mt19937_64 rng(2);
    auto t = checks::translation_invariance(P("x^2 - y^3"), Prime(5), 4, rng);
    EXPECT_EQ(t.violations, 0u);
}

TEST(Generator, MatchesDirectExpansionForAppendixModel) {
    const Prime p(5);
    auto c = certify_model_stalk(P("x^2 - y^3"), p);
    ASSERT_TRUE(c.certificate);
    for (std::uint64_t depth : {3u, 5u, 7u}) {
        EXPECT_EQ(canonical_signature(expand_certified_subtree(*c.certificate, p, depth)),
                  canonical_signature(build_trunk(P("x^2 - y^3"), p, depth)))
            << depth;
    }
}

TEST(Generator, ModelFamilies) {
    for (std::uint64_t pv : {2u, 3u, 5u}) {
        const Prime p(pv);
        for (const char* s : {"x^2 - y^2", "x^2 + 2*y^5", "x^3 - y^4", "x^2 - 27*y^3", "2*x^3 + 9*y^3", "x^4 + y^6"}) {
            auto c = certify_model_stalk(P(s), p);
            if (!c.certificate) continue;
            EXPECT_EQ(canonical_signature(expand_certified_subtree(*c.certificate, p, 5)),
                      canonical_signature(build_trunk(P(s), p, 5)))
                << s << " p=" << pv;
        }
    }
}

namespace {

/// Off-stalk children of the principal stalk vertex at height h of the explicit x^2 - y^3 trunk.
std::vector<std::size_t> departures(const Trunk& T, std::uint64_t h) {
    std::size_t cur = 0;
    for (std::uint64_t k = 0; k < h; ++k) {
        for (std::size_t c : T[cur].children)
            if (is_zero_point(T[c].residue)) cur = c;
    }
    std::vector<std::size_t> out;
    for (std::size_t c : T[cur].children)
        if (!is_zero_point(T[c].residue)) out.push_back(c);
    return out;
}

void collect(const Trunk& T, std::size_t i, std::vector<std::size_t>& out) {
    out.push_back(i);
    for (std::size_t c : T[i].children) collect(T, c, out);
}

bool is_square_mod(const Integer& s, std::uint64_t p) {
    for (std::uint64_t x = 1; x < p; ++x)
        if ((x * x) % p == mod_u64(s, p)) return true;
    return false;
}

}  // namespace

TEST(AppendixShapes, OddDepartureStopsAtHeight3lPlus2) {
    for (std::uint64_t pv : {3u, 5u}) {
        const Prime p(pv);
        const Trunk T = build_trunk(P("x^2 - y^3"), p, 9);
        for (std::uint64_t l = 0; 3 * l + 2 <= 9; ++l) {
            const auto deps = departures(T, 2 * l + 1);
            EXPECT_EQ(deps.size(), pv - 1);
            for (std::size_t d : deps) {
                std::vector<std::size_t> sub;
                collect(T, d, sub);
                for (std::size_t i : sub) {
                    const auto& v = T[i];
                    EXPECT_LE(v.height, 3 * l + 2);
                    if (v.children.empty()) {
                        EXPECT_EQ(v.height, 3 * l + 2);
                        EXPECT_EQ(v.thickness, 1u);
                        EXPECT_EQ(v.status, VertexStatus::DeadEnd);
                    } else {
                        EXPECT_EQ(v.thickness, 2u);
                    }
                }
            }
        }
    }
}

TEST(AppendixShapes, EvenDepartureSplitsBySquareClass) {
    for (std::uint64_t pv : {3u, 5u, 7u}) {
        const Prime p(pv);
        const Trunk T = build_trunk(P("x^2 - y^3"), p, 7);
        for (std::uint64_t l = 1; 3 * l + 1 <= 7; ++l) {
            std::size_t live = 0, dead = 0;
            for (std::size_t d : departures(T, 2 * l)) {
                std::vector<std::size_t> sub;
                collect(T, d, sub);
                std::size_t hensel = 0, ends = 0;
                for (std::size_t i : sub) {
                    hensel += T[i].status == VertexStatus::HenselRoot;
                    ends += T[i].status == VertexStatus::DeadEnd;
                }
                const Integer s = T[d].residue[1] / ipow(p.z(), 2 * l);
                const Integer branches = ipow(p.z(), l - 1);
                if (is_square_mod(s, pv)) {
                    EXPECT_EQ(Integer(static_cast<unsigned long>(hensel)), branches * 2 * pv);
                    EXPECT_EQ(ends, 0u);
                    ++live;
                } else {
                    EXPECT_EQ(hensel, 0u);
                    EXPECT_EQ(Integer(static_cast<unsigned long>(ends)), branches);
                    ++dead;
                }
            }
            EXPECT_EQ(live, (pv - 1) / 2);
            EXPECT_EQ(dead, (pv - 1) / 2);
        }
    }
}

TEST(Properties, StructuralLemmasOnCorpus) {
    std::mt19937_64 rng(44);
    checks::Tally all;
    for (const auto& Q : oracle::corpus(60)) {
        for (std::uint64_t pv : {2u, 3u, 5u}) {
            const Prime p(pv);
            const Trunk T = build_trunk(Q, p, 4);
            all.merge(checks::trunk_invariants(Q, T, rng));
            all.merge(checks::hensel_regularity(T));
            all.merge(checks::translation_invariance(Q, p, 3, rng));
            all.merge(checks::certified_soundness(build_trunk(Q, p, 3, certified()), 4));
        }
    }
    EXPECT_GT(all.checked, 1000u);
    EXPECT_EQ(all.violations, 0u) << (all.log.empty() ? "" : all.log.front());
}

TEST(Emit, JsonAndDot) {
    const Trunk T = build_trunk(P("x^2 - y^3"), Prime(5), 2, certified());
    const Json j = trunk_json(T);
    EXPECT_EQ(j["p"], 5);
    EXPECT_EQ(j["vertices"][0]["parent"], nullptr);
    const std::string dot = trunk_dot(build_trunk(P("x^2 - y^3"), Prime(5), 2));
    EXPECT_NE(dot.find("doublecircle"), std::string::npos);
    EXPECT_NE(dot.find("digraph"), std::string::npos);
    EXPECT_NE(trunk_text(T).find("trunk p=5"), std::string::npos);
}
