#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "pdtune/gj.hpp"
#include "pdtune/polynomial.hpp"

// Expansion oracle for GJ programs: every node is expanded through
// polynomial-core into the rational functions it can compute.
namespace testing_support {

using namespace pdtune;


using Branches = std::vector<RationalFunction>;

inline constexpr std::size_t kInputs = 2;

inline gj::Arith arith(ArithOp op, std::size_t l, std::size_t r) { return {op, l, r}; }

inline unsigned true_degree(const RationalFunction& r) {
    return std::max(r.numerator().degree(), r.denominator().degree());
}

inline RationalFunction apply(ArithOp op, const RationalFunction& x, const RationalFunction& y) {
    const auto& a = x.numerator();
    const auto& b = x.denominator();
    const auto& c = y.numerator();
    const auto& d = y.denominator();
    switch (op) {
        case ArithOp::Add: return {a * d + c * b, b * d};
        case ArithOp::Sub: return {a * d - c * b, b * d};
        case ArithOp::Mul: return {a * c, b * d};
        case ArithOp::Div: return {a * d, b * c};
    }
    return RationalFunction(a);
}

// Expands every node into the set of rational functions it can take, one per
// choice of branch at each conditional on the way.
struct Expander {
    std::vector<Branches> sets;

    bool push(const GjNode& node) {
        Branches out;
        const auto one = Polynomial::constant(kInputs, 1.0);
        if (auto* in = std::get_if<gj::Input>(&node)) {
            out.emplace_back(Polynomial::variable(kInputs, in->index), one);
        } else if (auto* c = std::get_if<gj::Const>(&node)) {
            out.emplace_back(Polynomial::constant(kInputs, c->value), one);
        } else if (auto* a = std::get_if<gj::Arith>(&node)) {
            for (const auto& l : sets[a->left])
                for (const auto& r : sets[a->right]) {
                    if (a->op == ArithOp::Div && r.numerator().is_zero()) return false;
                    out.push_back(apply(a->op, l, r));
                }
        } else {
            const auto& cn = std::get<gj::Cond>(node);
            out = sets[cn.then_id];
            out.insert(out.end(), sets[cn.else_id].begin(), sets[cn.else_id].end());
        }
        if (out.size() > 256) return false;
        sets.push_back(std::move(out));
        return true;
    }

    unsigned degree() const {
        unsigned best = 0;
        for (const auto& s : sets)
            for (const auto& r : s) best = std::max(best, true_degree(r));
        return best;
    }
};

struct RandomProgram {
    std::vector<GjNode> nodes;
    unsigned oracle_degree = 0;
};

// Random program of at most 10 nodes. In scaled mode the left operand of
// every + and - is first multiplied by a fresh random constant, so no
// cancellation can happen except on a null set.
inline RandomProgram random_program(std::mt19937_64& rng, bool scaled) {
    std::uniform_real_distribution<double> coef(0.5, 2.0);
    std::uniform_int_distribution<int> kind(0, 9);
    Expander ex;
    std::vector<GjNode> nodes;
    auto add = [&](GjNode n) {
        if (!ex.push(n)) return false;
        nodes.push_back(n);
        return true;
    };
    add(gj::Input{0});
    add(gj::Input{1});
    while (nodes.size() < 10) {
        std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
        const int k = kind(rng);
        if (k == 0) {
            add(gj::Const{coef(rng)});
        } else if (k <= 2 && nodes.size() >= 3) {
            add(gj::Cond{pick(rng), pick(rng), pick(rng)});
        } else {
            const auto op = static_cast<ArithOp>(k % 4);
            std::size_t l = pick(rng);
            const std::size_t r = pick(rng);
            if (scaled && (op == ArithOp::Add || op == ArithOp::Sub)) {
                if (nodes.size() + 3 > 10) break;
                add(gj::Const{coef(rng)});
                add(arith(ArithOp::Mul, nodes.size() - 1, l));
                l = nodes.size() - 1;
            }
            if (!add(arith(op, l, r))) add(arith(ArithOp::Mul, l, r));
        }
    }
    return {nodes, ex.degree()};
}

// Same program with nodes listed in another topological order.
inline std::vector<GjNode> reorder(const std::vector<GjNode>& nodes, std::mt19937_64& rng) {
    const std::size_t n = nodes.size();
    std::vector<std::size_t> indeg(n, 0);
    std::vector<std::vector<std::size_t>> users(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto deps = gj_dependencies(nodes[i]);
        std::sort(deps.begin(), deps.end());
        deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
        indeg[i] = deps.size();
        for (auto d : deps) users[d].push_back(i);
    }
    std::vector<std::size_t> ready, order, new_id(n);
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
        const auto at = pick(rng);
        const auto v = ready[at];
        ready.erase(ready.begin() + static_cast<long>(at));
        new_id[v] = order.size();
        order.push_back(v);
        for (auto u : users[v])
            if (--indeg[u] == 0) ready.push_back(u);
    }
    std::vector<GjNode> out;
    for (auto v : order) {
        GjNode node = nodes[v];
        if (auto* a = std::get_if<gj::Arith>(&node)) {
            a->left = new_id[a->left];
            a->right = new_id[a->right];
        } else if (auto* c = std::get_if<gj::Cond>(&node)) {
            c->test = new_id[c->test];
            c->then_id = new_id[c->then_id];
            c->else_id = new_id[c->else_id];
        }
        out.push_back(node);
    }
    return out;
}


}  // namespace testing_support
