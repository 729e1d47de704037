#include "pdtune/gj.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "pdtune/errors.hpp"

namespace pdtune {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

FormalDegree combine(ArithOp op, FormalDegree a, FormalDegree b) {
    switch (op) {
        case ArithOp::Add:
        case ArithOp::Sub:
            // a/b +- c/d = (a d +- c b) / (b d)
            return {std::max(a.num + b.den, b.num + a.den), a.den + b.den};
        case ArithOp::Mul:
            return {a.num + b.num, a.den + b.den};
        case ArithOp::Div:
            // (a/b) / (c/d) = (a d) / (b c)
            return {a.num + b.den, a.den + b.num};
    }
    return {};
}

}  // namespace

std::vector<std::size_t> gj_dependencies(const GjNode& node) {
    return std::visit(overloaded{
                          [](const gj::Input&) { return std::vector<std::size_t>{}; },
                          [](const gj::Const&) { return std::vector<std::size_t>{}; },
                          [](const gj::Arith& a) { return std::vector<std::size_t>{a.left, a.right}; },
                          [](const gj::Cond& c) {
                              return std::vector<std::size_t>{c.test, c.then_id, c.else_id};
                          },
                      },
                      node);
}

GjProgram::GjProgram(std::size_t inputs, std::vector<GjNode> nodes, std::size_t output)
    : inputs_(inputs), nodes_(std::move(nodes)), output_(output) {
    if (nodes_.empty()) throw std::invalid_argument("GJ program has no nodes");
    if (output_ >= nodes_.size()) throw std::invalid_argument("GJ output id out of range");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (const auto* in = std::get_if<gj::Input>(&nodes_[i]); in && in->index >= inputs_) {
            throw std::invalid_argument("GJ input index out of range at node " + std::to_string(i));
        }
        for (auto dep : gj_dependencies(nodes_[i])) {
            if (dep >= i) {
                throw std::invalid_argument("GJ node " + std::to_string(i) +
                                            " references a node that does not precede it");
            }
        }
    }
}

std::vector<FormalDegree> GjProgram::degrees() const {
    std::vector<FormalDegree> deg(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deg[i] = std::visit(overloaded{
                                [](const gj::Input&) { return FormalDegree{1, 0}; },
                                [](const gj::Const&) { return FormalDegree{0, 0}; },
                                [&](const gj::Arith& a) {
                                    return combine(a.op, deg[a.left], deg[a.right]);
                                },
                                [&](const gj::Cond& c) {
                                    return FormalDegree{
                                        std::max(deg[c.then_id].num, deg[c.else_id].num),
                                        std::max(deg[c.then_id].den, deg[c.else_id].den)};
                                },
                            },
                            nodes_[i]);
    }
    return deg;
}

GjProgram gj_from_labelled(std::size_t inputs,
                           const std::vector<std::pair<std::size_t, GjNode>>& labelled,
                           std::size_t output) {
    const std::size_t n = labelled.size();
    std::vector<std::size_t> pos_of(n, n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        const auto id = labelled[pos].first;
        if (id >= n) throw std::invalid_argument("GJ node ids must be 0..n-1");
        if (pos_of[id] != n) throw std::invalid_argument("duplicate GJ node id " + std::to_string(id));
        pos_of[id] = pos;
    }
    // Colour DFS over ids: 0 unseen, 1 on stack, 2 done.
    std::vector<int> colour(n, 0);
    auto dfs = [&](auto&& self, std::size_t id) -> void {
        colour[id] = 1;
        for (auto dep : gj_dependencies(labelled[pos_of[id]].second)) {
            if (dep >= n) throw std::invalid_argument("GJ node references unknown id");
            if (colour[dep] == 1) throw CycleError("cycle detected through GJ node " + std::to_string(dep));
            if (colour[dep] == 0) self(self, dep);
        }
        colour[id] = 2;
    };
    for (std::size_t id = 0; id < n; ++id) {
        if (colour[id] == 0) dfs(dfs, id);
    }
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (labelled[pos].first != pos) {
            throw std::invalid_argument("GJ nodes must be listed in id order (topological order)");
        }
    }
    std::vector<GjNode> nodes;
    nodes.reserve(n);
    for (const auto& [id, node] : labelled) nodes.push_back(node);
    return GjProgram(inputs, std::move(nodes), output);
}

unsigned gj_degree(const GjProgram& prog) {
    unsigned best = 0;
    for (const auto& d : prog.degrees()) best = std::max(best, d.value());
    return best;
}

std::size_t gj_predicate_complexity(const GjProgram& prog) {
    std::set<std::size_t> tests;
    for (const auto& node : prog.nodes()) {
        if (const auto* c = std::get_if<gj::Cond>(&node)) tests.insert(c->test);
    }
    return tests.size();
}

BoundReport gj_pdim_bound(const GjProgram& prog, std::size_t p, double c) {
    if (p == 0) throw std::invalid_argument("p must be >= 1");
    const double delta = gj_degree(prog);
    const double lambda = static_cast<double>(gj_predicate_complexity(prog));
    const double product = std::max(delta * lambda, 2.0);

    BoundReport r;
    r.formula_id = "gj_pdim_bound";
    r.constant_c = c;
    r.bound_value = c * static_cast<double>(p) * std::log2(product);
    r.inputs = {{"p", static_cast<double>(p)}, {"Delta", delta}, {"Lambda", lambda}};
    r.log2_intermediates["log2_Delta_Lambda_guarded"] = std::log2(product);
    return r;
}

}  // namespace pdtune
