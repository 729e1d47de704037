#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "pdtune/bounds.hpp"

namespace pdtune {

enum class ArithOp { Add, Sub, Mul, Div };

namespace gj {

struct Input {
    std::size_t index;
};
struct Const {
    double value;
};
struct Arith {
    ArithOp op;
    std::size_t left;
    std::size_t right;
};
/// if (test >= 0) then-value else else-value.
struct Cond {
    std::size_t test;
    std::size_t then_id;
    std::size_t else_id;
};

}  // namespace gj

using GjNode = std::variant<gj::Input, gj::Const, gj::Arith, gj::Cond>;

/// Formal (numerator, denominator) degree of the rational function a node
/// computes. No cancellation is ever assumed.
struct FormalDegree {
    unsigned num = 0;
    unsigned den = 0;
    unsigned value() const noexcept { return num > den ? num : den; }
    friend bool operator==(const FormalDegree&, const FormalDegree&) = default;
};

/// A straight-line program over +, -, *, / with sign-test conditionals.
/// Node i may only reference nodes with smaller ids.
class GjProgram {
public:
    GjProgram(std::size_t inputs, std::vector<GjNode> nodes, std::size_t output);

    std::size_t inputs() const noexcept { return inputs_; }
    const std::vector<GjNode>& nodes() const noexcept { return nodes_; }
    std::size_t output() const noexcept { return output_; }

    /// Per-node formal degrees, in node order.
    std::vector<FormalDegree> degrees() const;

private:
    std::size_t inputs_;
    std::vector<GjNode> nodes_;
    std::size_t output_;
};

/// Ids each node reads.
std::vector<std::size_t> gj_dependencies(const GjNode& node);

/// Builds a program from nodes carrying explicit ids in arbitrary order.
/// Throws CycleError if the dependency graph has a cycle and
/// std::invalid_argument if it is acyclic but not listed in topological order.
GjProgram gj_from_labelled(std::size_t inputs,
                           const std::vector<std::pair<std::size_t, GjNode>>& labelled,
                           std::size_t output);

unsigned gj_degree(const GjProgram& prog);
std::size_t gj_predicate_complexity(const GjProgram& prog);

/// c p log2(max(Delta Lambda, 2)).
BoundReport gj_pdim_bound(const GjProgram& prog, std::size_t p, double c = kDefaultConstant);

}  // namespace pdtune
