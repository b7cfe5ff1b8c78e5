#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace compkit {

// A compositional input is a tuple of component value indices.
using CompInput = std::vector<int>;

// A conjunction J of component slots is a bitmask over {0..C-1}.
using ConjMask = std::uint32_t;

struct ComponentSpace {
    int num_components = 0;
    std::vector<int> cardinalities;

    long long grid_size() const {
        long long n = 1;
        for (int c : cardinalities) n *= c;
        return n;
    }

    bool contains(const CompInput& z) const {
        if (static_cast<int>(z.size()) != num_components) return false;
        for (int c = 0; c < num_components; ++c)
            if (z[c] < 0 || z[c] >= cardinalities[c]) return false;
        return true;
    }

    bool operator==(const ComponentSpace& o) const {
        return num_components == o.num_components && cardinalities == o.cardinalities;
    }
};

inline ComponentSpace make_space(std::vector<int> cards) {
    ComponentSpace s;
    s.num_components = static_cast<int>(cards.size());
    s.cardinalities = std::move(cards);
    if (s.num_components < 1) throw ConfigError("component space needs at least one component");
    for (int c : s.cardinalities)
        if (c < 1) throw ConfigError("component cardinalities must be positive");
    return s;
}

enum class TaskKind { Regression, Classification };

struct Example {
    CompInput z;
    double target = 0.0;
};

struct CompositionalDataset {
    std::string name;
    std::map<std::string, std::string> params;
    ComponentSpace space;
    std::vector<Example> train;
    std::vector<Example> test;
    TaskKind kind = TaskKind::Classification;

    std::vector<CompInput> train_inputs() const {
        std::vector<CompInput> v;
        v.reserve(train.size());
        for (const auto& e : train) v.push_back(e.z);
        return v;
    }
    std::vector<CompInput> test_inputs() const {
        std::vector<CompInput> v;
        v.reserve(test.size());
        for (const auto& e : test) v.push_back(e.z);
        return v;
    }
};

// All tuples of the grid in lexicographic order.
inline std::vector<CompInput> enumerate_grid(const ComponentSpace& space) {
    std::vector<CompInput> out;
    out.reserve(static_cast<std::size_t>(space.grid_size()));
    CompInput z(space.num_components, 0);
    while (true) {
        out.push_back(z);
        int c = space.num_components - 1;
        while (c >= 0 && ++z[c] == space.cardinalities[c]) z[c--] = 0;
        if (c < 0) break;
    }
    return out;
}

inline ConjMask full_mask(int num_components) {
    return (num_components >= 32) ? ~ConjMask(0) : ((ConjMask(1) << num_components) - 1);
}

// O(z,z'): the set of component slots on which two inputs agree.
inline ConjMask overlap(const CompInput& a, const CompInput& b) {
    if (a.size() != b.size()) throw ConfigError("overlap: inputs from different spaces");
    ConjMask m = 0;
    for (std::size_t c = 0; c < a.size(); ++c)
        if (a[c] == b[c]) m |= ConjMask(1) << c;
    return m;
}

inline int overlap_count(const CompInput& a, const CompInput& b) {
    return std::popcount(overlap(a, b));
}

// Conj(z | Z_train): every conjunction J such that some training input matches
// z on all slots in J. Downward closed by construction; contains the empty
// conjunction whenever the training set is non-empty.
inline std::set<ConjMask> conjunction_set(const CompInput& z,
                                          const std::vector<CompInput>& train_inputs) {
    std::set<ConjMask> seen;
    for (const auto& tr : train_inputs) {
        if (tr.size() != z.size()) throw ConfigError("conjunction_set: mismatched spaces");
        seen.insert(overlap(z, tr));
    }
    std::set<ConjMask> out;
    for (ConjMask m : seen)
        for (ConjMask j = m;; j = (j - 1) & m) {
            out.insert(j);
            if (j == 0) break;
        }
    return out;
}

namespace detail {
inline std::string join_reals(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%g", v[i]);
        s += buf;
    }
    return s;
}
}  // namespace detail

// Symbolic addition. Z = V x V with y = v1 + v2; training pairs have at least
// one component in the anchor set W.
inline CompositionalDataset gen_symbolic_addition(const std::vector<double>& values,
                                                  const std::vector<double>& anchors) {
    if (values.size() < 2) throw ConfigError("symbolic addition needs |V| >= 2");
    if (anchors.empty()) throw ConfigError("symbolic addition needs a non-empty anchor set");
    {
        std::set<double> uniq(values.begin(), values.end());
        if (uniq.size() != values.size()) throw ConfigError("symbolic addition values must be distinct");
    }
    std::vector<bool> in_w(values.size(), false);
    for (double w : anchors) {
        auto it = std::find(values.begin(), values.end(), w);
        if (it == values.end()) throw ConfigError("anchor set W must be a subset of V");
        in_w[static_cast<std::size_t>(it - values.begin())] = true;
    }
    CompositionalDataset ds;
    ds.name = "symbolic_addition";
    ds.params["values"] = detail::join_reals(values);
    ds.params["anchors"] = detail::join_reals(anchors);
    ds.space = make_space({static_cast<int>(values.size()), static_cast<int>(values.size())});
    ds.kind = TaskKind::Regression;
    for (int i = 0; i < static_cast<int>(values.size()); ++i)
        for (int j = 0; j < static_cast<int>(values.size()); ++j) {
            Example e{{i, j}, values[i] + values[j]};
            (in_w[i] || in_w[j] ? ds.train : ds.test).push_back(e);
        }
    return ds;
}

enum class CdVariant { CD1 = 1, CD2 = 2, CD3 = 3 };

// Context dependence. Components (context, feature 1, feature 2); the context
// selects which feature's decision function gives the label. Feature values
// 0..2 indicate category 1 (label -1), values 3..5 category 2 (label +1).
// CD-k holds out, under both contexts, the k x k leading sub-block of the
// orthant where feature 1 indicates category 2 and feature 2 category 1.
inline CompositionalDataset gen_context_dependence(CdVariant variant) {
    const int k = static_cast<int>(variant);
    auto decision = [](int v) { return v < 3 ? -1.0 : 1.0; };
    CompositionalDataset ds;
    ds.name = "context_dependence";
    ds.params["variant"] = "CD" + std::to_string(k);
    ds.space = make_space({2, 6, 6});
    ds.kind = TaskKind::Classification;
    for (int co = 0; co < 2; ++co)
        for (int f1 = 0; f1 < 6; ++f1)
            for (int f2 = 0; f2 < 6; ++f2) {
                Example e{{co, f1, f2}, co == 0 ? decision(f1) : decision(f2)};
                bool held = f1 >= 3 && f1 < 3 + k && f2 < k;
                (held ? ds.test : ds.train).push_back(e);
            }
    return ds;
}

// Transitive equivalence. Items partitioned into equivalence classes; inputs
// are ordered pairs of distinct items; target +1 iff same class. The held-out
// item pairs (plus their reverses) form the test set. A nonzero seed permutes
// the item-to-class assignment.
inline CompositionalDataset gen_transitive_equivalence(
    int items_per_class = 3, int num_classes = 2,
    std::vector<std::pair<int, int>> held_out = {{0, 2}, {3, 5}}, std::uint64_t seed = 0) {
    if (items_per_class < 1 || num_classes < 1)
        throw ConfigError("transitive equivalence needs positive class sizes");
    const int n = items_per_class * num_classes;
    std::vector<int> cls(n);
    for (int i = 0; i < n; ++i) cls[i] = i / items_per_class;
    if (seed != 0) {
        Rng rng(seed);
        for (int i = n - 1; i > 0; --i)
            std::swap(cls[i], cls[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    }
    std::set<std::pair<int, int>> held;
    for (auto [a, b] : held_out) {
        if (a < 0 || a >= n || b < 0 || b >= n || a == b)
            throw ConfigError("held-out pair outside the item grid");
        held.insert({a, b});
        held.insert({b, a});
    }
    CompositionalDataset ds;
    ds.name = "transitive_equivalence";
    ds.params["items_per_class"] = std::to_string(items_per_class);
    ds.params["num_classes"] = std::to_string(num_classes);
    ds.params["seed"] = std::to_string(seed);
    ds.space = make_space({n, n});
    ds.kind = TaskKind::Classification;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            Example e{{a, b}, cls[a] == cls[b] ? 1.0 : -1.0};
            (held.count({a, b}) ? ds.test : ds.train).push_back(e);
        }
    return ds;
}

// Invariance: the label depends on component 1 only; component 0's second
// value is never seen in training. Component values are -1/+1, stored as
// indices 0/1.
inline CompositionalDataset gen_invariance() {
    CompositionalDataset ds;
    ds.name = "invariance";
    ds.space = make_space({2, 2});
    ds.kind = TaskKind::Classification;
    ds.train = {{{0, 0}, 1.0}, {{0, 1}, -1.0}};
    ds.test = {{{1, 0}, 1.0}, {{1, 1}, -1.0}};
    return ds;
}

// Partial exposure: as invariance, but component 0's second value appears in
// training for one value of component 1.
inline CompositionalDataset gen_partial_exposure() {
    CompositionalDataset ds;
    ds.name = "partial_exposure";
    ds.space = make_space({2, 2});
    ds.kind = TaskKind::Classification;
    ds.train = {{{0, 0}, 1.0}, {{0, 1}, -1.0}, {{1, 0}, 1.0}};
    ds.test = {{{1, 1}, -1.0}};
    return ds;
}

enum class OrderingHeldOut { AllNonAdjacent };

// Transitive ordering: items carry a hidden linear order r(i) = i; inputs are
// ordered pairs of distinct items with target sign(r(z1) - r(z2)). Adjacent
// pairs (both orders) are trained, everything else is held out.
inline CompositionalDataset gen_transitive_ordering(
    int num_items, OrderingHeldOut policy = OrderingHeldOut::AllNonAdjacent) {
    (void)policy;
    if (num_items < 3) throw ConfigError("transitive ordering needs at least 3 items");
    CompositionalDataset ds;
    ds.name = "transitive_ordering";
    ds.params["num_items"] = std::to_string(num_items);
    ds.space = make_space({num_items, num_items});
    ds.kind = TaskKind::Classification;
    for (int a = 0; a < num_items; ++a)
        for (int b = 0; b < num_items; ++b) {
            if (a == b) continue;
            Example e{{a, b}, a > b ? 1.0 : -1.0};
            (std::abs(a - b) == 1 ? ds.train : ds.test).push_back(e);
        }
    return ds;
}

enum class LogicalOp { AND, OR, XOR };

// Logical operations over pairs of items with hidden truth values; the full
// grid (identity pairs included) minus the held-out pairs is trained.
inline CompositionalDataset gen_logical_op(LogicalOp op, const std::vector<bool>& truth,
                                           std::vector<std::pair<int, int>> held_out = {}) {
    const int n = static_cast<int>(truth.size());
    if (n < 2) throw ConfigError("logical op needs at least 2 items");
    std::set<std::pair<int, int>> held(held_out.begin(), held_out.end());
    for (auto [a, b] : held_out)
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw ConfigError("held-out pair outside the item grid");
    std::vector<bool> observed(n, false);
    CompositionalDataset ds;
    ds.name = "logical_op";
    ds.params["op"] = op == LogicalOp::AND ? "AND" : op == LogicalOp::OR ? "OR" : "XOR";
    ds.space = make_space({n, n});
    ds.kind = TaskKind::Classification;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            bool t = op == LogicalOp::AND   ? (truth[a] && truth[b])
                     : op == LogicalOp::OR  ? (truth[a] || truth[b])
                                            : (truth[a] != truth[b]);
            Example e{{a, b}, t ? 1.0 : -1.0};
            if (held.count({a, b})) {
                ds.test.push_back(e);
            } else {
                ds.train.push_back(e);
                observed[a] = observed[b] = true;
            }
        }
    for (int i = 0; i < n; ++i)
        if (!observed[i]) throw ConfigError("held-out pairs leave item " + std::to_string(i) +
                                            " unobserved in training");
    return ds;
}

}  // namespace compkit
