// Van Kampen machinery: the one-vertex-per-class presentation of an
// instance, budget-bounded distance search between words, the exact
// slit scan, and the approximate metric-group embedding report.
//
// Words are sequences of signed generators, kept freely reduced.  A
// search move replaces a subword s by t where st^-1 is a cyclic
// rotation of a relator or of its inverse (s may be empty, so
// insertion is allowed).  Distances are certified one-sidedly: a
// "proven" result carries a certificate that replays, while
// "not-found-within-budget" certifies exhaustion only at the stated
// resolution (area budget b, intermediate word-length cap L).
#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "plsq/pls.hpp"
#include "plsq/quadrangle.hpp"

namespace plsq {

// Letters are +-(code+1) where code indexes X, then Y, then Z generators.
using Word = std::vector<int>;

struct VKPresentation {
    int nx = 0, ny = 0, nz = 0;
    // relator (a, b, c) stands for the boundary word a.b.c^-1
    std::vector<std::array<int, 3>> relators;

    int gens() const { return nx + ny + nz; }
    int x_code(int i) const { return i; }
    int y_code(int j) const { return nx + j; }
    int z_code(int k) const { return nx + ny + k; }
    int class_of_code(int code) const { return code < nx ? 0 : (code < nx + ny ? 1 : 2); }
};

inline VKPresentation build_presentation(const Pls& a) {
    VKPresentation p;
    p.nx = a.dims.nx;
    p.ny = a.dims.ny;
    p.nz = a.dims.nz;
    p.relators.reserve(a.cells.size());
    for (const Cell& c : a.cells)
        p.relators.push_back({p.x_code(c.x) + 1, p.y_code(c.y) + 1, p.z_code(c.z) + 1});
    return p;
}

inline Word reduce_word(const Word& w) {
    Word out;
    for (int letter : w) {
        if (letter == 0) throw input_error("zero letter in word");
        if (!out.empty() && out.back() == -letter)
            out.pop_back();
        else
            out.push_back(letter);
    }
    return out;
}

// Word syntax: whitespace- or comma-separated letters like "x0 y3 z2'",
// where a trailing apostrophe (or ^-1) marks the inverse.
inline Word parse_word(const std::string& text, const VKPresentation& p) {
    Word w;
    std::string tok;
    auto flush = [&]() {
        if (tok.empty()) return;
        bool inv = false;
        if (tok.size() >= 1 && tok.back() == '\'') {
            inv = true;
            tok.pop_back();
        } else if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
            inv = true;
            tok.resize(tok.size() - 3);
        }
        if (tok.size() < 2) throw input_error("bad word letter: " + tok);
        char cls = tok[0];
        int idx = -1;
        try {
            idx = std::stoi(tok.substr(1));
        } catch (...) {
            throw input_error("bad word letter: " + tok);
        }
        int code = -1;
        if (cls == 'x' && idx >= 0 && idx < p.nx)
            code = p.x_code(idx);
        else if (cls == 'y' && idx >= 0 && idx < p.ny)
            code = p.y_code(idx);
        else if (cls == 'z' && idx >= 0 && idx < p.nz)
            code = p.z_code(idx);
        else
            throw input_error("word letter out of range: " + tok);
        w.push_back(inv ? -(code + 1) : code + 1);
        tok.clear();
    };
    for (char ch : text) {
        if (ch == ' ' || ch == ',' || ch == '\t') {
            flush();
        } else {
            tok.push_back(ch);
        }
    }
    flush();
    return reduce_word(w);
}

inline std::string word_to_string(const Word& w, const VKPresentation& p) {
    std::string out;
    for (int letter : w) {
        int code = std::abs(letter) - 1;
        int cls = p.class_of_code(code);
        int idx = cls == 0 ? code : (cls == 1 ? code - p.nx : code - p.nx - p.ny);
        if (!out.empty()) out.push_back(' ');
        out.push_back(cls == 0 ? 'x' : (cls == 1 ? 'y' : 'z'));
        out += std::to_string(idx);
        if (letter < 0) out.push_back('\'');
    }
    return out;
}

// Per-class exponent sums are shifted by +-(1,1,-1) under every move, so
// (sx - sy, sx + sz) is invariant.  Words with different images cannot
// bound a diagram of any area.
inline std::pair<long, long> class_signature(const Word& w, const VKPresentation& p) {
    long sx = 0, sy = 0, sz = 0;
    for (int letter : w) {
        int cls = p.class_of_code(std::abs(letter) - 1);
        int s = letter > 0 ? 1 : -1;
        (cls == 0 ? sx : cls == 1 ? sy : sz) += s;
    }
    return {sx - sy, sx + sz};
}

enum class VKStatus { exact_zero, proven, not_found_within_budget, class_separated_infinite };

inline const char* to_string(VKStatus s) {
    switch (s) {
        case VKStatus::exact_zero: return "exact-zero";
        case VKStatus::proven: return "proven";
        case VKStatus::not_found_within_budget: return "not-found-within-budget";
        case VKStatus::class_separated_infinite: return "class-separated-infinite";
    }
    return "?";
}

struct CertStep {
    int relator = -1;  // index into VKPresentation::relators
    Word after;        // freely reduced word after the application
};

struct DistanceResult {
    VKStatus status = VKStatus::not_found_within_budget;
    u64 area = 0;  // meaningful for proven (and 0 for exact-zero)
    Word w1, w2;   // reduced inputs
    std::vector<CertStep> certificate;
    u64 budget = 0;   // area budget b the search ran with
    int length_cap = 0;
    std::string note;
};

namespace detail {

struct RelatorVariant {
    int relator;
    std::array<int, 3> word;  // cyclic rotation of the relator word or its inverse
};

inline std::vector<RelatorVariant> relator_variants(const VKPresentation& p) {
    std::vector<RelatorVariant> out;
    out.reserve(p.relators.size() * 6);
    for (std::size_t i = 0; i < p.relators.size(); ++i) {
        const auto& [a, b, c] = p.relators[i];
        std::array<int, 3> base{a, b, -c};
        std::array<int, 3> inv{c, -b, -a};
        for (int rot = 0; rot < 3; ++rot) {
            out.push_back({int(i), {base[rot % 3], base[(rot + 1) % 3], base[(rot + 2) % 3]}});
            out.push_back({int(i), {inv[rot % 3], inv[(rot + 1) % 3], inv[(rot + 2) % 3]}});
        }
    }
    return out;
}

inline std::string word_key(const Word& w) {
    std::string k;
    k.reserve(w.size());
    for (int letter : w) k.push_back(char(letter + 80));
    return k;
}

// Variants indexed by first and last letter.  A move that keeps the word
// within the cap either matches the variant's prefix at the position
// (split >= 1) or is an insertion; an insertion that must shrink to fit
// cancels at a seam, which pins the variant's first or last letter, so
// unindexed insertions only matter while |w|+3 fits the cap.
struct MoveIndex {
    std::vector<RelatorVariant> variants;
    std::unordered_map<int, std::vector<int>> by_first, by_last;
};

inline MoveIndex build_move_index(const VKPresentation& p) {
    MoveIndex idx;
    idx.variants = relator_variants(p);
    for (std::size_t i = 0; i < idx.variants.size(); ++i) {
        idx.by_first[idx.variants[i].word[0]].push_back(int(i));
        idx.by_last[idx.variants[i].word[2]].push_back(int(i));
    }
    return idx;
}

// Applies "replace s by t" at position i, where variant = s.t^-1 and
// |s| = split.  Returns the freely reduced result.
inline Word splice(const Word& w, std::size_t i, const RelatorVariant& v, int split) {
    Word out;
    out.reserve(w.size() + 3);
    out.insert(out.end(), w.begin(), w.begin() + long(i));
    for (int j = 2; j >= split; --j) out.push_back(-v.word[std::size_t(j)]);
    out.insert(out.end(), w.begin() + long(i) + split, w.end());
    return reduce_word(out);
}

inline bool splice_matches(const Word& w, std::size_t i, const RelatorVariant& v, int split) {
    if (i + std::size_t(split) > w.size()) return false;
    for (int j = 0; j < split; ++j)
        if (w[i + std::size_t(j)] != v.word[std::size_t(j)]) return false;
    return true;
}

template <class Fn>
inline void for_each_move(const Word& w, const MoveIndex& idx, int cap, Fn&& fn) {
    auto try_one = [&](std::size_t i, const RelatorVariant& v, int split) {
        if (!splice_matches(w, i, v, split)) return;
        Word nw = splice(w, i, v, split);
        if (int(nw.size()) > cap) return;
        fn(v.relator, std::move(nw));
    };
    bool insert_all = int(w.size()) + 3 <= cap;
    for (std::size_t i = 0; i <= w.size(); ++i) {
        if (i < w.size()) {
            auto it = idx.by_first.find(w[i]);
            if (it != idx.by_first.end())
                for (int vi : it->second) {
                    const RelatorVariant& v = idx.variants[std::size_t(vi)];
                    for (int split = 1; split <= 3; ++split) try_one(i, v, split);
                    if (!insert_all) try_one(i, v, 0);
                }
        }
        if (insert_all) {
            for (const RelatorVariant& v : idx.variants) try_one(i, v, 0);
        } else if (i > 0) {
            auto it = idx.by_last.find(w[i - 1]);
            if (it != idx.by_last.end())
                for (int vi : it->second) try_one(i, idx.variants[std::size_t(vi)], 0);
        }
    }
}

struct Ball {
    std::vector<Word> words;
    std::vector<int> parent;
    std::vector<int> via_relator;
    std::vector<u64> area;
    std::unordered_map<std::string, int> index;

    int add(const Word& w, int par, int rel, u64 a) {
        auto [it, fresh] = index.try_emplace(word_key(w), int(words.size()));
        if (!fresh) return -1;
        words.push_back(w);
        parent.push_back(par);
        via_relator.push_back(rel);
        area.push_back(a);
        return it->second;
    }

    // area of w inside the ball, or -1 when absent
    long long area_of(const Word& w) const {
        auto it = index.find(word_key(w));
        return it == index.end() ? -1 : (long long)(area[std::size_t(it->second)]);
    }
};

// All words reachable from root within the given number of moves, keeping
// every intermediate word at or below the length cap.
inline Ball grow_ball(const MoveIndex& idx, const Word& root, u64 radius, int cap, u64& states,
                      u64 max_states) {
    Ball b;
    b.add(root, -1, -1, 0);
    std::deque<int> frontier{0};
    for (u64 level = 0; level < radius && !frontier.empty(); ++level) {
        std::deque<int> next;
        while (!frontier.empty()) {
            int at = frontier.front();
            frontier.pop_front();
            Word w = b.words[std::size_t(at)];
            for_each_move(w, idx, cap, [&](int rel, Word&& nw) {
                int fresh = b.add(nw, at, rel, level + 1);
                if (fresh < 0) return;
                if (++states > max_states)
                    throw resource_error("word-ball growth exceeded state budget");
                next.push_back(fresh);
            });
        }
        frontier = std::move(next);
    }
    return b;
}

}  // namespace detail

// Checks that each step applies the named relator legally (some position,
// rotation, inversion, and split) and that the chain links w1 to w2.
inline bool replay_certificate(const VKPresentation& p, const Word& w1, const Word& w2,
                               const std::vector<CertStep>& steps) {
    auto variants = detail::relator_variants(p);
    Word cur = reduce_word(w1);
    for (const CertStep& step : steps) {
        if (step.relator < 0 || step.relator >= int(p.relators.size())) return false;
        bool legal = false;
        for (const auto& v : variants) {
            if (v.relator != step.relator) continue;
            for (std::size_t i = 0; i <= cur.size() && !legal; ++i)
                for (int split = 0; split <= 3 && !legal; ++split)
                    if (detail::splice_matches(cur, i, v, split) &&
                        detail::splice(cur, i, v, split) == step.after)
                        legal = true;
            if (legal) break;
        }
        if (!legal) return false;
        cur = step.after;
    }
    return cur == reduce_word(w2);
}

// Bidirectional search for a van Kampen diagram with boundary w1.w2^-1 of
// area at most b, over freely reduced words no longer than the cap.  The
// default cap is |w1|+|w2|+3b (each move grows a word by at most 3).  A
// proven area is the exact minimum among diagrams whose intermediate words
// fit the cap; minimal-area proofs may in principle need longer words, so
// it remains an upper bound on the unrestricted distance and results carry
// the resolution they were certified at.
inline DistanceResult vk_distance(const VKPresentation& p, const Word& w1_in, const Word& w2_in,
                                  u64 b, int length_cap = -1, u64 max_states = 50'000'000) {
    Word w1 = reduce_word(w1_in);
    Word w2 = reduce_word(w2_in);
    for (const Word* w : {&w1, &w2})
        for (int letter : *w)
            if (std::abs(letter) - 1 >= p.gens()) throw input_error("word letter outside presentation");
    if (length_cap < 0) length_cap = int(w1.size() + w2.size() + 3 * b);
    DistanceResult res;
    res.w1 = w1;
    res.w2 = w2;
    res.budget = b;
    res.length_cap = length_cap;
    if (length_cap < int(std::max(w1.size(), w2.size())))
        throw input_error("length cap below an input word's length");
    if (length_cap < 3 && b > 0)
        throw input_error("length cap below relator growth");

    if (w1 == w2) {
        res.status = VKStatus::exact_zero;
        res.note = "identical reduced words";
        return res;
    }
    if (class_signature(w1, p) != class_signature(w2, p)) {
        res.status = VKStatus::class_separated_infinite;
        res.note = "class-signature images differ; no diagram of any area exists";
        return res;
    }
    if (b == 0) {
        res.status = VKStatus::not_found_within_budget;
        res.note = "distinct reduced words and zero area budget";
        return res;
    }

    detail::MoveIndex midx = detail::build_move_index(p);
    detail::Ball balls[2];
    balls[0].add(w1, -1, -1, 0);
    balls[1].add(w2, -1, -1, 0);
    std::deque<int> frontier[2];
    frontier[0].push_back(0);
    frontier[1].push_back(0);
    u64 depth[2] = {0, 0};
    u64 states = 2;

    int meet[2] = {-1, -1};
    u64 best_total = b + 1;

    auto expand_level = [&](int side) {
        std::deque<int> next;
        u64 level = depth[side];
        while (!frontier[side].empty()) {
            int at = frontier[side].front();
            frontier[side].pop_front();
            Word w = balls[side].words[std::size_t(at)];
            detail::for_each_move(w, midx, length_cap, [&](int rel, Word&& nw) {
                int fresh = balls[side].add(nw, at, rel, level + 1);
                if (fresh < 0) return;
                if (++states > max_states)
                    throw resource_error("van Kampen search exceeded state budget");
                next.push_back(fresh);
                auto hit = balls[1 - side].index.find(detail::word_key(nw));
                if (hit != balls[1 - side].index.end()) {
                    u64 total = level + 1 + balls[1 - side].area[std::size_t(hit->second)];
                    if (total <= b && total < best_total) {
                        best_total = total;
                        meet[side] = fresh;
                        meet[1 - side] = hit->second;
                    }
                }
            });
        }
        frontier[side] = std::move(next);
        depth[side] = level + 1;
    };

    // Expanding until the level depths sum to min(b, best found total) makes
    // the reported area the exact minimum over diagrams whose intermediate
    // words fit the cap: a smaller diagram would have met across the final
    // depths already.
    while (true) {
        u64 reachable = depth[0] + depth[1];
        if (reachable >= b || reachable >= best_total) break;
        int side = (frontier[0].empty() && frontier[1].empty()) ? -1
                   : frontier[1].empty()                        ? 0
                   : frontier[0].empty()                        ? 1
                   : (frontier[0].size() <= frontier[1].size() ? 0 : 1);
        if (side < 0) break;
        expand_level(side);
    }

    if (best_total <= b) {
        res.status = VKStatus::proven;
        res.area = best_total;
        std::vector<CertStep> forward;
        for (int at = meet[0]; balls[0].parent[std::size_t(at)] >= 0;
             at = balls[0].parent[std::size_t(at)])
            forward.push_back({balls[0].via_relator[std::size_t(at)], balls[0].words[std::size_t(at)]});
        std::reverse(forward.begin(), forward.end());
        res.certificate = std::move(forward);
        for (int at = meet[1]; balls[1].parent[std::size_t(at)] >= 0;
             at = balls[1].parent[std::size_t(at)]) {
            int par = balls[1].parent[std::size_t(at)];
            res.certificate.push_back(
                {balls[1].via_relator[std::size_t(at)], balls[1].words[std::size_t(par)]});
        }
        if (!replay_certificate(p, w1, w2, res.certificate))
            throw verify_error("internal: distance certificate failed to replay");
        return res;
    }
    res.status = VKStatus::not_found_within_budget;
    if (frontier[0].empty() && frontier[1].empty() && depth[0] + depth[1] < b)
        res.note = "reachable word set exhausted below the cap; no diagram exists at this length cap";
    else
        res.note = "no diagram found at resolution (area " + std::to_string(b) + ", cap " +
                   std::to_string(length_cap) + ")";
    return res;
}

inline nlohmann::json distance_result_to_json(const DistanceResult& r, const VKPresentation& p) {
    nlohmann::json steps = nlohmann::json::array();
    for (const CertStep& s : r.certificate)
        steps.push_back({{"relator", s.relator}, {"after", word_to_string(s.after, p)}});
    nlohmann::json out{{"status", to_string(r.status)},
                       {"w1", word_to_string(r.w1, p)},
                       {"w2", word_to_string(r.w2, p)},
                       {"budget", r.budget},
                       {"length_cap", r.length_cap},
                       {"certificate", steps}};
    if (r.status == VKStatus::proven) out["area"] = r.area;
    if (!r.note.empty()) out["note"] = r.note;
    return out;
}

// One slit configuration: a label prefix completed by two distinct labels,
// with one witness rectangle for each.
struct SlitEntry {
    int d = -1, dprime = -1;
    std::array<Cell, 4> first, second;

    std::vector<Cell> cells() const {
        std::vector<Cell> out(first.begin(), first.end());
        out.insert(out.end(), second.begin(), second.end());
        return out;
    }
};

// Exact enumeration: groups full rectangles by their (a, b, c) label prefix
// and reports every unordered pair of distinct completions.  Empty exactly
// when the label quadrangle condition holds.
inline std::vector<SlitEntry> slit_scan(const Pls& a) {
    auto completions = detail::build_completions(a);
    std::vector<std::pair<u64, const std::vector<std::pair<int, std::array<Cell, 4>>>*>> slots;
    slots.reserve(completions.map.size());
    for (const auto& [key, slot] : completions.map) slots.emplace_back(key, &slot);
    std::sort(slots.begin(), slots.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    std::vector<SlitEntry> out;
    for (const auto& [key, slot] : slots) {
        (void)key;
        for (std::size_t i = 0; i < slot->size(); ++i)
            for (std::size_t j = i + 1; j < slot->size(); ++j) {
                SlitEntry e;
                e.d = (*slot)[i].first;
                e.dprime = (*slot)[j].first;
                e.first = (*slot)[i].second;
                e.second = (*slot)[j].second;
                out.push_back(e);
            }
    }
    return out;
}

struct EmbeddingReport {
    u64 b = 0;
    int length_cap = 0;
    bool certified = false;
    // status/area per unordered same-class generator pair
    struct SeparationEntry {
        int cls;  // 0 = X, 1 = Y, 2 = Z
        int i, j;
        VKStatus status;
        u64 area = 0;
        std::vector<CertStep> certificate;
    };
    std::vector<SeparationEntry> separation;
    std::vector<DistanceResult> triple_certs;
    std::string caveat;
};

// Emits the tautological embedding of an instance into the free group on
// its generators with 1/b times the diagram-area metric: every triple is
// an area-1 relation, and the separation matrix reports the distance
// search between same-class generators.  Certification means no pair came
// back with a proof of area < b at this resolution.
inline EmbeddingReport emit_embedding(const Pls& a, u64 b, int length_cap = -1) {
    if (b == 0) throw input_error("embedding scale needs a positive area budget");
    VKPresentation p = build_presentation(a);
    EmbeddingReport rep;
    rep.b = b;
    rep.length_cap = length_cap < 0 ? int(2 + 3 * b) : length_cap;
    rep.caveat =
        "separation certified at resolution (area " + std::to_string(b) + ", cap " +
        std::to_string(rep.length_cap) + "); longer intermediate words are not searched";

    for (std::size_t t = 0; t < a.cells.size(); ++t) {
        const Cell& c = a.cells[t];
        Word xy{p.x_code(c.x) + 1, p.y_code(c.y) + 1};
        Word z{p.z_code(c.z) + 1};
        DistanceResult r = vk_distance(p, xy, z, 1, int(xy.size() + z.size() + 3));
        if (r.status != VKStatus::proven || r.area != 1)
            throw verify_error("triple relation did not certify at area 1");
        rep.triple_certs.push_back(std::move(r));
    }

    rep.certified = true;
    auto scan_class = [&](int cls, int count, auto code_of) {
        for (int i = 0; i < count; ++i)
            for (int j = i + 1; j < count; ++j) {
                Word u{code_of(i) + 1}, v{code_of(j) + 1};
                DistanceResult r = vk_distance(p, u, v, b, rep.length_cap);
                EmbeddingReport::SeparationEntry e{cls, i, j, r.status, r.area, r.certificate};
                if (r.status == VKStatus::proven && r.area < b) rep.certified = false;
                rep.separation.push_back(std::move(e));
            }
    };
    scan_class(0, p.nx, [&](int i) { return p.x_code(i); });
    scan_class(1, p.ny, [&](int i) { return p.y_code(i); });
    scan_class(2, p.nz, [&](int i) { return p.z_code(i); });
    return rep;
}

inline nlohmann::json embedding_report_to_json(const EmbeddingReport& rep, const Pls& a) {
    VKPresentation p = build_presentation(a);
    nlohmann::json sep = nlohmann::json::array();
    const char* cls_names[3] = {"x", "y", "z"};
    for (const auto& e : rep.separation) {
        nlohmann::json row{{"class", cls_names[e.cls]},
                           {"i", e.i},
                           {"j", e.j},
                           {"status", to_string(e.status)}};
        if (e.status == VKStatus::proven) {
            row["area"] = e.area;
            row["scaled_distance"] = double(e.area) / double(rep.b);
            nlohmann::json steps = nlohmann::json::array();
            for (const CertStep& s : e.certificate)
                steps.push_back({{"relator", s.relator}, {"after", word_to_string(s.after, p)}});
            row["certificate"] = steps;
        }
        sep.push_back(row);
    }
    nlohmann::json triples = nlohmann::json::array();
    for (const auto& r : rep.triple_certs)
        triples.push_back({{"w1", word_to_string(r.w1, p)},
                           {"w2", word_to_string(r.w2, p)},
                           {"area", r.area}});
    return nlohmann::json{{"generators", {{"x", p.nx}, {"y", p.ny}, {"z", p.nz}}},
                          {"scale", 1.0 / double(rep.b)},
                          {"resolution", {{"area_budget", rep.b}, {"length_cap", rep.length_cap}}},
                          {"certified_1_separated", rep.certified},
                          {"separation", sep},
                          {"triple_relations", triples},
                          {"caveat", rep.caveat}};
}

}  // namespace plsq
