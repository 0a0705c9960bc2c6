#pragma once

#include "qal/parallel.hpp"
#include "qal/rational.hpp"
#include "qal/states.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace qal {

// ---------------------------------------------------------------- Modulo-4 Sum

struct Mod4Instance {
    std::vector<int> x;
};

inline void validate(const Mod4Instance& in) {
    if (in.x.size() < 2) throw std::invalid_argument("mod4: need at least 2 parties");
    int s = 0;
    for (int v : in.x) {
        if (v < 0 || v > 3) throw std::invalid_argument("mod4: inputs must be in {0,1,2,3}");
        s += v;
    }
    if (s % 2) throw std::invalid_argument("mod4: promise violated, sum of inputs is odd");
}

inline int mod4_target(const Mod4Instance& in) {
    validate(in);
    int s = 0;
    for (int v : in.x) s += v;
    return (s % 4) / 2;
}

// Calls f(instance) for every promise input with n parties
template <class F>
void for_each_promise_input(int n, F f) {
    Mod4Instance in{std::vector<int>(n, 0)};
    const int total = 1 << (2 * n);
    for (int code = 0; code < total; ++code) {
        int s = 0;
        for (int i = 0; i < n; ++i) {
            in.x[i] = (code >> (2 * (n - 1 - i))) & 3;
            s += in.x[i];
        }
        if (s % 2 == 0) f(in);
    }
}

template <class Rng>
Mod4Instance random_promise_input(int n, Rng& rng) {
    std::uniform_int_distribution<int> d(0, 3);
    Mod4Instance in{std::vector<int>(n)};
    int s = 0;
    for (int i = 0; i < n - 1; ++i) s += (in.x[i] = d(rng));
    std::uniform_int_distribution<int> h(0, 1);
    in.x[n - 1] = (s % 2) + 2 * h(rng);
    return in;
}

// Sequential protocol: prot[0] is 4-bit (bit n is the message for x1 = n);
// prot[j] is 8-bit (bit n is the message for 2 x_j + m_{j-1} = n)
struct DetProtocol {
    std::vector<unsigned> prot;
};

inline std::string bits_string(unsigned word, int width) {
    std::string s;
    for (int n = 0; n < width; ++n) s += ((word >> n) & 1) ? '1' : '0';
    return s;
}

inline unsigned parse_bits(const std::string& s) {
    unsigned w = 0;
    for (size_t n = 0; n < s.size(); ++n)
        if (s[n] == '1') w |= 1u << n;
    return w;
}

inline int seq_message(const DetProtocol& p, const std::vector<int>& x) {
    int m = (p.prot[0] >> x[0]) & 1;
    for (size_t j = 1; j < p.prot.size(); ++j) m = (p.prot[j] >> (2 * x[j] + m)) & 1;
    return m;
}

// Success count of a sequential protocol by direct simulation with maximum-likelihood decoding
inline std::int64_t seq_success_count(const DetProtocol& p, int n) {
    std::int64_t cnt[2][4][2] = {};  // [message][x_N][f]
    for_each_promise_input(n, [&](const Mod4Instance& in) {
        int m = seq_message(p, in.x);
        cnt[m][in.x[n - 1]][mod4_target(in)]++;
    });
    std::int64_t s = 0;
    for (auto& a : cnt)
        for (auto& b : a) s += std::max(b[0], b[1]);
    return s;
}

inline std::int64_t promise_input_count(int n) { return (std::int64_t(1) << (2 * n)) / 2; }

inline Rational seq_success(const DetProtocol& p, int n) {
    return Rational(seq_success_count(p, n), promise_input_count(n));
}

// Decision of the last party: maximum likelihood, ties towards 0
inline int seq_decision(const DetProtocol& p, int n, int message, int x_last) {
    std::int64_t c[2] = {0, 0};
    for_each_promise_input(n, [&](const Mod4Instance& in) {
        if (in.x[n - 1] == x_last && seq_message(p, in.x) == message) c[mod4_target(in)]++;
    });
    return c[1] > c[0] ? 1 : 0;
}

struct ClassicalOpt {
    Rational p_c;
    DetProtocol witness;
    std::size_t states_explored = 0;
};

// Raw enumeration over all 2^(8N-12) sequential protocols
inline ClassicalOpt classical_seq_raw(int n) {
    if (n < 3 || n > 4) throw std::invalid_argument("classical_seq_raw: only N = 3 or 4");
    const std::uint64_t total = std::uint64_t(1) << (8 * n - 12);
    std::int64_t best = -1;
    DetProtocol bestp;
    for (std::uint64_t code = 0; code < total; ++code) {
        DetProtocol p;
        p.prot.push_back(unsigned(code & 15));
        for (int j = 1; j < n - 1; ++j) p.prot.push_back(unsigned((code >> (4 + 8 * (j - 1))) & 255));
        std::int64_t s = seq_success_count(p, n);
        if (s > best) best = s, bestp = p;
    }
    return {Rational(best, promise_input_count(n)), bestp, std::size_t(total)};
}

namespace detail {

// counts[m][s]: prefixes with message m and partial sum s mod 4
using SeqState = std::array<std::uint16_t, 8>;

struct SeqStateHash {
    std::size_t operator()(const SeqState& s) const {
        std::uint64_t h = 1469598103934665603ull;
        for (auto v : s) h = (h ^ v) * 1099511628211ull;
        return std::size_t(h);
    }
};

inline SeqState seq_step(const SeqState& c, unsigned prot) {
    SeqState out{};
    for (int x = 0; x < 4; ++x)
        for (int m = 0; m < 2; ++m) {
            int mp = (prot >> (2 * x + m)) & 1;
            for (int s = 0; s < 4; ++s) out[4 * mp + ((s + x) & 3)] += c[4 * m + s];
        }
    return out;
}

inline SeqState seq_first(unsigned prot) {
    SeqState out{};
    for (int x = 0; x < 4; ++x) out[4 * ((prot >> x) & 1) + x] += 1;
    return out;
}

// Shift, reflection and message relabelling leave the optimum unchanged
inline SeqState seq_canonical(const SeqState& c) {
    SeqState best = c;
    for (int swap = 0; swap < 2; ++swap)
        for (int refl = 0; refl < 2; ++refl)
            for (int sh = 0; sh < 4; ++sh) {
                SeqState t{};
                for (int m = 0; m < 2; ++m)
                    for (int s = 0; s < 4; ++s) {
                        int s2 = ((refl ? (4 - s) : s) + sh) & 3;
                        t[4 * (m ^ swap) + s2] = c[4 * m + s];
                    }
                if (t < best) best = t;
            }
    return best;
}

inline std::int64_t seq_final_value(const SeqState& c) {
    std::int64_t v = 0;
    for (int m = 0; m < 2; ++m)
        v += 2 * (std::max(c[4 * m], c[4 * m + 2]) + std::max(c[4 * m + 1], c[4 * m + 3]));
    return v;
}

}  // namespace detail

// Left-to-right DP over canonical count states; the last transition is scored directly
inline ClassicalOpt classical_opt_sequential(int n) {
    using namespace detail;
    if (n < 3 || n > 7) throw std::invalid_argument("classical_opt_sequential: N must be in 3..7");
    struct Parent {
        std::uint32_t parent;
        unsigned prot;
    };
    std::vector<std::vector<SeqState>> layers(1);
    std::vector<std::vector<Parent>> parents(1);
    std::unordered_map<SeqState, std::uint32_t, SeqStateHash> index;
    for (unsigned p = 0; p < 16; ++p) {
        SeqState c = seq_canonical(seq_first(p));
        if (index.emplace(c, std::uint32_t(layers[0].size())).second) {
            layers[0].push_back(c);
            parents[0].push_back({0, p});
        }
    }
    std::size_t explored = layers[0].size();
    for (int j = 1; j < n - 2; ++j) {
        index.clear();
        std::vector<SeqState> next;
        std::vector<Parent> par;
        const auto& cur = layers.back();
        for (std::uint32_t i = 0; i < cur.size(); ++i)
            for (unsigned p = 0; p < 256; ++p) {
                SeqState c = seq_canonical(seq_step(cur[i], p));
                if (index.emplace(c, std::uint32_t(next.size())).second) {
                    next.push_back(c);
                    par.push_back({i, p});
                }
            }
        explored += next.size();
        layers.push_back(std::move(next));
        parents.push_back(std::move(par));
    }
    index.clear();

    const auto& last = layers.back();
    const int workers = worker_count();
    std::vector<std::int64_t> best_v(workers, -1);
    std::vector<std::pair<std::uint32_t, unsigned>> best_at(workers);
    std::vector<std::size_t> chunk_lo(workers + 1);
    for (int w = 0; w <= workers; ++w) chunk_lo[w] = last.size() * w / workers;
    parallel_for(std::size_t(workers), [&](std::size_t w) {
        for (std::size_t i = chunk_lo[w]; i < chunk_lo[w + 1]; ++i)
            for (unsigned p = 0; p < 256; ++p) {
                std::int64_t v = seq_final_value(seq_step(last[i], p));
                if (v > best_v[w]) best_v[w] = v, best_at[w] = {std::uint32_t(i), p};
            }
    }, workers);
    int bw = int(std::max_element(best_v.begin(), best_v.end()) - best_v.begin());

    // Rebuild an explicit protocol: replay recorded canonical transitions on actual states
    std::vector<std::uint32_t> chain(layers.size());
    chain.back() = best_at[bw].first;
    for (int j = int(layers.size()) - 1; j > 0; --j) chain[j - 1] = parents[j][chain[j]].parent;
    DetProtocol w;
    w.prot.push_back(parents[0][chain[0]].prot);
    SeqState actual = seq_first(w.prot[0]);
    for (size_t j = 1; j < layers.size(); ++j) {
        const SeqState& target = layers[j][chain[j]];
        for (unsigned p = 0; p < 256; ++p) {
            SeqState c = seq_step(actual, p);
            if (seq_canonical(c) == target) {
                w.prot.push_back(p);
                actual = c;
                break;
            }
        }
    }
    for (unsigned p = 0; p < 256; ++p)
        if (seq_final_value(seq_step(actual, p)) == best_v[bw]) {
            w.prot.push_back(p);
            break;
        }
    return {Rational(best_v[bw], promise_input_count(n)), w, explored};
}

// Broadcast: party i sends bit prot[i] >> x_i to the last party
inline std::int64_t broadcast_success_count(const std::vector<unsigned>& prot, int n) {
    std::vector<std::array<std::int64_t, 2>> cnt(std::size_t(4) << (n - 1), {0, 0});
    for_each_promise_input(n, [&](const Mod4Instance& in) {
        std::size_t key = 0;
        for (int i = 0; i < n - 1; ++i) key = (key << 1) | ((prot[i] >> in.x[i]) & 1);
        cnt[key * 4 + in.x[n - 1]][mod4_target(in)]++;
    });
    std::int64_t s = 0;
    for (auto& c : cnt) s += std::max(c[0], c[1]);
    return s;
}

inline ClassicalOpt classical_broadcast_raw(int n) {
    if (n < 3 || n > 5) throw std::invalid_argument("classical_broadcast_raw: only N = 3..5");
    const std::uint64_t total = std::uint64_t(1) << (4 * n - 4);
    std::int64_t best = -1;
    std::vector<unsigned> bestp;
    for (std::uint64_t code = 0; code < total; ++code) {
        std::vector<unsigned> p(n - 1);
        for (int i = 0; i < n - 1; ++i) p[i] = unsigned((code >> (4 * i)) & 15);
        std::int64_t s = broadcast_success_count(p, n);
        if (s > best) best = s, bestp = p;
    }
    return {Rational(best, promise_input_count(n)), {bestp}, std::size_t(total)};
}

// Value depends only on the multiset of party protocols; enumerate nondecreasing tuples
inline ClassicalOpt classical_opt_broadcast(int n) {
    if (n < 3 || n > 8) throw std::invalid_argument("classical_opt_broadcast: N must be in 3..8");
    using V4 = std::array<std::int64_t, 4>;
    std::int64_t best = -1;
    std::vector<unsigned> cur, bestp;
    std::size_t leaves = 0;
    std::function<void(const std::vector<V4>&, unsigned)> rec = [&](const std::vector<V4>& vs, unsigned from) {
        if (int(cur.size()) == n - 1) {
            ++leaves;
            std::int64_t v = 0;
            for (const auto& c : vs) v += 2 * (std::max(c[0], c[2]) + std::max(c[1], c[3]));
            if (v > best) best = v, bestp = cur;
            return;
        }
        for (unsigned p = from; p < 16; ++p) {
            std::vector<V4> next;
            next.reserve(vs.size() * 2);
            for (int b = 0; b < 2; ++b)
                for (const auto& c : vs) {
                    V4 o{0, 0, 0, 0};
                    for (int x = 0; x < 4; ++x)
                        if (int((p >> x) & 1) == b)
                            for (int s = 0; s < 4; ++s) o[(s + x) & 3] += c[s];
                    next.push_back(o);
                }
            cur.push_back(p);
            rec(next, p);
            cur.pop_back();
        }
    };
    rec({V4{1, 0, 0, 0}}, 0);
    return {Rational(best, promise_input_count(n)), {bestp}, leaves};
}

inline Rational conjecture_pc(int n) {
    if (n % 2 == 0) throw std::invalid_argument("conjecture_pc: N must be odd");
    return Rational(1, 2) + Rational(1, std::int64_t(1) << ((n + 1) / 2));
}

inline bool conjecture_check(int n, const Rational& pc) { return pc == conjecture_pc(n); }

// ---------------------------------------------------------------- quantum protocols

inline Mat phase_gate(double angle) {
    Mat u = Mat::Identity(2, 2);
    u(1, 1) = std::exp(kI * angle);
    return u;
}

inline Mat mod4_unitary(int x) { return phase_gate(kPi * x / 2.0); }

inline Mat hadamard() {
    Mat h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

inline Vec apply_1q(const Vec& psi, const Mat& u, int qubit, int n) {
    Vec out = psi;
    const int stride = 1 << (n - 1 - qubit);
    for (int i = 0; i < (1 << n); ++i)
        if (!(i & stride)) {
            cplx a = psi(i), b = psi(i | stride);
            out(i) = u(0, 0) * a + u(0, 1) * b;
            out(i | stride) = u(1, 0) * a + u(1, 1) * b;
        }
    return out;
}

struct ProtocolOutcome {
    int answer;
    double p_correct;  // exact probability the protocol outputs f(x)
};

inline Vec ghz_final_state(const Mod4Instance& in) {
    validate(in);
    const int n = int(in.x.size());
    Vec psi = ghz(n).amps;
    for (int i = 0; i < n; ++i) psi = apply_1q(psi, mod4_unitary(in.x[i]), i, n);
    for (int i = 0; i < n; ++i) psi = apply_1q(psi, hadamard(), i, n);
    return psi;
}

template <class Rng>
ProtocolOutcome quantum_ghz_protocol(const Mod4Instance& in, Rng& rng) {
    Vec psi = ghz_final_state(in);
    const int f = mod4_target(in);
    std::vector<double> probs(psi.size());
    double good = 0.0;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        probs[i] = std::norm(psi(i));
        if (__builtin_popcount(unsigned(i)) % 2 == f) good += probs[i];
    }
    std::discrete_distribution<int> pick(probs.begin(), probs.end());
    int outcome = pick(rng);
    return {__builtin_popcount(unsigned(outcome)) % 2, good};
}

inline Vec plus_state() {
    Vec v(2);
    v << 1, 1;
    return v / std::sqrt(2.0);
}

inline Vec minus_state() {
    Vec v(2);
    v << 1, -1;
    return v / std::sqrt(2.0);
}

template <class Rng>
ProtocolOutcome measure_pm(const Vec& psi, int f, Rng& rng) {
    double pp = std::norm(plus_state().dot(psi));
    std::bernoulli_distribution minus(std::clamp(1.0 - pp, 0.0, 1.0));
    int answer = minus(rng) ? 1 : 0;
    return {answer, f == 0 ? pp : 1.0 - pp};
}

inline Vec qubit_final_state(const Mod4Instance& in) {
    validate(in);
    Vec psi = plus_state();
    for (int v : in.x) psi = mod4_unitary(v) * psi;
    return psi;
}

template <class Rng>
ProtocolOutcome quantum_qubit_protocol(const Mod4Instance& in, Rng& rng) {
    return measure_pm(qubit_final_state(in), mod4_target(in), rng);
}

// Bell basis |B_zx> = (X^x Z^z (x) I)|Phi+>; correction on the receiver is X^x Z^z
inline Mat bell_pauli(int outcome) {
    int z = (outcome >> 1) & 1, x = outcome & 1;
    Mat p = Mat::Identity(2, 2);
    if (x) p = pauli('X') * p;
    if (z) p = p * pauli('Z');
    return p;
}

inline Vec bell_vector(int outcome) {
    Vec phi = Vec::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    return kron(bell_pauli(outcome), Mat::Identity(2, 2)) * phi;
}

struct TeleportHop {
    Vec received;     // receiver qubit after Bell projection, before correction
    double prob;      // outcome probability
    int bits_sent;
};

// Projects (psi (x) |Phi+>) onto Bell outcome on the first two qubits, then corrects the third
inline std::pair<Vec, TeleportHop> teleport_hop(const Vec& psi, int outcome) {
    Vec phi = Vec::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    Vec joint = kron(psi, phi);
    Vec b = bell_vector(outcome);
    Vec r = Vec::Zero(2);
    for (int ij = 0; ij < 4; ++ij)
        for (int k = 0; k < 2; ++k) r(k) += std::conj(b(ij)) * joint(2 * ij + k);
    double prob = r.squaredNorm();
    Vec received = r / std::sqrt(prob);
    Vec corrected = bell_pauli(outcome) * received;
    return {corrected, {received, prob, 2}};
}

struct TeleportRun {
    int answer;
    double p_correct;
    int classical_bits;
    std::vector<int> outcomes;
};

inline TeleportRun teleport_chain_forced(const Mod4Instance& in, const std::vector<int>& outcomes) {
    validate(in);
    const int n = int(in.x.size());
    if (int(outcomes.size()) != n - 1) throw std::invalid_argument("teleport_chain: need N-1 Bell outcomes");
    Vec psi = mod4_unitary(in.x[0]) * plus_state();
    int bits = 0;
    for (int j = 1; j < n; ++j) {
        auto [next, hop] = teleport_hop(psi, outcomes[j - 1]);
        bits += hop.bits_sent;
        psi = mod4_unitary(in.x[j]) * next;
    }
    double pp = std::norm(plus_state().dot(psi));
    int f = mod4_target(in);
    return {pp >= 0.5 ? 0 : 1, f == 0 ? pp : 1 - pp, bits, outcomes};
}

// All 4^(N-1) Bell-outcome branches
inline std::vector<TeleportRun> teleport_chain_all(const Mod4Instance& in) {
    const int n = int(in.x.size());
    std::vector<TeleportRun> runs;
    const int total = 1 << (2 * (n - 1));
    for (int code = 0; code < total; ++code) {
        std::vector<int> o(n - 1);
        for (int j = 0; j < n - 1; ++j) o[j] = (code >> (2 * j)) & 3;
        runs.push_back(teleport_chain_forced(in, o));
    }
    return runs;
}

template <class Rng>
TeleportRun teleport_chain(const Mod4Instance& in, Rng& rng, std::optional<std::vector<int>> forced = {}) {
    if (forced) return teleport_chain_forced(in, *forced);
    std::uniform_int_distribution<int> d(0, 3);
    std::vector<int> o(in.x.size() - 1);
    for (auto& v : o) v = d(rng);
    return teleport_chain_forced(in, o);
}

// ---------------------------------------------------------------- discretized field task

struct FieldTaskInstance {
    int K = 2;
    std::vector<int> k;
};

inline bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

inline void validate(const FieldTaskInstance& in) {
    if (!is_power_of_two(in.K)) throw std::invalid_argument("field task: K must be a power of two");
    if (in.k.empty()) throw std::invalid_argument("field task: need at least one party");
    long s = 0;
    for (int v : in.k) {
        if (v < 0 || v >= 2 * in.K) throw std::invalid_argument("field task: k_n must be in 0..2K-1");
        s += v;
    }
    if (s % in.K) throw std::invalid_argument("field task: promise violated, sum is not a multiple of K");
}

inline int field_task_parity(const FieldTaskInstance& in) {
    validate(in);
    long s = 0;
    for (int v : in.k) s += v;
    return int((s / in.K) % 2);
}

template <class Rng>
ProtocolOutcome field_task_quantum(const FieldTaskInstance& in, Rng& rng) {
    validate(in);
    Vec psi = plus_state();
    for (int v : in.k) psi = phase_gate(kPi * v / in.K) * psi;
    return measure_pm(psi, field_task_parity(in), rng);
}

// table[n][l][k] = message sent by party n+1 when it received l and holds k
struct FieldProtocol {
    int N = 2, K = 2, L = 2;
    std::vector<std::vector<std::vector<int>>> table;
};

// Exhaustive check that the last party can always decide the parity of m
inline bool field_protocol_perfect(const FieldProtocol& p) {
    const int q = 2 * p.K;
    std::vector<int> seen(std::size_t(p.L) * q, -1);
    std::vector<int> k(p.N, 0);
    long total = 1;
    for (int i = 0; i < p.N - 1; ++i) total *= q;
    for (long code = 0; code < total; ++code) {
        long c = code;
        int l = 0, s = 0;
        for (int n = 0; n < p.N - 1; ++n) {
            k[n] = int(c % q);
            c /= q;
            l = p.table[n][l][k[n]];
            s += k[n];
        }
        for (int kn = 0; kn < q; ++kn) {
            if ((s + kn) % p.K) continue;
            int parity = ((s + kn) / p.K) % 2;
            int& slot = seen[std::size_t(l) * q + kn];
            if (slot == -1) slot = parity;
            else if (slot != parity) return false;
        }
    }
    return true;
}

// Sends the partial sum mod 2K
inline FieldProtocol field_counting_protocol(int N, int K) {
    FieldProtocol p{N, K, 2 * K, {}};
    const int q = 2 * K;
    for (int n = 0; n < N - 1; ++n) {
        std::vector<std::vector<int>> t(q, std::vector<int>(q, 0));
        for (int l = 0; l < q; ++l)
            for (int k = 0; k < q; ++k) t[l][k] = n == 0 ? k : (l + k) % q;
        p.table.push_back(t);
    }
    return p;
}

namespace detail {

struct FieldSearcher {
    int N, K, L, q;
    std::uint32_t full;
    std::vector<std::unordered_set<std::string>> dead;  // per stage, canonical collections already refuted
    std::vector<std::vector<std::vector<int>>> tables;
    std::size_t nodes = 0;
    std::size_t node_limit;

    FieldSearcher(int n, int k, int l, std::size_t limit)
        : N(n), K(k), L(l), q(2 * k), full((1u << (2 * k)) - 1), dead(n), node_limit(limit) {}

    std::uint32_t rot(std::uint32_t s, int t) const {
        t %= q;
        return ((s << t) | (s >> (q - t))) & full;
    }
    std::uint32_t refl(std::uint32_t s) const {
        std::uint32_t r = 0;
        for (int i = 0; i < q; ++i)
            if (s >> i & 1) r |= 1u << ((q - i) % q);
        return r;
    }
    bool k_free(std::uint32_t s) const { return (s & rot(s, K)) == 0; }

    std::string canonical(std::vector<std::uint32_t> c) const {
        std::vector<std::uint32_t> best;
        for (int rf = 0; rf < 2; ++rf)
            for (int t = 0; t < q; ++t) {
                std::vector<std::uint32_t> v;
                for (auto s : c) v.push_back(rot(rf ? refl(s) : s, t));
                std::sort(v.begin(), v.end());
                if (best.empty() || v < best) best = v;
            }
        return std::string(reinterpret_cast<const char*>(best.data()), best.size() * sizeof(std::uint32_t));
    }

    // stage n: collection of partial-sum sets after n parties
    bool solve(int stage, const std::vector<std::uint32_t>& coll) {
        if (stage == N - 1) return true;
        if (++nodes > node_limit) throw std::runtime_error("field task search exceeded node budget");
        std::string key = canonical(coll);
        if (dead[stage].count(key)) return false;

        // items: distinct shifted sets, supersets first; subsets ride along with a superset
        std::vector<std::uint32_t> items;
        for (auto s : coll)
            for (int k = 0; k < q; ++k) items.push_back(rot(s, k));
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
        std::vector<std::uint32_t> maximal;
        for (auto a : items) {
            bool sub = false;
            for (auto b : items)
                if (a != b && (a & b) == a) sub = true;
            if (!sub) maximal.push_back(a);
        }
        std::sort(maximal.begin(), maximal.end(), [](auto a, auto b) {
            int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
            return pa != pb ? pa > pb : a < b;
        });
        for (auto s : maximal)
            if (!k_free(s)) {
                dead[stage].insert(key);
                return false;
            }

        std::vector<std::uint32_t> bins;
        std::unordered_set<std::string> tried;
        bool ok = pack(stage, coll, maximal, 0, bins, tried);
        if (!ok) dead[stage].insert(key);
        return ok;
    }

    bool pack(int stage, const std::vector<std::uint32_t>& coll, const std::vector<std::uint32_t>& items,
              std::size_t i, std::vector<std::uint32_t>& bins, std::unordered_set<std::string>& tried) {
        if (i == items.size()) {
            std::string key = canonical(bins);
            if (!tried.insert(key).second) return false;
            if (!solve(stage + 1, bins)) return false;
            record(stage, coll, bins);
            return true;
        }
        for (std::size_t b = 0; b < bins.size(); ++b) {
            std::uint32_t u = bins[b] | items[i];
            if (!k_free(u)) continue;
            std::uint32_t old = bins[b];
            bins[b] = u;
            if (pack(stage, coll, items, i + 1, bins, tried)) return true;
            bins[b] = old;
        }
        if (int(bins.size()) < L) {
            bins.push_back(items[i]);
            if (pack(stage, coll, items, i + 1, bins, tried)) return true;
            bins.pop_back();
        }
        return false;
    }

    void record(int stage, const std::vector<std::uint32_t>& coll, const std::vector<std::uint32_t>& bins) {
        std::vector<std::vector<int>> t(std::max<std::size_t>(coll.size(), 1), std::vector<int>(q, 0));
        for (std::size_t l = 0; l < coll.size(); ++l)
            for (int k = 0; k < q; ++k) {
                std::uint32_t s = rot(coll[l], k);
                for (std::size_t b = 0; b < bins.size(); ++b)
                    if ((bins[b] & s) == s) {
                        t[l][k] = int(b);
                        break;
                    }
            }
        if (int(tables.size()) <= stage) tables.resize(stage + 1);
        tables[stage] = t;
    }
};

}  // namespace detail

struct FieldSearchResult {
    bool exists = false;
    FieldProtocol protocol;
    std::size_t nodes = 0;
};

// Does a perfect sequential protocol with an L-state message exist?
inline FieldSearchResult field_task_search(int N, int K, int L, std::size_t node_limit = 50'000'000) {
    if (!is_power_of_two(K)) throw std::invalid_argument("field task: K must be a power of two");
    if (N < 2 || 2 * K > 16) throw std::invalid_argument("field task: unsupported size");
    detail::FieldSearcher s(N, K, L, node_limit);
    FieldSearchResult r;
    r.exists = s.solve(0, {1u});
    r.nodes = s.nodes;
    if (r.exists) {
        FieldProtocol p{N, K, L, {}};
        for (int n = 0; n < N - 1; ++n) {
            auto t = s.tables[n];
            // pad rows so that every message label 0..L-1 is a valid input
            t.resize(std::max<std::size_t>(t.size(), std::size_t(L)), std::vector<int>(2 * K, 0));
            p.table.push_back(t);
        }
        r.protocol = p;
    }
    return r;
}

struct FieldMinL {
    int min_L = 0;
    FieldProtocol witness;           // perfect protocol at min_L
    FieldProtocol counting;          // perfect protocol at L = 2K
    std::vector<std::size_t> nodes;  // search effort for each L tried
};

inline FieldMinL field_task_classical_min_L(int N, int K, std::size_t node_limit = 50'000'000) {
    FieldMinL out;
    out.counting = field_counting_protocol(N, K);
    for (int L = 1; L <= 2 * K; ++L) {
        auto r = field_task_search(N, K, L, node_limit);
        out.nodes.push_back(r.nodes);
        if (r.exists) {
            out.min_L = L;
            out.witness = r.protocol;
            return out;
        }
    }
    throw std::runtime_error("field task: no protocol found up to L = 2K");
}

inline double accuracy_budget(int N, double delta) {
    if (!(delta > 0 && delta < 1) || N < 1) throw std::invalid_argument("accuracy_budget: need 0 < delta < 1, N >= 1");
    return delta / (2.0 * N);
}

}  // namespace qal
