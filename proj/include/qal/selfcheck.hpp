#pragma once

#include "qal/cloning.hpp"
#include "qal/commcx.hpp"
#include "qal/entanglement.hpp"
#include "qal/feasibility.hpp"
#include "qal/nonlocality.hpp"
#include "qal/rac.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <sstream>

namespace qal {

// Printed reference values
namespace reference {
inline const std::vector<std::pair<int, double>> sequential_pc = {{3, 0.75}, {4, 0.75}, {5, 0.625}, {6, 0.625}};
inline const std::vector<std::pair<int, double>> broadcast_pc = {
    {3, 0.75}, {4, 0.75}, {5, 0.625}, {6, 0.625}, {7, 0.5625}};
inline const double mu_min[] = {0.794, 0.841, 0.758, 0.794, 0.743};   // N = 3..7
inline const double eta_min[] = {0.791, 0.841, 0.758, 0.794, 0.743};  // N = 3..7
inline const double qubitcomm_eta = 0.33;
}  // namespace reference

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
    double seconds = 0.0;
};

struct SelfcheckOptions {
    double table_perturbation = 0.0;  // added to the stored sequential table before comparison
    bool three_qubit = false;
    std::uint64_t seed = 42;
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct Checker {
    std::vector<CheckResult> results;
    void run(const std::string& name, const std::function<std::string(bool&)>& body) {
        auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        std::string detail;
        try {
            detail = body(ok);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back({name, ok, detail, s});
    }
};

inline void need(bool& ok, bool cond) { ok = ok && cond; }

}  // namespace detail

inline std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& opt = {}) {
    using detail::need;
    detail::Checker c;
    std::mt19937_64 rng(opt.seed);

    c.run("qmath.eigen_reconstruction", [&](bool& ok) {
        double worst = 0;
        for (int i = 0; i < 200; ++i) {
            Mat a = Mat::Random(4, 4);
            a = 0.5 * (a + a.adjoint()).eval();
            auto e = herm_eig(a);
            Mat r = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
            worst = std::max(worst, (r - a).cwiseAbs().maxCoeff());
        }
        need(ok, worst <= 1e-9);
        return "max error " + detail::fmt(worst);
    });
    c.run("qmath.klein_inequality", [&](bool& ok) {
        double lo = 1.0;
        for (int i = 0; i < 1000; ++i) {
            auto d = relative_entropy(random_density({2, 2}, rng), random_density({2, 2}, rng));
            if (!d.infinite) lo = std::min(lo, d.value);
        }
        need(ok, lo >= 0.0);
        return "min D " + detail::fmt(lo);
    });
    c.run("qmath.entropy_additive", [&](bool& ok) {
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            auto a = random_density({2}, rng), b = random_density({2}, rng);
            worst = std::max(worst, std::abs(vn_entropy(tensor(a, b)) - vn_entropy(a) - vn_entropy(b)));
        }
        need(ok, worst <= 1e-9);
        return "max deviation " + detail::fmt(worst);
    });
    c.run("states.ansatz", [&](bool& ok) {
        need(ok, SeparableAnsatz::num_params(2, 4) == 19 && SeparableAnsatz::num_params(3, 64) == 447);
        std::uniform_real_distribution<double> u(0, 2 * kPi);
        double lo = 1.0;
        for (int i = 0; i < 100; ++i) {
            SeparableAnsatz a(2, 4);
            for (auto& p : a.params) p = u(rng);
            lo = std::min(lo, min_eig(partial_transpose(ansatz_to_density(a), 0)));
        }
        need(ok, lo >= -1e-9);
        return "min PT eigenvalue " + detail::fmt(lo);
    });
    c.run("nonlocality.chsh", [&](bool& ok) {
        double s = chsh_value(bell_phi_minus(), optimal_chsh_settings());
        double p = chsh_prob_form(bell_phi_minus(), optimal_chsh_settings());
        need(ok, std::abs(s - 2 * std::sqrt(2.0)) < 1e-9);
        need(ok, std::abs(p - 4 * std::pow(std::cos(kPi / 8), 2)) < 1e-9);
        return "S " + detail::fmt(s) + ", prob form " + detail::fmt(p);
    });
    c.run("nonlocality.hardy", [&](bool& ok) {
        double p = hardy_maximize().p_cc;
        need(ok, std::abs(p - std::pow(golden_ratio(), -5)) < 1e-6);
        return "P(c,c) " + detail::fmt(p);
    });
    c.run("nonlocality.contextuality", [&](bool& ok) {
        auto m = mermin_square();
        auto pr = peres_contradiction();
        need(ok, !m.assignment_exists && m.assignments_checked == 512);
        for (double v : pr.eigen_constraints) need(ok, v == -1.0);
        need(ok, std::abs(pr.direct_ab + 1.0) < 1e-12 && pr.factored_ab == 1.0);
        return "mermin assignments " + std::to_string(m.assignments_checked);
    });
    c.run("rac.quantum_and_classical", [&](bool& ok) {
        const double cube = 0.5 + std::sqrt(3.0) / 6;
        need(ok, std::abs(qrac_success(qrac_2x1()).average - std::pow(std::cos(kPi / 8), 2)) < 1e-9);
        need(ok, std::abs(qrac_success(qrac_3x1()).average - cube) < 1e-9);
        need(ok, std::abs(qrac_success(qutrit_code_build().code).average - cube) < 1e-9);
        need(ok, classical_rac_optimal(2).p_c == Rational(3, 4) && classical_rac_optimal(3).p_c == Rational(3, 4));
        return "m=2,3 classical 3/4";
    });
    c.run("rac.invariant_information", [&](bool& ok) {
        auto m = mub(2);
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            auto r = random_density({2}, rng, 1 + i % 2);
            worst = std::max(worst, std::abs(invariant_info(r, m) - (purity(r) - 0.5)));
        }
        need(ok, worst <= 1e-10);
        need(ok, std::abs(mub_equipartition_bound(2, 2) - (0.5 + std::sqrt(2.0) / 4)) < 1e-12);
        return "max deviation " + detail::fmt(worst);
    });
    c.run("commcx.sequential_table", [&](bool& ok) {
        std::string d;
        for (auto [n, printed] : reference::sequential_pc) {
            Rational pc = classical_opt_sequential(n).p_c;
            double stored = printed + opt.table_perturbation;
            bool match = std::abs(to_double(pc) - stored) < 1e-12;
            need(ok, match);
            d += "N=" + std::to_string(n) + " " + to_string(pc) + (match ? "" : " MISMATCH") + "; ";
        }
        return d;
    });
    c.run("commcx.broadcast_table", [&](bool& ok) {
        std::string d;
        for (auto [n, printed] : reference::broadcast_pc) {
            Rational pc = classical_opt_broadcast(n).p_c;
            need(ok, std::abs(to_double(pc) - printed) < 1e-12);
            need(ok, pc == broadcast_pc(n));
            if (n % 2) need(ok, conjecture_check(n, pc));
            d += "N=" + std::to_string(n) + " " + to_string(pc) + "; ";
        }
        return d;
    });
    c.run("commcx.dp_vs_raw", [&](bool& ok) {
        need(ok, classical_opt_sequential(3).p_c == classical_seq_raw(3).p_c);
        need(ok, classical_opt_broadcast(3).p_c == classical_broadcast_raw(3).p_c);
        return std::string("N=3 agree");
    });
    c.run("commcx.quantum_protocols", [&](bool& ok) {
        long fails = 0, inputs = 0;
        for (int n = 3; n <= 5; ++n)
            for_each_promise_input(n, [&](const Mod4Instance& in) {
                int f = mod4_target(in);
                ++inputs;
                if (quantum_ghz_protocol(in, rng).answer != f || quantum_qubit_protocol(in, rng).answer != f)
                    ++fails;
                for (const auto& r : teleport_chain_all(in))
                    if (r.answer != f || std::abs(r.p_correct - 1.0) > 1e-12) ++fails;
            });
        need(ok, fails == 0);
        return std::to_string(inputs) + " inputs, " + std::to_string(fails) + " failures";
    });
    c.run("commcx.field_task", [&](bool& ok) {
        for (int n = 2; n <= 4; ++n)
            for (int k : {2, 4}) need(ok, field_protocol_perfect(field_counting_protocol(n, k)));
        need(ok, field_task_classical_min_L(3, 2).min_L == 4);
        return std::string("counting protocols perfect");
    });
    c.run("feasibility.boundaries", [&](bool& ok) {
        need(ok, std::abs(*mu_boundary(margin_fn("qrac-ent"), 1.0) - std::pow(2.0, -0.25)) < 1e-9);
        need(ok, std::abs(*eta_boundary(margin_fn("qrac-ent"), 1.0) - 2 * (std::sqrt(2.0) - 1)) < 1e-9);
        need(ok, std::abs(*eta_boundary(margin_fn("qrac-qubit"), 1.0) - std::sqrt(2.0) / 2) < 1e-9);
        for (int n = 3; n <= 7; ++n) {
            auto f = margin_fn("multi-ent", n);
            need(ok, std::abs(*mu_boundary(f, 1.0) - multi_ent_mu_min_closed(n)) < 1e-9);
            need(ok, std::abs(*mu_boundary(f, 1.0) - reference::mu_min[n - 3]) < 1e-3);
            need(ok, std::abs(*eta_boundary(f, 1.0) - reference::eta_min[n - 3]) < 1e-3);
            for (int i = 0; i < 100; ++i) {
                double eta = 0.80 + 0.2 * (i + 0.5) / 100;
                if (auto mu = mu_boundary(f, eta)) need(ok, std::abs(*mu - multi_ent_mu_closed(n, eta)) < 1e-9);
            }
        }
        return std::string("closed forms within 1e-9");
    });
    c.run("feasibility.nesting", [&](bool& ok) {
        auto r3 = region_scan(margin_fn("multi-ent", 3), 101), r5 = region_scan(margin_fn("multi-ent", 5), 101),
             r7 = region_scan(margin_fn("multi-ent", 7), 101);
        for (size_t i = 0; i < r3.cells.size(); ++i) {
            if (r3.cells[i].beats) need(ok, r5.cells[i].beats);
            if (r5.cells[i].beats) need(ok, r7.cells[i].beats);
        }
        return std::string("N=3 within 5 within 7");
    });
    c.run("cloning.formulas", [&](bool& ok) {
        double worst = 0;
        for (int d = 2; d <= 16; ++d)
            for (int n = 1; n < 64; ++n)
                for (int m = n + 1; m <= 64; ++m) {
                    auto b = fidelity_balance(n, m, d);
                    worst = std::max(worst, std::abs(b.iq_before - b.iq_after));
                    if (m < 64) need(ok, uqcm_fidelity(n, m, d) > uqcm_fidelity(n, m + 1, d));
                }
        need(ok, worst <= 1e-12);
        auto s = task_scores(2, 2);
        need(ok, s.f_cloning == Rational(5, 6) && s.f_estimate == Rational(2, 3) && s.f_single == Rational(3, 4));
        return "balance max deviation " + detail::fmt(worst);
    });
    c.run("cloning.chapter6", [&](bool& ok) {
        auto p = chapter6_pipeline();
        need(ok, p.h_orthonormal && p.s1_orthogonal && p.s2_orthogonal && p.outputs_identify_sets);
        need(ok, p.feasibility.feasible && p.p1 == Rational(11, 16));
        need(ok, std::abs(p.p2 - 0.7320) < 1e-3);
        auto u = unambig_disc_max(p.f0_states);
        auto a = prob_clone_search(p.f0_states, CloneObjective::Average);
        need(ok, u.value <= 1.0 / 3 + 1e-4 && u.value <= a.value + 1e-9);
        return "p2 " + detail::fmt(p.p2) + ", unambiguous " + detail::fmt(u.value);
    });
    c.run("entanglement.ree_two_qubit", [&](bool& ok) {
        need(ok, std::abs(ree(bell_phi_minus()).value - 1.0) < 2e-3);
        double worst = 0;
        for (int i = 0; i < 5; ++i) {
            auto psi = random_ket({2, 2}, rng);
            worst = std::max(worst, std::abs(ree(psi).value - vn_entropy(partial_trace(psi, {0}))));
            auto u = local_unitary({random_unitary(2, rng), random_unitary(2, rng)});
            worst = std::max(worst, std::abs(ree(conjugate(projector(bell_phi_minus()), u)).value - 1.0));
        }
        need(ok, worst <= 3e-3);
        ReeOptions o;
        o.restarts = 2;
        std::uniform_real_distribution<double> ang(0, 2 * kPi);
        for (int i = 0; i < 10; ++i) {
            SeparableAnsatz a(2, 4);
            for (auto& p : a.params) p = ang(rng);
            need(ok, ree(ansatz_to_density(a), o).value < 1e-3);
        }
        return "max drift " + detail::fmt(worst);
    });
    if (opt.three_qubit)
        c.run("entanglement.ree_three_qubit", [&](bool& ok) {
            double w = ree_w3(), g = ree(ghz(3)).value;
            need(ok, std::abs(w - 1.1699) < 5e-3 && std::abs(g - 1.0) < 5e-3 && w > g);
            return "E(W) " + detail::fmt(w) + ", E(GHZ) " + detail::fmt(g);
        });
    return c.results;
}

}  // namespace qal
