// SPDX-License-Identifier: Apache-2.0
//
// Robust MSE-minimizing downlink precoding: per-satellite closed-form block
// updates, dual power-budget tracking, and sum-rate evaluation.

#pragma once

#include "satmimo/channel.hpp"
#include "satmimo/types.hpp"

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace satmimo {

/// ML x K precoder with per-satellite M x K row blocks.
template <typename T>
struct PrecodingMatrix {
    ComplexMatrix<T> v;
    int block_size = 1;  // M

    int num_blocks() const { return static_cast<int>(v.rows()) / block_size; }
    auto block(int l) { return v.middleRows(l * block_size, block_size); }
    auto block(int l) const { return v.middleRows(l * block_size, block_size); }
    /// tr(V_l V_l^H)
    T block_power(int l) const { return block(l).squaredNorm(); }
    RealVector<T> block_powers() const {
        RealVector<T> p(num_blocks());
        for (int l = 0; l < num_blocks(); ++l) p(l) = block_power(l);
        return p;
    }
};

template <typename T>
struct PowerBudget {
    RealVector<T> per_satellite;

    static PowerBudget uniform(int num_sats, T budget) {
        return {RealVector<T>::Constant(num_sats, budget)};
    }
};

/// Lagrange multipliers of the per-satellite power constraints plus the
/// shared step/decay factor.
template <typename T>
struct DualState {
    RealVector<T> lambda;
    T alpha = static_cast<T>(0.9);
};

template <typename T>
struct SolveReport {
    int iterations = 0;
    std::vector<T> rate_trajectory;  // one entry per iteration
    bool converged = false;
    RealVector<T> block_powers;
};

struct SolveOptions {
    int max_iterations = 100;
    double rate_tolerance = 0.01;    // stop when |Rate(i) - Rate(i-1)| < tol * Rate(i)
    double alpha = 0.9;
    double initial_lambda = 1.0;
    double power_tolerance = 0.01;   // accepted per-block overshoot at termination
};

template <typename T>
using RateEvaluator = std::function<T(const ComplexMatrix<T>&)>;

/// Expected squared symbol error E||y - s||^2 of the downlink y = G^H V s + n
/// under the delayed estimate g_hat and the error moments in `stats`:
///   tr(V^H Ghat Ghat^H V) + tr(V^H E{Gt Gt^H} V) - 2 Re tr(V^H E{Gt} Ghat^H V)
///   - 2 Re tr(V^H (Ghat - E{Gt})) + K (sigma^2 + 1).
template <typename T>
T mse_objective(const ComplexMatrix<T>& v, const ComplexMatrix<T>& g_hat,
                const UncertaintyStats<T>& stats, T noise_power, int num_users) {
    if (v.rows() != g_hat.rows() || v.cols() != g_hat.cols())
        throw std::invalid_argument("mse_objective: precoder and channel dimensions differ");
    if (stats.mean.rows() != v.rows() || stats.mean.cols() != v.cols() ||
        stats.second_moment.rows() != v.rows())
        throw std::invalid_argument("mse_objective: stats dimensions differ from precoder");

    const ComplexMatrix<T> gv = g_hat.adjoint() * v;  // K x K
    T value = gv.squaredNorm();
    value += (v.adjoint() * stats.second_moment * v).trace().real();
    value -= T(2) * (v.adjoint() * stats.mean * gv).trace().real();
    value -= T(2) * gv.trace().real();
    value += T(2) * (v.adjoint() * stats.mean).trace().real();
    value += static_cast<T>(num_users) * (noise_power + T(1));
    return value;
}

/// Coupling matrix of satellite l:
///   A_l = sum_i [Ghat_l Ghat_i^H + E{Gt_l Gt_i^H} - E{Gt_l} Ghat_i^H - Ghat_l E{Gt_i^H}] V_i
/// with the i = l term included.
template <typename T>
ComplexMatrix<T> build_coupling(int l, const ComplexMatrix<T>& g_hat,
                                const UncertaintyStats<T>& stats, const PrecodingMatrix<T>& v) {
    const int m = v.block_size;
    const int num_sats = v.num_blocks();
    if (g_hat.rows() != v.v.rows() || g_hat.cols() != v.v.cols())
        throw std::invalid_argument("build_coupling: channel and precoder dimensions differ");

    const auto g_l = g_hat.middleRows(l * m, m);
    const auto mean_l = stats.mean_block(l);
    ComplexMatrix<T> a = ComplexMatrix<T>::Zero(m, v.v.cols());
    for (int i = 0; i < num_sats; ++i) {
        const auto g_i = g_hat.middleRows(i * m, m);
        const auto mean_i = stats.mean_block(i);
        const auto v_i = v.block(i);
        a.noalias() += (g_l * g_i.adjoint()) * v_i;
        a.noalias() += stats.second_moment_block(l, i) * v_i;
        a.noalias() -= (mean_l * g_i.adjoint()) * v_i;
        a.noalias() -= (g_l * mean_i.adjoint()) * v_i;
    }
    return a;
}

/// Closed-form minimizer of the per-satellite Lagrangian with the other
/// blocks held fixed:
///   V_l = (Ghat_l Ghat_l^H + E{Gt_l Gt_l^H} - E{Gt_l} Ghat_l^H - Ghat_l E{Gt_l^H}
///          + lambda_l I)^{-1}
///         (Ghat_l - E{Gt_l}
///          - sum_{i != l} [Ghat_l Ghat_i^H + E{Gt_l Gt_i^H}] V_i
///          + sum_{i != l} [E{Gt_l} Ghat_i^H + Ghat_l E{Gt_i^H}] V_i).
/// The system matrix is Hermitian positive definite for lambda_l > 0 whenever
/// the stats are sample moments.
template <typename T>
ComplexMatrix<T> update_precoder_block(int l, const ComplexMatrix<T>& g_hat,
                                       const UncertaintyStats<T>& stats,
                                       const PrecodingMatrix<T>& v, T lambda_l) {
    const int m = v.block_size;
    const int num_sats = v.num_blocks();
    const auto g_l = g_hat.middleRows(l * m, m);
    const auto mean_l = stats.mean_block(l);

    ComplexMatrix<T> system = g_l * g_l.adjoint();
    system += stats.second_moment_block(l, l);
    system.noalias() -= mean_l * g_l.adjoint();
    system.noalias() -= g_l * mean_l.adjoint();
    system.diagonal().array() += lambda_l;

    ComplexMatrix<T> rhs = g_l - mean_l;
    for (int i = 0; i < num_sats; ++i) {
        if (i == l) continue;
        const auto g_i = g_hat.middleRows(i * m, m);
        const auto mean_i = stats.mean_block(i);
        const auto v_i = v.block(i);
        rhs.noalias() -= (g_l * g_i.adjoint()) * v_i;
        rhs.noalias() -= stats.second_moment_block(l, i) * v_i;
        rhs.noalias() += (mean_l * g_i.adjoint()) * v_i;
        rhs.noalias() += (g_l * mean_i.adjoint()) * v_i;
    }

    Eigen::LLT<ComplexMatrix<T>> llt(system);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("update_precoder_block: system not positive definite");
    return llt.solve(rhs);
}

/// Dual update: additive ascent while the block is over budget, multiplicative
/// decay otherwise.
template <typename T>
T update_lambda(T lambda, T block_power, T budget, T alpha) {
    if (block_power > budget) return lambda + alpha * (block_power - budget);
    return alpha * lambda;
}

/// Sum rate sum_k log2(1 + |g_k^H v_k|^2 / (sum_{i != k} |g_k^H v_i|^2 + sigma^2)).
template <typename T>
T sum_rate(const ComplexMatrix<T>& g, const ComplexMatrix<T>& v, T noise_power) {
    if (g.rows() != v.rows() || g.cols() != v.cols())
        throw std::invalid_argument("sum_rate: channel and precoder dimensions differ");
    const ComplexMatrix<T> coupling = g.adjoint() * v;  // coupling(k, i) = g_k^H v_i
    T rate = T(0);
    for (int k = 0; k < coupling.rows(); ++k) {
        const T signal = std::norm(coupling(k, k));
        if (signal == T(0)) continue;
        const T interference = coupling.row(k).squaredNorm() - signal;
        rate += std::log2(T(1) + signal / (interference + noise_power));
    }
    return rate;
}

/// Per-iteration floating-point operation count of the alternating solver,
/// L*(13*M^2*K + 4*M^2 + 3*(L-1)*M*K); useful for benchmark comparisons.
inline double complexity_probe(int num_sats, int antennas, int num_users) {
    if (num_sats < 1 || antennas < 1 || num_users < 1)
        throw std::invalid_argument("complexity_probe: sizes must be positive");
    const double l = num_sats, m = antennas, k = num_users;
    return l * (13.0 * m * m * k + 4.0 * m * m + 3.0 * (l - 1.0) * m * k);
}

/// Feasible matched-filter start: V_l = Ghat_l * sqrt(P_l / tr(Ghat_l Ghat_l^H)).
template <typename T>
PrecodingMatrix<T> matched_filter_init(const ComplexMatrix<T>& g_hat, const PowerBudget<T>& budgets,
                                       int block_size) {
    PrecodingMatrix<T> v{ComplexMatrix<T>::Zero(g_hat.rows(), g_hat.cols()), block_size};
    for (int l = 0; l < v.num_blocks(); ++l) {
        const auto g_l = g_hat.middleRows(l * block_size, block_size);
        const T energy = g_l.squaredNorm();
        if (energy > T(0))
            v.block(l) = g_l * std::sqrt(budgets.per_satellite(l) / energy);
    }
    return v;
}

/// Alternating robust precoder. Sweeps the per-satellite closed-form update
/// followed by the dual update, and stops once the relative rate change falls
/// below the tolerance while every block is within the accepted power
/// overshoot, or at the iteration cap (converged = false, any remaining
/// overshoot is projected back to the budget). The rate fed to the stopping
/// rule defaults to the sum rate on g_hat, the only channel the solver sees.
template <typename T>
std::pair<PrecodingMatrix<T>, SolveReport<T>> robust_precode(
    const ComplexMatrix<T>& g_hat, const UncertaintyStats<T>& stats, const PowerBudget<T>& budgets,
    T noise_power, RateEvaluator<T> rate_evaluator = {}, const SolveOptions& options = {}) {
    const int num_sats = static_cast<int>(budgets.per_satellite.size());
    if (num_sats < 1) throw std::invalid_argument("robust_precode: empty power budget");
    if (g_hat.rows() % num_sats != 0)
        throw std::invalid_argument("robust_precode: channel rows not divisible by satellite count");
    const int m = static_cast<int>(g_hat.rows()) / num_sats;
    if (stats.block_size != m)
        throw std::invalid_argument("robust_precode: stats block size mismatch");

    if (!rate_evaluator)
        rate_evaluator = [&g_hat, noise_power](const ComplexMatrix<T>& v) {
            return sum_rate(g_hat, v, noise_power);
        };

    PrecodingMatrix<T> v = matched_filter_init(g_hat, budgets, m);
    DualState<T> dual{RealVector<T>::Constant(num_sats, static_cast<T>(options.initial_lambda)),
                      static_cast<T>(options.alpha)};

    SolveReport<T> report;
    for (int iteration = 1; iteration <= options.max_iterations; ++iteration) {
        for (int l = 0; l < num_sats; ++l) {
            v.block(l) = update_precoder_block(l, g_hat, stats, v, dual.lambda(l));
            dual.lambda(l) =
                update_lambda(dual.lambda(l), v.block_power(l), budgets.per_satellite(l), dual.alpha);
        }
        const T rate = rate_evaluator(v.v);
        report.rate_trajectory.push_back(rate);

        bool feasible = true;
        for (int l = 0; l < num_sats; ++l)
            feasible = feasible && v.block_power(l) <=
                                       budgets.per_satellite(l) * (T(1) + static_cast<T>(options.power_tolerance));
        if (iteration >= 2 && feasible) {
            const T previous = report.rate_trajectory[static_cast<std::size_t>(iteration) - 2];
            if (std::abs(rate - previous) < static_cast<T>(options.rate_tolerance) * rate) {
                report.converged = true;
                break;
            }
        }
    }
    report.iterations = static_cast<int>(report.rate_trajectory.size());

    // Safety net at the cap: scale any still-over-budget block down to its budget.
    if (!report.converged)
        for (int l = 0; l < num_sats; ++l) {
            const T power = v.block_power(l);
            if (power > budgets.per_satellite(l))
                v.block(l) *= std::sqrt(budgets.per_satellite(l) / power);
        }

    report.block_powers = v.block_powers();
    return {std::move(v), std::move(report)};
}

/// Baseline that ignores the error statistics (assumes zero mean and zero
/// second moment). With g_hat equal to the true channel this is the
/// perfect-CSI solver.
template <typename T>
std::pair<PrecodingMatrix<T>, SolveReport<T>> nonrobust_precode(
    const ComplexMatrix<T>& g_hat, const PowerBudget<T>& budgets, T noise_power,
    RateEvaluator<T> rate_evaluator = {}, const SolveOptions& options = {}) {
    const int num_sats = static_cast<int>(budgets.per_satellite.size());
    if (num_sats < 1) throw std::invalid_argument("nonrobust_precode: empty power budget");
    const int m = static_cast<int>(g_hat.rows()) / num_sats;
    return robust_precode(g_hat,
                          UncertaintyStats<T>::zero(static_cast<int>(g_hat.rows()),
                                                    static_cast<int>(g_hat.cols()), m),
                          budgets, noise_power, std::move(rate_evaluator), options);
}

}  // namespace satmimo
