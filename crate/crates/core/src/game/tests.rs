use super::*;
use crate::path::{gen_deterministic, gen_fbm, PathKind, PathSpec};
use crate::strategy::{BetaBinomialParams, BetaBinomialPolicy};

fn log_linear_path(slope: f64, horizon: f64, n_points: usize) -> PricePath {
    gen_deterministic(&PathSpec {
        kind: PathKind::LogLinear { slope },
        hurst: 0.5,
        volatility: 0.0,
        horizon,
        n_points,
        initial_price: 1.0,
        seed: 0,
    })
    .unwrap()
}

#[test]
fn rho_symmetric_grid() {
    // delta1 = delta2 = delta gives rho = 1 / (2 + delta).
    for &delta in &[0.5, 0.1, 0.01, 1e-4] {
        let grid = GridParams::from_deltas(delta, delta).unwrap();
        let rho = grid.risk_neutral_rho();
        assert!((rho - 1.0 / (2.0 + delta)).abs() < 1e-15, "delta = {delta}");
    }
}

#[test]
fn rho_tends_to_half_for_fine_grids() {
    let mut prev_gap = f64::INFINITY;
    for k in 1..=10 {
        let delta = 2f64.powi(-k);
        let grid = GridParams::from_deltas(delta, delta).unwrap();
        let gap = (grid.risk_neutral_rho() - 0.5).abs();
        assert!(gap < prev_gap);
        prev_gap = gap;
    }
    assert!(prev_gap < 1e-3);
}

#[test]
fn rho_satisfies_martingale_identity() {
    // Oracle: bisect the martingale identity 1 = rho (1+d1) + (1-rho)/(1+d2)
    // for rho and compare.
    let check = |d1: f64, d2: f64| {
        let grid = GridParams::from_deltas(d1, d2).unwrap();
        let rho = grid.risk_neutral_rho();
        let f = |r: f64| r * (1.0 + d1) + (1.0 - r) / (1.0 + d2) - 1.0;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let solved = 0.5 * (lo + hi);
        assert!((rho - solved).abs() < 1e-12, "d1={d1} d2={d2}: {rho} vs {solved}");
        assert!(f(rho).abs() < 1e-15);
    };
    check(0.1, 0.2);
    check(0.3, 0.05);
    check(1.0, 1.0);
    let grid = GridParams::from_deltas(0.1, 0.2).unwrap();
    assert!((grid.risk_neutral_rho() - 0.625).abs() < 1e-15);
}

#[test]
fn constant_path_has_no_hits() {
    let path = gen_deterministic(&PathSpec {
        kind: PathKind::Constant,
        hurst: 0.5,
        volatility: 0.0,
        horizon: 1.0,
        n_points: 64,
        initial_price: 1.0,
        seed: 0,
    })
    .unwrap();
    let grid = GridParams::from_deltas(0.01, 0.01).unwrap();
    let hits = scan_hits(&path, &grid, 0.0, 1.0).unwrap();
    assert_eq!(hits.n_star(), 0);
}

#[test]
fn log_linear_crossing_times_match_closed_form() {
    // Oracle: a log-linear path with slope c crosses level i*eta at
    // t_i = i * eta / c; every outcome is an up.
    let c = 1.0;
    let eta = 0.125;
    let path = log_linear_path(c, 1.0, 1001);
    let grid = GridParams::from_etas(eta, eta).unwrap();
    let hits = scan_hits(&path, &grid, 0.0, 1.0).unwrap();
    let expected_n = (c * 1.0 / eta).floor() as usize; // 8
    assert_eq!(hits.n_star(), expected_n);
    for (i, hit) in hits.hits.iter().enumerate() {
        let expected_t = (i + 1) as f64 * eta / c;
        assert!((hit.time - expected_t).abs() < 1e-9, "t_{i} = {}, want {expected_t}", hit.time);
        assert!(hit.outcome);
    }
}

#[test]
fn small_sinusoid_stays_in_first_corridor() {
    let path = gen_deterministic(&PathSpec {
        kind: PathKind::Sinusoid { amplitude: 0.05, frequency: 3.0 },
        hurst: 0.5,
        volatility: 0.0,
        horizon: 1.0,
        n_points: 4096,
        initial_price: 1.0,
        seed: 0,
    })
    .unwrap();
    let grid = GridParams::from_etas(0.06, 0.06).unwrap();
    let hits = scan_hits(&path, &grid, 0.0, 1.0).unwrap();
    assert_eq!(hits.n_star(), 0);
}

#[test]
fn corridor_increments_are_exact() {
    let spec = PathSpec {
        kind: PathKind::Fbm,
        hurst: 0.4,
        volatility: 1.0,
        horizon: 1.0,
        n_points: 1 << 12,
        initial_price: 1.0,
        seed: 31,
    };
    let path = gen_fbm(&spec).unwrap();
    let grid = GridParams::from_etas(0.05, 0.03).unwrap();
    let hits = scan_hits(&path, &grid, 0.0, 1.0).unwrap();
    assert!(hits.n_star() > 0);
    let mut prev = hits.entry_log_price;
    for hit in &hits.hits {
        let diff = hit.log_price - prev;
        let expected = if hit.outcome { grid.eta1() } else { -grid.eta2() };
        assert!((diff - expected).abs() < 1e-12);
        prev = hit.log_price;
    }
    // Hit times strictly increasing, all inside the window.
    for w in hits.hits.windows(2) {
        assert!(w[1].time > w[0].time);
    }
    assert!(hits.hits.last().unwrap().time <= 1.0);
}

#[test]
fn scanner_monotone_in_grid_refinement() {
    let spec = PathSpec {
        kind: PathKind::Fbm,
        hurst: 0.5,
        volatility: 1.0,
        horizon: 1.0,
        n_points: 1 << 12,
        initial_price: 1.0,
        seed: 9,
    };
    let path = gen_fbm(&spec).unwrap();
    let mut prev_n = 0;
    for k in 1..=6 {
        let eta = 2f64.powi(-k);
        let grid = GridParams::from_etas(eta, eta).unwrap();
        let n = scan_hits(&path, &grid, 0.0, 1.0).unwrap().n_star();
        assert!(n >= prev_n, "n* dropped from {prev_n} to {n} at k={k}");
        prev_n = n;
    }
}

#[test]
fn hit_exactly_at_window_end_counts() {
    // Slope 1, eta 0.25, window [0, 0.5]: hits at 0.25 and exactly 0.5.
    let path = log_linear_path(1.0, 1.0, 2001);
    let grid = GridParams::from_etas(0.25, 0.25).unwrap();
    let hits = scan_hits(&path, &grid, 0.0, 0.5).unwrap();
    assert_eq!(hits.n_star(), 2);
    assert!((hits.hits[1].time - 0.5).abs() < 1e-9);
}

#[test]
fn round_budget_aborts_scan() {
    let path = log_linear_path(1.0, 1.0, 1001);
    let grid = GridParams::from_etas(0.01, 0.01).unwrap();
    let err = scan_hits_bounded(&path, &grid, 0.0, 1.0, 10).unwrap_err();
    assert!(matches!(err, Error::RoundBudgetExceeded { budget: 10 }));
}

#[test]
fn encode_outcome_boundaries() {
    let grid = GridParams::from_deltas(0.1, 0.2).unwrap();
    assert!(encode_outcome(2.0, 2.0 * 1.1, &grid).unwrap());
    assert!(!encode_outcome(2.0, 2.0 / 1.2, &grid).unwrap());
    assert!(matches!(
        encode_outcome(2.0, 2.0, &grid),
        Err(Error::InconsistentOutcome { .. })
    ));
}

#[test]
fn encode_outcome_agrees_with_displayed_formula() {
    let grid = GridParams::from_deltas(0.07, 0.13).unwrap();
    let (d1, d2) = (grid.delta1(), grid.delta2());
    for &(prev, up) in &[(1.0, true), (1.0, false), (3.7, true), (3.7, false)] {
        let next = if up { prev * (1.0 + d1) } else { prev / (1.0 + d2) };
        let x = ((1.0 + d2) * next - prev) / ((d1 + d2 + d1 * d2) * prev);
        let encoded = encode_outcome(prev, next, &grid).unwrap();
        assert!((x - if encoded { 1.0 } else { 0.0 }).abs() < 1e-9);
    }
}

#[test]
fn zero_bets_leave_capital_at_one() {
    let path = log_linear_path(1.0, 1.0, 1001);
    let grid = GridParams::from_etas(0.125, 0.125).unwrap();
    let hits = scan_hits(&path, &grid, 0.0, 1.0).unwrap();
    let traj = run_embedded_game(&hits, &NoBet, grid.risk_neutral_rho()).unwrap();
    assert!(traj.log_round_capitals.iter().all(|&l| l == 0.0));
    let cont = continuous_capital(&path, &hits, &NoBet, &grid, 1.0).unwrap();
    assert_eq!(cont.log_horizon_capital, 0.0);
}

#[test]
fn max_bet_and_tail_is_ruin() {
    let hits = HitSequence {
        start_time: 0.0,
        end_time: 1.0,
        entry_log_price: 0.0,
        hits: vec![Hit { time: 0.5, outcome: false, log_price: -0.1 }],
    };
    let rho = 0.4;
    let policy = move |_past: &[bool], r: f64| 1.0 / r;
    let traj = run_embedded_game(&hits, &policy, rho).unwrap();
    assert_eq!(traj.log_round_capitals[1], f64::NEG_INFINITY);
}

#[test]
fn bet_outside_window_is_collateral_violation() {
    let hits = HitSequence {
        start_time: 0.0,
        end_time: 1.0,
        entry_log_price: 0.0,
        hits: vec![Hit { time: 0.5, outcome: true, log_price: 0.1 }],
    };
    let policy = |_past: &[bool], r: f64| 1.0 / r + 0.5;
    assert!(matches!(
        run_embedded_game(&hits, &policy, 0.4),
        Err(Error::CollateralViolation { .. })
    ));
}

/// Brute force over all 2^n outcome sequences: the rho-weighted sum of final
/// capitals must be exactly one for any past-measurable policy.
fn martingale_sum(n: usize, rho: f64, policy: &dyn BetPolicy) -> f64 {
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        let outcomes: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let mut log_k = 0.0;
        for i in 0..n {
            let nu = policy.bet(&outcomes[..i], rho);
            let x = if outcomes[i] { 1.0 } else { 0.0 };
            log_k += (1.0 + nu * (x - rho)).ln();
        }
        let h = outcomes.iter().filter(|&&x| x).count() as f64;
        let t = n as f64 - h;
        total += rho.powf(h) * (1.0 - rho).powf(t) * log_k.exp();
    }
    total
}

#[test]
fn martingale_identity_for_fixed_policies() {
    let beta = BetaBinomialPolicy::new(BetaBinomialParams::uniform());
    let contrarian = |past: &[bool], rho: f64| {
        if past.last().copied().unwrap_or(false) {
            -0.3 / (1.0 - rho)
        } else {
            0.3 / rho
        }
    };
    for &rho in &[0.3, 0.5, 0.625] {
        for n in [1usize, 5, 9, 12] {
            let s = martingale_sum(n, rho, &beta);
            assert!((s - 1.0).abs() < 1e-10, "beta policy: rho={rho} n={n} sum={s}");
            let s = martingale_sum(n, rho, &contrarian);
            assert!((s - 1.0).abs() < 1e-10, "contrarian: rho={rho} n={n} sum={s}");
        }
    }
}

#[test]
fn discrete_and_continuous_bookkeeping_agree() {
    // Two independent code paths: the embedded recursion vs the continuous
    // formula evaluated at each trade time.
    let spec = PathSpec {
        kind: PathKind::Fbm,
        hurst: 0.5,
        volatility: 1.0,
        horizon: 1.0,
        n_points: 1 << 13,
        initial_price: 1.0,
        seed: 77,
    };
    let path = gen_fbm(&spec).unwrap();
    let grid = GridParams::from_etas(0.04, 0.04).unwrap();
    let hits = scan_hits(&path, &grid, 0.0, 1.0).unwrap();
    assert!(hits.n_star() > 5);
    let policy = BetaBinomialPolicy::new(BetaBinomialParams::uniform());
    let rho = grid.risk_neutral_rho();
    let traj = run_embedded_game(&hits, &policy, rho).unwrap();

    // Continuous route: apply the position-return factor round by round.
    let theta_per_nu = grid.theta_per_nu();
    let mut log_k = 0.0;
    for n in 0..hits.n_star() {
        let nu = traj.bets[n];
        let theta = theta_per_nu * nu;
        let s_prev = hits.log_price_at_round(n).exp();
        let s_next = hits.log_price_at_round(n + 1).exp();
        log_k += (1.0 + theta * (s_next - s_prev) / s_prev).ln();
        let rel = (log_k - traj.log_round_capitals[n + 1]).abs()
            / traj.log_round_capitals[n + 1].abs().max(1.0);
        assert!(rel < 1e-10, "round {n}: {log_k} vs {}", traj.log_round_capitals[n + 1]);
    }
}

#[test]
fn single_round_resolved_exactly_at_horizon() {
    // Slope 1, eta 0.5, horizon 0.5: the only hit lands exactly at T, so the
    // open factor is one and K(T) equals the round capital.
    let path = log_linear_path(1.0, 0.5, 501);
    let grid = GridParams::from_etas(0.5, 0.5).unwrap();
    let hits = scan_hits(&path, &grid, 0.0, 0.5).unwrap();
    assert_eq!(hits.n_star(), 1);
    let policy = BetaBinomialPolicy::new(BetaBinomialParams::uniform());
    let traj = continuous_capital(&path, &hits, &policy, &grid, 0.5).unwrap();
    assert!(
        (traj.log_horizon_capital - traj.log_final_round_capital()).abs() < 1e-9,
        "open factor should be 1"
    );
}

#[test]
fn open_position_factor_is_bounded() {
    let spec = PathSpec {
        kind: PathKind::Fbm,
        hurst: 0.3,
        volatility: 1.0,
        horizon: 1.0,
        n_points: 1 << 13,
        initial_price: 1.0,
        seed: 3,
    };
    let path = gen_fbm(&spec).unwrap();
    let grid = GridParams::from_etas(0.1, 0.07).unwrap();
    let hits = scan_hits(&path, &grid, 0.0, 1.0).unwrap();
    let policy = BetaBinomialPolicy::new(BetaBinomialParams::uniform());
    let traj = continuous_capital(&path, &hits, &policy, &grid, 1.0).unwrap();
    let open_factor = (traj.log_horizon_capital - traj.log_final_round_capital()).exp();
    let theta = grid.theta_per_nu() * traj.open_bet.unwrap();
    let bound = grid.delta1().max(grid.delta2()) * theta.abs().max(1.0);
    assert!((open_factor - 1.0).abs() < bound + 1e-12);
}

#[test]
fn capital_curve_is_continuous_and_nonnegative() {
    let spec = PathSpec {
        kind: PathKind::Fbm,
        hurst: 0.5,
        volatility: 1.0,
        horizon: 1.0,
        n_points: 1 << 12,
        initial_price: 1.0,
        seed: 15,
    };
    let path = gen_fbm(&spec).unwrap();
    let grid = GridParams::from_etas(0.05, 0.05).unwrap();
    let hits = scan_hits(&path, &grid, 0.0, 1.0).unwrap();
    let policy = BetaBinomialPolicy::new(BetaBinomialParams::uniform());
    let traj = continuous_capital(&path, &hits, &policy, &grid, 1.0).unwrap();
    let curve = sample_capital_curve(&path, &hits, &traj, &grid, 0.0, 1.0);
    // Nonnegative capital everywhere (log is never NaN; -inf only at ruin).
    assert!(curve.log_capital.iter().all(|l| !l.is_nan()));
    // No jumps across consecutive samples beyond what the price move allows.
    for w in curve.log_capital.windows(2) {
        assert!((w[1] - w[0]).abs() < 0.5, "capital jump {} -> {}", w[0], w[1]);
    }
    // The curve agrees with the recursion at each hit time.
    for (n, hit) in hits.hits.iter().enumerate() {
        let idx = curve.times.iter().position(|&t| t == hit.time).unwrap();
        assert!((curve.log_capital[idx] - traj.log_round_capitals[n + 1]).abs() < 1e-9);
    }
}

#[test]
fn scan_rejects_bad_windows() {
    let path = log_linear_path(1.0, 1.0, 11);
    let grid = GridParams::from_etas(0.1, 0.1).unwrap();
    assert!(scan_hits(&path, &grid, 0.5, 0.5).is_err());
    assert!(scan_hits(&path, &grid, 0.0, 2.0).is_err());
}
