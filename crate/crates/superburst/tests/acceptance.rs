//! End-to-end acceptance checks. Each test covers one numbered criterion and
//! prints a single PASS/FAIL line with its measurements and runtime (visible
//! with `--nocapture`, or in the failure message).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superburst::*;

fn conclude(id: u32, name: &str, pass: bool, detail: &str, started: Instant) {
    let line = format!(
        "criterion {id} ({name}): {} — {detail} [{:.1}s]",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    println!("{line}");
    assert!(pass, "{line}");
}

/// Every open lattice with at least two sites per axis, `dimension` axes, and
/// at most `max_sites` sites, keyed by nondecreasing extents.
fn small_lattices(dimension: usize, max_sites: usize) -> Vec<LatticeSpec> {
    let mut out = Vec::new();
    let mut extents = vec![2usize; dimension];
    loop {
        let n: usize = extents.iter().product();
        if n <= max_sites && extents.windows(2).all(|w| w[0] <= w[1]) {
            out.push(LatticeSpec::hyperrectangle(extents.clone()).unwrap());
        }
        let mut axis = dimension;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            extents[axis] += 1;
            if extents[axis] <= max_sites {
                break;
            }
            extents[axis] = 2;
        }
    }
}

fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn forward_slope(gamma: &DecoherenceMatrix, j: Option<&nalgebra::DMatrix<num_complex::Complex64>>) -> f64 {
    let h = 1e-6;
    let times = [0.0, h, 2.0 * h];
    let trace = lindblad_evolve(gamma, j, InitialState::FullyExcited, &times).unwrap();
    (-3.0 * trace.rates[0] + 4.0 * trace.rates[1] - trace.rates[2]) / (2.0 * h)
}

// Criterion 1: nearest-neighbor arrays at gamma <= 1/(2D) in D = 1..3 admit
// no superradiance: the exact rate-operator maximum equals N (50 random
// couplings per dimension, relative 1e-9) and integrated emission never
// exceeds the initial rate (1e-6 absolute, a subset of couplings sized to
// keep the suite within its runtime budget).
#[test]
fn criterion_1_nn_no_burst() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_brute = 0.0f64;
    let mut worst_peak = f64::MIN;
    let mut traces = 0usize;
    for dimension in 1..=3usize {
        let cap = 1.0 / (2.0 * dimension as f64);
        let draws: Vec<f64> = (0..50).map(|_| rng.gen_range(0.0..=cap)).collect();
        for lattice in small_lattices(dimension, 12) {
            let n = lattice.n_sites();
            for (k, &g) in draws.iter().enumerate() {
                let model = InteractionModel::NearestNeighbor { gamma: g };
                let gamma = build_decoherence(&model, &lattice).unwrap();
                let brute = brute_force_hgamma_max(&gamma).unwrap();
                worst_brute = worst_brute.max((brute - n as f64).abs() / n as f64);
                // Full integrations only where they cost seconds, not
                // minutes: three couplings per lattice up to 10 sites, one
                // on the largest array.
                let run_dynamics = (n <= 10 && k < 3) || (n == 12 && k == 0 && dimension == 3);
                if run_dynamics {
                    let grid = burst_time_grid(3.0);
                    let trace =
                        lindblad_evolve(&gamma, None, InitialState::FullyExcited, &grid).unwrap();
                    let peak = trace.rates.iter().cloned().fold(f64::MIN, f64::max);
                    worst_peak = worst_peak.max(peak - n as f64);
                    traces += 1;
                }
            }
        }
    }
    let pass = worst_brute < 1e-9 && worst_peak <= 1e-6;
    conclude(
        1,
        "nn no-burst",
        pass,
        &format!(
            "max |brute-N|/N = {worst_brute:.2e}, max rate excess over N = {worst_peak:.2e} \
             across {traces} integrations"
        ),
        started,
    );
}

// Criterion 2: open-chain coupling boundaries — burst threshold
// sqrt(N/(2(N-1))) and positivity boundary sec(pi/(N+1))/2 — with the
// positivity boundary strictly below the burst threshold for N = 3..512 and
// equality exactly at N = 2.
#[test]
fn criterion_2_nn_chain_thresholds() {
    let started = Instant::now();
    let mut worst_s = 0.0f64;
    let mut worst_p = 0.0f64;
    let mut ordered = true;
    let model = InteractionModel::NearestNeighbor { gamma: 0.0 };
    for n in 3..=512usize {
        let lattice = LatticeSpec::chain(n).unwrap();
        let gs = gamma_s(&model, &lattice).unwrap().unwrap();
        let gp = gamma_p(&model, &lattice).unwrap();
        let gs_ref = (n as f64 / (2.0 * (n as f64 - 1.0))).sqrt();
        let gp_ref = 0.5 / (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        worst_s = worst_s.max((gs - gs_ref).abs());
        worst_p = worst_p.max((gp - gp_ref).abs());
        ordered &= gp < gs;
    }
    let two = LatticeSpec::chain(2).unwrap();
    let equal_at_two = {
        let gs = gamma_s(&model, &two).unwrap().unwrap();
        let gp = gamma_p(&model, &two).unwrap();
        (gs - gp).abs() < 1e-14
    };
    let pass = worst_s < 1e-12 && worst_p < 1e-12 && ordered && equal_at_two;
    conclude(
        2,
        "nn chain thresholds",
        pass,
        &format!(
            "max formula deviations {worst_s:.1e}/{worst_p:.1e}, \
             gamma_p < gamma_s for all N in 3..=512: {ordered}, equality at N=2: {equal_at_two}"
        ),
        started,
    );
}

// Criterion 3: two-shell ring phase map at 1e-3 resolution — smallest
// bursting next-shell coupling lands in [0.184, 0.186]; a 101-site ring
// reclassifies cells only within 2e-2 of an analytic region boundary; either
// coupling alone admits no burst anywhere.
#[test]
fn criterion_3_nnn_phase_diagram() {
    let started = Instant::now();
    let res = 1e-3;
    let steps1 = 1000usize;
    let steps2 = 500usize;
    let verdicts: Vec<Vec<RegionVerdict>> = (0..=steps1)
        .map(|i1| {
            (0..=steps2)
                .map(|i2| nnn_region(i1 as f64 * res, i2 as f64 * res))
                .collect()
        })
        .collect();
    let mut min_g2: Option<f64> = None;
    let mut axis_bursts = 0usize;
    let mut band = 0.0f64;
    for i1 in 0..=steps1 {
        for i2 in 0..=steps2 {
            let verdict = verdicts[i1][i2];
            if verdict == RegionVerdict::Superradiant {
                if i1 == 0 || i2 == 0 {
                    axis_bursts += 1;
                }
                let g2 = i2 as f64 * res;
                if min_g2.map_or(true, |m| g2 < m) {
                    min_g2 = Some(g2);
                }
            }
            let finite = nnn_region_finite(101, i1 as f64 * res, i2 as f64 * res).unwrap();
            if finite != verdict {
                // Distance (in grid steps) to the nearest cell with a
                // different analytic verdict; disagreements must hug a
                // boundary.
                let mut dist = usize::MAX;
                for k in 1..=20usize {
                    let mut boundary = false;
                    if i1 >= k {
                        boundary |= verdicts[i1 - k][i2] != verdict;
                    }
                    if i1 + k <= steps1 {
                        boundary |= verdicts[i1 + k][i2] != verdict;
                    }
                    if i2 >= k {
                        boundary |= verdicts[i1][i2 - k] != verdict;
                    }
                    if i2 + k <= steps2 {
                        boundary |= verdicts[i1][i2 + k] != verdict;
                    }
                    if boundary {
                        dist = k;
                        break;
                    }
                }
                band = band.max(if dist == usize::MAX { 1.0 } else { dist as f64 * res });
            }
        }
    }
    let min_g2 = min_g2.unwrap_or(f64::NAN);
    let pass = (0.184..=0.186).contains(&min_g2) && axis_bursts == 0 && band <= 2e-2;
    conclude(
        3,
        "nnn phase map",
        pass,
        &format!(
            "min gamma2 = {min_g2:.4} (target [0.184, 0.186]), single-coupling bursts = \
             {axis_bursts}, finite-size disagreement band = {band:.3}"
        ),
        started,
    );
}

// Criterion 4: exponential-decay thresholds — the chain value stays within
// 2e-3 of 1/sqrt(3) from 1e3 to 1e5 sites (range threshold 0.549 +- 0.003 in
// log-coupling units), and the bulk threshold falls with dimension like
// D^-0.793 within 0.05 over D = 1..6.
#[test]
fn criterion_4_exponential_thresholds() {
    let started = Instant::now();
    let model = InteractionModel::Exponential { gamma: 0.0 };
    let target = 3f64.sqrt().recip();
    let mut worst = 0.0f64;
    let mut kd_ok = true;
    for n in [1_000usize, 10_000, 100_000] {
        let gs = gamma_s_numeric(&model, &LatticeSpec::chain(n).unwrap())
            .unwrap()
            .unwrap();
        worst = worst.max((gs - target).abs());
        let kd = -gs.ln();
        kd_ok &= (kd - 0.549).abs() <= 0.003;
    }
    let points: Vec<(f64, f64)> = (1..=6usize)
        .map(|d| (d as f64, gamma_s_bulk(&model, d).unwrap()))
        .collect();
    let slope = log_log_slope(&points);
    let pass = worst <= 2e-3 && kd_ok && (slope - (-0.793)).abs() <= 0.05;
    conclude(
        4,
        "exponential thresholds",
        pass,
        &format!(
            "chain deviation from 1/sqrt(3) = {worst:.2e}, log-coupling threshold in band: \
             {kd_ok}, dimension fit = {slope:.4} (target -0.793 +- 0.05)"
        ),
        started,
    );
}

// Criterion 5: inverse-distance thresholds — the chain value sqrt(3)/pi is
// size-independent to 1e-3 from 1e2 to 1e4 sites, and on cubes the threshold
// falls like N^(-1/6): the compensated product varies under 10% from 1e3 to
// 1e5 sites.
#[test]
fn criterion_5_power_law_scalings() {
    let started = Instant::now();
    let model = InteractionModel::PowerLaw { gamma: 0.0 };
    let target = 3f64.sqrt() / std::f64::consts::PI;
    let mut worst_1d = 0.0f64;
    for n in [100usize, 1_000, 10_000] {
        let gs = gamma_s(&model, &LatticeSpec::chain(n).unwrap()).unwrap().unwrap();
        worst_1d = worst_1d.max((gs - target).abs());
    }
    let mut products = Vec::new();
    for extent in [10usize, 14, 22, 31, 46] {
        let lattice = LatticeSpec::hypercube(3, extent).unwrap();
        let n = lattice.n_sites() as f64;
        let gs = gamma_s_numeric(&model, &lattice).unwrap().unwrap();
        products.push(gs * n.powf(1.0 / 6.0));
    }
    let hi = products.iter().cloned().fold(f64::MIN, f64::max);
    let lo = products.iter().cloned().fold(f64::MAX, f64::min);
    let variation = (hi - lo) / lo;
    let pass = worst_1d <= 1e-3 && variation < 0.10;
    conclude(
        5,
        "power-law scalings",
        pass,
        &format!(
            "chain deviation from sqrt(3)/pi = {worst_1d:.2e}, cube compensated variation = \
             {:.1}%",
            variation * 100.0
        ),
        started,
    );
}

// Criterion 6: chiral waveguide — closed-form photon statistics match the
// dense trace to 1e-9 on a 100x100 parameter grid, and three-emitter
// dynamics burst exactly above |chi| = 1/sqrt(3) (boundary bisected to
// +-0.01).
#[test]
fn criterion_6_chiral_waveguide() {
    let started = Instant::now();
    let lattice = LatticeSpec::chain(10).unwrap();
    let mut worst = 0.0f64;
    for i in 0..100 {
        for j in 0..100 {
            let kd = 1e-3 + (std::f64::consts::PI - 2e-3) * i as f64 / 99.0;
            let chi = -1.0 + 2.0 * j as f64 / 99.0;
            let model = InteractionModel::ChiralInfiniteRange { kd, chi };
            let s = analyze(&build_decoherence(&model, &lattice).unwrap()).unwrap();
            let dense = g2_zero(s.n, s.trace_gamma2);
            worst = worst.max((dense - chiral_g2_closed(s.n, kd, chi)).abs());
        }
    }

    let kd = std::f64::consts::PI / 3.0;
    let three = LatticeSpec::chain(3).unwrap();
    let bursts = |chi: f64| -> bool {
        let model = InteractionModel::ChiralInfiniteRange { kd, chi };
        let gamma = build_decoherence(&model, &three).unwrap();
        let trace =
            lindblad_evolve(&gamma, None, InitialState::FullyExcited, &burst_time_grid(4.0))
                .unwrap();
        detect_burst(&trace, 1e-8).unwrap().has_burst
    };
    let (mut lo, mut hi) = (0.3f64, 0.9f64);
    assert!(!bursts(lo) && bursts(hi), "bisection bracket must split");
    while hi - lo > 5e-3 {
        let mid = 0.5 * (lo + hi);
        if bursts(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let boundary = 0.5 * (lo + hi);
    let pass = worst <= 1e-9 && (boundary - 3f64.sqrt().recip()).abs() <= 0.01;
    conclude(
        6,
        "chiral waveguide",
        pass,
        &format!(
            "max closed-vs-dense g2 gap = {worst:.2e}, burst boundary chi = {boundary:.4} \
             (target 0.5774 +- 0.01)"
        ),
        started,
    );
}

// Criterion 7: the all-to-all window with enhanced triple coincidences but
// suppressed pairs opens exactly at N = 7 and narrows roughly like 1/(3N);
// the fitted width exponent over N = 8..128 must land in -1 +- 0.1.
//
// The exactness check passes. The exponent check is reported faithfully: the
// window opens at N ≈ 6.83, so widths are still rising toward the 1/(3N)
// asymptote over most of 8..128 and the five-point fit lands near -0.33
// (local slopes only reach -1 beyond N ~ 10^4).
#[test]
fn criterion_7_g3_window() {
    let started = Instant::now();
    let spectrum = |n: usize, g: f64| -> (f64, f64) {
        let big = 1.0 + g * (n as f64 - 1.0);
        let small = 1.0 - g;
        let copies = n as f64 - 1.0;
        (big * big + copies * small * small, big * big * big + copies * small * small * small)
    };
    let window_margin = |n: usize| -> f64 {
        // g3 - 1 exactly at the pair threshold; positive means a window.
        let gs = ((n - 1) as f64).sqrt().recip();
        let (t2, t3) = spectrum(n, gs);
        g3_zero(n, t2, t3) - 1.0
    };
    let mut integer_ok = true;
    for n in 3..=200usize {
        let expected = n as f64 > 2.0 * (2.0 + 2f64.sqrt());
        integer_ok &= (window_margin(n) > 0.0) == expected;
        integer_ok &= expected == (n >= 7);
    }

    let mut widths = Vec::new();
    for n in [8usize, 16, 32, 64, 128] {
        let gs = ((n - 1) as f64).sqrt().recip();
        let (mut lo, mut hi) = (0.0f64, gs);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let (t2, t3) = spectrum(n, mid);
            if g3_zero(n, t2, t3) >= 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        widths.push((n as f64, gs - 0.5 * (lo + hi)));
    }
    let slope = log_log_slope(&widths);
    let pass = integer_ok && (slope - (-1.0)).abs() <= 0.1;
    conclude(
        7,
        "g3 window",
        pass,
        &format!(
            "opens exactly at N = 7 for N <= 200: {integer_ok}, width exponent over 8..128 = \
             {slope:.3} (target -1 +- 0.1; asymptote only reached near N ~ 10^4)"
        ),
        started,
    );
}

// Criterion 8: collective decay with local noise just below critical shows a
// faint delayed burst at 20 emitters (relative overshoot in [3e-7, 3e-6]);
// at 10 emitters the same noise level kills the burst.
#[test]
fn criterion_8_delayed_burst() {
    let started = Instant::now();
    let grid = burst_time_grid(8.0);

    let gamma20 = (1.0 - 1e-4) / 19f64.sqrt();
    let report20 = detect_burst(&dicke_local_evolve(20, gamma20, &grid).unwrap(), 1e-8).unwrap();

    let gamma10 = (1.0 - 1e-4) / 9f64.sqrt();
    let report10 = detect_burst(&dicke_local_evolve(10, gamma10, &grid).unwrap(), 1e-8).unwrap();

    let pass = report20.is_delayed
        && (3e-7..=3e-6).contains(&report20.fractional_increase)
        && !report10.has_burst;
    conclude(
        8,
        "delayed burst",
        pass,
        &format!(
            "N=20: delayed = {}, overshoot = {:.2e} (target [3e-7, 3e-6]); N=10 burst = {}",
            report20.is_delayed, report20.fractional_increase, report10.has_burst
        ),
        started,
    );
}

// Criterion 9: cross-checks tying the independent computation paths
// together: moment formulas vs finite-difference dynamics, single-excitation
// rates vs photon statistics, closed-form vs dense spectra up to 512 sites,
// invariance of the initial slope under real symmetric coherent couplings,
// collective-sector vs general solver, and the burst census across model
// families.
#[test]
fn criterion_9_consistency() {
    let started = Instant::now();
    let mut failures: Vec<String> = Vec::new();

    let cases: Vec<(InteractionModel, LatticeSpec)> = vec![
        (InteractionModel::NearestNeighbor { gamma: 0.45 }, LatticeSpec::chain(10).unwrap()),
        (
            InteractionModel::NearestNeighbor { gamma: 0.2 },
            LatticeSpec::hyperrectangle(vec![3, 3]).unwrap(),
        ),
        (
            InteractionModel::NearestNeighborNonuniform { gammas: vec![0.3, 0.1, 0.4, 0.25] },
            LatticeSpec::chain(5).unwrap(),
        ),
        (
            InteractionModel::NextNearestRing { gamma1: 0.4, gamma2: 0.25 },
            LatticeSpec::ring(9).unwrap(),
        ),
        (InteractionModel::Exponential { gamma: 0.5 }, LatticeSpec::chain(8).unwrap()),
        (InteractionModel::Exponential { gamma: 0.6 }, LatticeSpec::ring(9).unwrap()),
        (InteractionModel::PowerLaw { gamma: 0.4 }, LatticeSpec::chain(8).unwrap()),
        (
            InteractionModel::ChiralInfiniteRange { kd: 1.2, chi: 0.6 },
            LatticeSpec::chain(7).unwrap(),
        ),
        (InteractionModel::AllToAll { gamma: 0.35 }, LatticeSpec::chain(8).unwrap()),
    ];

    // Initial slope from moments vs integrated dynamics; average
    // single-excitation rate vs N g2.
    for (model, lattice) in &cases {
        let gamma = build_decoherence(model, lattice).unwrap();
        let s = analyze(&gamma).unwrap();
        if !s.is_physical {
            failures.push(format!("{} not physical", model.descriptor()));
            continue;
        }
        let expect = rate_derivative_initial(s.n, s.trace_gamma2);
        let got = forward_slope(&gamma, None);
        if (got - expect).abs() > 1e-4 * expect.abs().max(1.0) {
            failures.push(format!("slope mismatch for {}", model.descriptor()));
        }
        let (_, average) = one_jump_rates(&gamma).unwrap();
        let want = s.n as f64 * g2_zero(s.n, s.trace_gamma2);
        if (average - want).abs() > 1e-9 * want.abs().max(1.0) {
            failures.push(format!("single-excitation average mismatch for {}", model.descriptor()));
        }
    }

    // Closed-form spectra vs dense eigensolves at up to 512 sites.
    let spectra: Vec<(InteractionModel, LatticeSpec)> = vec![
        (InteractionModel::NearestNeighbor { gamma: 0.3 }, LatticeSpec::chain(512).unwrap()),
        (InteractionModel::NearestNeighbor { gamma: 0.45 }, LatticeSpec::ring(511).unwrap()),
        (
            InteractionModel::NextNearestRing { gamma1: 0.5, gamma2: 0.2 },
            LatticeSpec::ring(511).unwrap(),
        ),
        (InteractionModel::Exponential { gamma: 0.7 }, LatticeSpec::ring(511).unwrap()),
        (InteractionModel::AllToAll { gamma: 0.6 }, LatticeSpec::chain(512).unwrap()),
    ];
    for (model, lattice) in &spectra {
        let closed = closed_form_spectrum(model, lattice).unwrap().unwrap();
        let dense = analyze(&build_decoherence(model, lattice).unwrap()).unwrap().eigenvalues;
        let gap = closed
            .iter()
            .zip(&dense)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if gap > 1e-9 * lattice.n_sites() as f64 {
            failures.push(format!("spectrum gap {gap:.1e} for {}", model.descriptor()));
        }
    }

    // A real symmetric all-to-all coherent coupling must not move the
    // initial slope, and the cumulant slope (which carries no coherent
    // term) must equal both.
    {
        let lattice = LatticeSpec::ring(8).unwrap();
        let model = InteractionModel::NearestNeighbor { gamma: 0.4 };
        let gamma = build_decoherence(&model, &lattice).unwrap();
        let j = build_coherent_coupling(&CoherentCoupling::AllToAll { j: 0.7 }, 8).unwrap();
        let bare = forward_slope(&gamma, None);
        let driven = forward_slope(&gamma, j.as_ref());
        let meanfield = cumulant_rate_derivative(
            &model,
            &lattice,
            &CumulantState { p: 1.0, c: vec![0.0; 4], z: vec![1.0; 4] },
        )
        .unwrap();
        let scale = bare.abs().max(1.0);
        if (bare - driven).abs() > 1e-5 * scale || (bare - meanfield).abs() > 1e-5 * scale {
            failures.push(format!(
                "coherent-coupling slope drift: bare {bare:.8}, driven {driven:.8}, \
                 mean-field {meanfield:.8}"
            ));
        }
    }

    // Collective-sector solver vs the general solver on uniform coupling.
    {
        let lattice = LatticeSpec::chain(8).unwrap();
        let g = 0.45;
        let gamma =
            build_decoherence(&InteractionModel::AllToAll { gamma: g }, &lattice).unwrap();
        let times: Vec<f64> = (0..=60).map(|k| 2.0 * k as f64 / 60.0).collect();
        let full = lindblad_evolve(&gamma, None, InitialState::FullyExcited, &times).unwrap();
        let collective = dicke_local_evolve(8, g, &times).unwrap();
        let gap = full
            .rates
            .iter()
            .zip(&collective.rates)
            .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
            .fold(0.0f64, f64::max);
        if gap > 1e-6 {
            failures.push(format!("collective vs general solver gap {gap:.1e}"));
        }
    }

    // Burst census: uniform and two-shell couplings burst, nearest-neighbor
    // chains and squares do not.
    {
        let census: Vec<(InteractionModel, LatticeSpec, bool)> = vec![
            (InteractionModel::AllToAll { gamma: 1.0 }, LatticeSpec::chain(8).unwrap(), true),
            (
                InteractionModel::NextNearestRing { gamma1: 0.68, gamma2: 0.25 },
                LatticeSpec::ring(9).unwrap(),
                true,
            ),
            (InteractionModel::NearestNeighbor { gamma: 0.45 }, LatticeSpec::chain(10).unwrap(), false),
            (
                InteractionModel::NearestNeighbor { gamma: 0.22 },
                LatticeSpec::hyperrectangle(vec![3, 3]).unwrap(),
                false,
            ),
        ];
        for (model, lattice, expected) in census {
            let gamma = build_decoherence(&model, &lattice).unwrap();
            let trace =
                lindblad_evolve(&gamma, None, InitialState::FullyExcited, &burst_time_grid(4.0))
                    .unwrap();
            let report = detect_burst(&trace, 1e-8).unwrap();
            if report.has_burst != expected {
                failures.push(format!(
                    "burst census: {} expected {expected}",
                    model.descriptor()
                ));
            }
        }
    }

    let pass = failures.is_empty();
    conclude(
        9,
        "consistency suite",
        pass,
        &if pass {
            format!("{} model cases, 5 closed spectra, slope/statistics/solver cross-checks all agree", cases.len())
        } else {
            failures.join("; ")
        },
        started,
    );
}
