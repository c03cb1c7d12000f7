//! Exit criteria of the rate library. Each test prints one PASS/FAIL line.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use qkd_rate::key_rate::single_photon_error_threshold;
use qkd_rate::optimize::{pdc_optimal_bound, wcp_optimal_bound, SweepConfig, DEFAULT_MU_BRACKET};
use qkd_rate::pns::{self, Polarization};
use qkd_rate::scenario::Scenario;
use qkd_rate::{
    collision_prob_single, ec_factor, gain_multi, gain_single, hoeffding_confidence, rate_point, sweep, tau1,
    ClickModel, EcModel, LinkBudget, PhotonStats, Source, WcpSource,
};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use rand_distr::{Binomial, Distribution};

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("[{}] criterion {id:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

#[test]
fn c01_error_threshold() {
    let start = Instant::now();
    let root = single_photon_error_threshold(&EcModel::ShannonIdeal, 1e-10).unwrap();
    let elapsed = start.elapsed();
    let ok = (0.10..=0.12).contains(&root) && elapsed < Duration::from_millis(1);
    report(1, "single-photon error threshold", ok, format!("e* = {root:.10}, {elapsed:?}"));
}

#[test]
fn c02_table_exactness() {
    let ec = EcModel::brassard_salvail();
    let rows = [(0.01, 1.16), (0.05, 1.16), (0.1, 1.22), (0.15, 1.35)];
    let ok = rows.iter().all(|&(e, f)| ec_factor(&ec, e) == f);
    report(2, "reconciliation table reproduced", ok, format!("{rows:?}"));
}

#[test]
fn c03_closed_forms() {
    // log2(1.19) at 30 digits
    let oracle = 0.250_961_573_533_218_8_f64;
    let ok = tau1(0.0) == 0.0
        && [0.5, 0.6, 0.9, 1.0].iter().all(|&e| tau1(e) == 1.0)
        && collision_prob_single(0.0) == 0.5
        && (tau1(0.05) - oracle).abs() < 1e-12;
    report(3, "closed-form spot checks", ok, format!("tau1(0.05) - log2(1.19) = {:e}", tau1(0.05) - oracle));
}

#[test]
fn c04_wcp_small_eta() {
    let eta = 1e-3;
    let start = Instant::now();
    let (mu, bound) = wcp_optimal_bound(eta).unwrap();
    let elapsed = start.elapsed();
    let bound_rel = bound / (0.25 * eta * eta) - 1.0;
    let mu_rel = mu / eta - 1.0;
    let ok = bound_rel.abs() < 0.10 && mu_rel.abs() < 0.02 && elapsed < Duration::from_millis(10);
    report(4, "weak-pulse small-eta law", ok, format!("mu/eta-1 = {mu_rel:.3e}, G/(eta²/4)-1 = {bound_rel:.3e}, {elapsed:?}"));
}

#[test]
fn c05_pdc_small_eta() {
    let eta = 1e-3;
    let (mu, bound) = pdc_optimal_bound(eta).unwrap();
    let (_, wcp) = wcp_optimal_bound(eta).unwrap();
    let mu_rel = mu / (0.5 * eta) - 1.0;
    let bound_rel = bound / (eta * eta / 8.0) - 1.0;
    let ratio = wcp / bound;
    let ok = mu_rel.abs() < 0.05 && bound_rel.abs() < 0.10 && (ratio / 2.0 - 1.0).abs() < 0.05;
    report(5, "downconversion small-eta law", ok, format!("mu/(eta/2)-1 = {mu_rel:.3e}, G/(eta²/8)-1 = {bound_rel:.3e}, ratio = {ratio:.5}"));
}

#[test]
fn c06_consistency_reduction() {
    let mut rng = StdRng::seed_from_u64(6);
    let ec = EcModel::brassard_salvail();
    let stats = PhotonStats { s0: 0.0, s1: 1.0, sm: 0.0, p_post: 1.0 };
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let e = rng.random_range(0.0..=0.5);
        let p_exp = rng.random_range(1e-9..=1.0);
        let click = ClickModel { p_signal: p_exp, p_dark: 0.0, p_exp, e };
        let multi = gain_multi(&stats, &click, &ec).unwrap().gain_raw;
        let single = gain_single(e, p_exp, &ec).unwrap().gain_raw;
        worst = worst.max((multi - single).abs());
    }
    report(6, "multi-photon formula reduces to single-photon", worst <= 1e-12, format!("max |diff| = {worst:e}"));
}

#[test]
fn c07_envelope_dominance() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let mu = 10f64.powf(rng.random_range(-4.0..0.5));
        let link = LinkBudget {
            alpha: rng.random_range(0.1..3.0),
            length: rng.random_range(0.0..150.0),
            receiver_loss: rng.random_range(0.0..10.0),
            eta_b: rng.random_range(0.05..=1.0),
            dark_b: 10f64.powf(rng.random_range(-9.0..-3.0)),
            c_align: rng.random_range(0.0..0.05),
        };
        let ec = if rng.random_bool(0.5) { EcModel::ShannonIdeal } else { EcModel::brassard_salvail() };
        let r = rate_point(&Source::Wcp(WcpSource::new(mu).unwrap()), &link, &ec).unwrap();
        worst = worst.max(r.gain_raw - 0.5 * r.p_post * (r.p_exp - r.sm));
    }
    report(7, "gain below multi-photon envelope", worst <= 1e-12, format!("max excess = {worst:e}"));
}

#[test]
fn c08_photon_number_splitting() {
    let mut rng = StdRng::seed_from_u64(8);
    let start = Instant::now();
    let mut rows = Vec::new();
    for n in 1..=pns::MAX_PHOTONS {
        let mut pols = Polarization::BB84.to_vec();
        for _ in 0..2 {
            pols.push(Polarization::Elliptic {
                theta: rng.random_range(0.0..PI / 2.0),
                phi: rng.random_range(0.0..2.0 * PI),
            });
        }
        rows.extend(pns::verify(n, &pols).unwrap().into_iter().filter(|c| c.n == n));
    }
    let elapsed = start.elapsed();
    let min_fid = rows.iter().map(|c| c.fidelity).fold(1.0, f64::min);
    let max_defect = rows.iter().map(|c| c.unitarity_defect).fold(0.0, f64::max);
    let ok = rows.len() == 36 && rows.iter().all(|c| c.passed()) && elapsed < Duration::from_secs(5);
    report(8, "photon-number splitting in the Fock space", ok, format!("{} cases, min fidelity 1-{:.1e}, unitarity defect {max_defect:.1e}, {elapsed:?}", rows.len(), 1.0 - min_fid));
}

#[test]
fn c09_sweep_reproduction() {
    for scenario in Scenario::presets() {
        // 60 dB of fiber loss is past the secure range of every preset
        let l_max = 60.0 / scenario.alpha;
        let config = SweepConfig {
            source: Source::Wcp(WcpSource::new(0.1).unwrap()),
            link: scenario.link(0.0),
            lengths: (0..200).map(|i| l_max * i as f64 / 199.0).collect(),
            mu_search: DEFAULT_MU_BRACKET,
            ec: EcModel::brassard_salvail(),
            with_bounds: true,
        };
        let start = Instant::now();
        let result = sweep(&config).unwrap();
        let elapsed = start.elapsed();

        let points: Vec<_> = result.rows.iter().map(|r| r.outcome.as_ref().unwrap().point).collect();
        let positive_start = points[0].gain_raw > 0.0;
        let nonincreasing = points.windows(2).all(|w| w[1].gain <= w[0].gain);
        let cutoff = result.max_secure_distance();
        let ordered = result.rows.iter().all(|r| {
            let p = r.outcome.as_ref().unwrap().point;
            let [b1, b2, b3] = r.bounds.unwrap();
            !p.secure || (b1 >= b2 && b2 >= b3 && b3 >= p.gain_raw)
        });
        let ok = positive_start && nonincreasing && cutoff.is_some() && ordered && elapsed < Duration::from_secs(5);
        report(
            9,
            &format!("sweep {}", scenario.name),
            ok,
            format!("G(0) = {:.4e}, zero gain from {:.1} km, bounds ordered: {ordered}, {elapsed:?}", points[0].gain_raw, cutoff.unwrap_or(f64::NAN)),
        );
    }
}

#[test]
fn c10_hoeffding_coverage() {
    let (n_tot, sm, delta, trials) = (10_000u64, 0.05, 0.01, 100_000);
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(10);
    let dist = Binomial::new(n_tot, sm).unwrap();
    let expected = sm * n_tot as f64;
    let inside = (0..trials)
        .filter(|_| (dist.sample(&mut rng) as f64 - expected).abs() <= delta * n_tot as f64)
        .count();
    let elapsed = start.elapsed();
    let empirical = inside as f64 / trials as f64;
    let guaranteed = hoeffding_confidence(n_tot, delta);
    let ok = empirical >= guaranteed && elapsed < Duration::from_secs(10);
    report(10, "Hoeffding coverage", ok, format!("empirical {empirical:.5} >= bound {guaranteed:.5}, {elapsed:?}"));
}
