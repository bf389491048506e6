//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails other than the documented
//! `γ = d` dense boundary case.

mod common;

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use geomconc::asymptotics::{
    expected_count_exact, regime_experiment, strong_law_experiment, ExpectationOptions, Regime, RegimeOptions,
    RegimeSpec, RegimeTable, RhoRule,
};
use geomconc::components::{count_f, Selector};
use geomconc::concentration::{condition_check, empirical_tails, lemma_sweep, TailOptions, TailReport};
use geomconc::geometry::Shape;
use geomconc::intensity::{sample_poisson, IntensityModel, Window};
use geomconc::seed::{rng_from_seed, MeanAcc};
use geomconc::simulate::replicate_graphs;
use rayon::prelude::*;
use rayon::ThreadPoolBuilder;

const MINUTE: Duration = Duration::from_secs(60);

struct Verdict {
    id: &'static str,
    pass: bool,
    /// Failure that is analysed and expected.
    known: bool,
    /// Reported without a verdict.
    info: bool,
    limit: Option<Duration>,
    elapsed: Duration,
    detail: String,
}

impl Verdict {
    fn line(&self) -> String {
        let within = self.limit.is_none_or(|l| self.elapsed < l);
        let status = match (self.info, self.pass && within) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        let limit = self.limit.map_or(String::new(), |l| format!(" / limit {:.0?}", l));
        let known = if self.known { " [known failure]" } else { "" };
        format!("criterion {}: {status}{known} ({:.2?}{limit}) {}", self.id, self.elapsed, self.detail)
    }

    fn ok(&self) -> bool {
        self.pass && self.limit.is_none_or(|l| self.elapsed < l)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn criterion_1() -> Verdict {
    let (s, elapsed) = timed(|| lemma_sweep(1_000_000, 10.0, 50.0));
    Verdict {
        id: "1",
        pass: s.points == 1_000_000 && s.lemma_violations == 0 && s.rearrangement_violations == 0,
        known: false,
        info: false,
        limit: Some(Duration::from_secs(5)),
        elapsed,
        detail: format!(
            "{} points, violations {}+{}, max lhs/rhs {:.6}",
            s.points, s.lemma_violations, s.rearrangement_violations, s.max_lemma_ratio
        ),
    }
}

fn criterion_2() -> Verdict {
    let (stats, elapsed) = timed(|| {
        let parts: Vec<common::TrialStats> = (0..500u64).into_par_iter().map(common::difference_trial).collect();
        let mut all = common::TrialStats::default();
        for p in parts {
            all.merge(p);
        }
        all
    });
    Verdict {
        id: "2",
        pass: stats.violations.is_empty(),
        known: false,
        info: false,
        limit: Some(MINUTE),
        elapsed,
        detail: format!(
            "500 configurations, {} insertions, {} removals, {} rebuild oracles, {} violations{}",
            stats.probes,
            stats.removals,
            stats.oracle_checks,
            stats.violations.len(),
            stats.violations.first().map_or(String::new(), |v| format!(": {v}"))
        ),
    }
}

/// Each returns a verdict and a digest of its numerical output.
type Run = (Vec<Verdict>, String);

fn criterion_3() -> Run {
    let shape = Shape::euclidean(0.8, 2).unwrap();
    let (records, elapsed) = timed(|| {
        (0..200u64)
            .map(|seed| {
                let (m, w) = if seed % 2 == 0 {
                    (IntensityModel::homogeneous(1.0), Window::torus(2, 6.0).unwrap())
                } else {
                    (IntensityModel::radial_power(50.0, 2.0), Window::cube(2, 6.0).unwrap())
                };
                let cfg = sample_poisson(&m, &w, seed).unwrap();
                let mut rng = rng_from_seed(seed);
                let sel = common::random_selector(&mut rng, (seed / 2) as usize, 1 + (seed as usize / 6) % 4);
                condition_check(&cfg, &shape, &sel, &m, 2000, seed, None)
            })
            .collect::<Vec<_>>()
    });
    let errors = records.iter().filter(|r| r.is_err()).count();
    let failed: Vec<usize> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| !matches!(r, Ok(r) if r.satisfied && r.sum_within_kf && r.negative_mass_ok))
        .map(|(i, _)| i)
        .collect();
    let v = Verdict {
        id: "3",
        pass: failed.is_empty(),
        known: false,
        info: false,
        limit: Some(5 * MINUTE),
        elapsed,
        detail: format!("200 configurations, {} hard failures ({errors} errors) {failed:?}", failed.len()),
    };
    (vec![v], format!("{records:?}"))
}

fn benchmark() -> (IntensityModel<f64>, Window<f64>, Shape<f64>) {
    (IntensityModel::homogeneous(1.0), Window::torus(2, 10.0).unwrap(), Shape::euclidean(0.5, 2).unwrap())
}

/// `λV e^{−λπρ²}` at `λ = 1`, `V = 400`, `ρ = 1/2`.
const ISOLATED: f64 = 182.375_251_106_398_49;

fn criterion_4() -> (Run, f64) {
    let (m, w, s) = benchmark();
    let ((sim1, sim2, exact2), elapsed) = timed(|| {
        let counts = replicate_graphs(&m, &w, &s, 10_000, 4, |g| {
            Ok((count_f(g, &Selector::ExactlyK(1)), count_f(g, &Selector::ExactlyK(2))))
        })
        .unwrap();
        let (mut a1, mut a2) = (MeanAcc::default(), MeanAcc::default());
        for (c1, c2) in counts {
            a1.push(c1 as f64);
            a2.push(c2 as f64);
        }
        let opts = ExpectationOptions { samples: 1 << 18, seed: 44, ..Default::default() };
        let e2 = expected_count_exact(&m, &s, &Selector::ExactlyK(2), &w, &opts).unwrap();
        (a1, a2, e2)
    });
    let z1 = (sim1.mean() - ISOLATED).abs() / sim1.std_error();
    let se2 = (sim2.std_error().powi(2) + exact2.std_error.powi(2)).sqrt();
    let z2 = (sim2.mean() - exact2.value).abs() / se2;
    let v = Verdict {
        id: "4",
        pass: z1 <= 4.0 && z2 <= 4.0,
        known: false,
        info: false,
        limit: Some(5 * MINUTE),
        elapsed,
        detail: format!(
            "k=1: sim {:.4}±{:.4} vs {ISOLATED:.4} ({z1:.2} SE); k=2: sim {:.4}±{:.4} vs integral {:.4}±{:.4} ({z2:.2} SE)",
            sim1.mean(),
            sim1.std_error(),
            sim2.mean(),
            sim2.std_error(),
            exact2.value,
            exact2.std_error
        ),
    };
    let digest = format!("{:?} {:?} {:?}", sim1, sim2, exact2);
    ((vec![v], digest), exact2.value)
}

fn criterion_5(mean_pair: f64) -> Run {
    let (m, w, s) = benchmark();
    let (reports, elapsed) = timed(|| {
        [(1usize, ISOLATED), (2, mean_pair)].map(|(k, mean)| {
            let grid: Vec<f64> = (0..10).map(|i| i as f64 * 6.0 * mean.sqrt() / 9.0).collect();
            let opts = TailOptions { theoretical_mean: Some(mean), ..Default::default() };
            empirical_tails(&m, &w, &s, &Selector::ExactlyK(k), &grid, 10_000, 50 + k as u64, &opts)
        })
    });
    let ok = |r: &geomconc::Result<TailReport>| matches!(r, Ok(r) if r.all_dominated() && r.variance_ok());
    let mut detail = String::new();
    for (k, r) in reports.iter().enumerate() {
        match r {
            Ok(r) => {
                let _ = write!(
                    detail,
                    "k={}: dominated {} var {:.3} ≤ {:.3}; ",
                    k + 1,
                    r.all_dominated(),
                    r.sample_variance,
                    r.variance_bound
                );
            }
            Err(e) => {
                let _ = write!(detail, "k={}: {e}; ", k + 1);
            }
        }
    }
    let v = Verdict {
        id: "5",
        pass: reports.iter().all(ok),
        known: false,
        info: false,
        limit: Some(10 * MINUTE),
        elapsed,
        detail,
    };
    (vec![v], format!("{reports:?}"))
}

fn grid() -> Vec<f64> {
    (4..=14).map(|e| 2f64.powi(e)).collect()
}

fn unit_disc() -> Shape<f64> {
    Shape::euclidean(1.0, 2).unwrap()
}

fn spec(exponent: f64) -> RegimeSpec {
    RegimeSpec::new(grid(), RhoRule::power(1.0, exponent), 2).unwrap()
}

const REPS: usize = 200;

fn gap_detail(t: &RegimeTable) -> String {
    let last = t.rows.last().unwrap();
    format!(
        "constant {:.6}±{:.1e}, ratio at t={} is {:.4}±{:.4}",
        t.constant.value,
        t.constant.std_error,
        last.t,
        last.ratio,
        last.scaled_se / t.constant.value
    )
}

fn criterion_6() -> Run {
    let model = IntensityModel::radial_power(1.0, 3.0);
    let (table, elapsed) = timed(|| {
        regime_experiment(&spec(-0.7), &unit_disc(), &Selector::ExactlyK(2), &model, REPS, 1, &RegimeOptions::default())
    });
    let (pass, detail) = match &table {
        Ok(t) => {
            let bracket = t.rows.iter().all(|r| r.in_bracket());
            (
                t.regime == Regime::Sparse && t.final_gap() < 0.1 && bracket,
                format!("{}; bracket at every t: {bracket}", gap_detail(t)),
            )
        }
        Err(e) => (false, e.to_string()),
    };
    let v = Verdict { id: "6", pass, known: false, info: false, limit: Some(15 * MINUTE), elapsed, detail };
    (vec![v], format!("{table:?}"))
}

fn criterion_7() -> Run {
    let gamma3 = IntensityModel::radial_power(1.0, 3.0);
    let opts = RegimeOptions::default();
    let mut out = Vec::new();
    let mut digest = String::new();

    let (thermo, elapsed) =
        timed(|| regime_experiment(&spec(-0.5), &unit_disc(), &Selector::ExactlyK(2), &gamma3, REPS, 1, &opts));
    let (pass, detail) = match &thermo {
        Ok(t) => (matches!(t.regime, Regime::Thermodynamic { .. }) && t.final_gap() < 0.1, gap_detail(t)),
        Err(e) => (false, e.to_string()),
    };
    out.push(Verdict {
        id: "7 thermodynamic (k=2, tρ²=1)",
        pass,
        known: false,
        info: false,
        limit: Some(15 * MINUTE),
        elapsed,
        detail,
    });
    let _ = write!(digest, "{thermo:?}");

    // γk = d: the dense constant is infinite, and so is 𝔼F_t on the plane.
    let gamma2 = IntensityModel::radial_power(1.0, 2.0);
    let (dense2, elapsed) =
        timed(|| regime_experiment(&spec(-0.25), &unit_disc(), &Selector::ExactlyK(1), &gamma2, REPS, 1, &opts));
    let (pass, detail) = match &dense2 {
        Ok(t) => (t.final_gap() < 0.1, gap_detail(t)),
        Err(e) => (false, format!("{e}; the limit and 𝔼F_t are both infinite when γk = d")),
    };
    out.push(Verdict {
        id: "7 dense (γ=2, k=1, ρ=t^-1/4)",
        pass,
        known: !pass,
        info: false,
        limit: Some(15 * MINUTE),
        elapsed,
        detail,
    });
    let _ = write!(digest, "{dense2:?}");

    let (dense3, elapsed) =
        timed(|| regime_experiment(&spec(-0.25), &unit_disc(), &Selector::ExactlyK(1), &gamma3, REPS, 1, &opts));
    let (pass, detail) = match &dense3 {
        Ok(t) => (t.regime == Regime::Dense && t.final_gap() < 0.1, gap_detail(t)),
        Err(e) => (false, e.to_string()),
    };
    out.push(Verdict {
        id: "7 dense (γ=3, k=1, ρ=t^-1/4)",
        pass,
        known: false,
        info: false,
        limit: Some(15 * MINUTE),
        elapsed,
        detail,
    });
    let _ = write!(digest, "{dense3:?}");
    (out, digest)
}

fn criterion_8() -> Run {
    let gamma3 = IntensityModel::radial_power(1.0, 3.0);
    let opts = RegimeOptions::default();
    let cases = [("sparse", -0.7, 2usize), ("thermodynamic", -0.5, 2), ("dense γ=3", -0.25, 1)];
    let (tables, elapsed) = timed(|| {
        cases
            .iter()
            .map(|&(_, e, k)| {
                (100..103u64)
                    .map(|seed| {
                        strong_law_experiment(&spec(e), &unit_disc(), &Selector::ExactlyK(k), &gamma3, seed, &opts)
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    });
    let mut pass = true;
    let mut detail = String::new();
    for ((name, _, _), runs) in cases.iter().zip(&tables) {
        let _ = write!(detail, "{name}:");
        for r in runs {
            match r {
                Ok(t) if t.growth_ok => {
                    pass &= t.trend_ok();
                    let _ = write!(detail, " {:.3}>{:.3}", t.bottom_quartile_max, t.top_quartile_max);
                }
                Ok(t) => {
                    let _ = write!(
                        detail,
                        " growth condition fails ({:.3}, {:.3})",
                        t.bottom_quartile_max, t.top_quartile_max
                    );
                }
                Err(e) => {
                    pass = false;
                    let _ = write!(detail, " {e}");
                }
            }
        }
        detail.push_str("; ");
    }
    let mut out = vec![Verdict { id: "8", pass, known: false, info: false, limit: None, elapsed, detail }];

    let gamma2 = IntensityModel::radial_power(1.0, 2.0);
    let (boundary, elapsed) =
        timed(|| strong_law_experiment(&spec(-0.25), &unit_disc(), &Selector::ExactlyK(1), &gamma2, 100, &opts));
    let detail = match &boundary {
        Ok(t) => format!("informational: trend {}", t.trend_ok()),
        Err(e) => format!("informational, no limit constant: {e}"),
    };
    out.push(Verdict { id: "8 dense (γ=2)", pass: true, known: false, info: true, limit: None, elapsed, detail });
    let digest = format!("{tables:?} {boundary:?}");
    (out, digest)
}

fn criteria_3_to_8(print: bool) -> (Vec<Verdict>, Vec<String>) {
    let mut verdicts = Vec::new();
    let mut digests = Vec::new();
    let mut add = |(v, d): Run| {
        for x in v {
            if print {
                println!("{}", x.line());
            }
            verdicts.push(x);
        }
        digests.push(d);
    };
    add(criterion_3());
    let (run4, pair_mean) = criterion_4();
    add(run4);
    add(criterion_5(pair_mean));
    add(criterion_6());
    add(criterion_7());
    add(criterion_8());
    (verdicts, digests)
}

fn main() -> ExitCode {
    // `cargo test <filter>` passes the filter through; run only when it matches.
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !filters.is_empty() && !filters.iter().any(|f| "acceptance".contains(f.as_str())) {
        return ExitCode::SUCCESS;
    }
    let mut verdicts = Vec::new();
    for v in [criterion_1(), criterion_2()] {
        println!("{}", v.line());
        verdicts.push(v);
    }

    let pool = |n| ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let (main_verdicts, four) = pool(4).install(|| criteria_3_to_8(true));
    verdicts.extend(main_verdicts);
    println!("rerunning criteria 3-8 on one thread");
    let ((_, one), rerun) = timed(|| pool(1).install(|| criteria_3_to_8(false)));
    let differing: Vec<usize> = (0..four.len()).filter(|&i| four[i] != one[i]).map(|i| i + 3).collect();
    let v = Verdict {
        id: "9",
        pass: differing.is_empty(),
        known: false,
        info: false,
        limit: None,
        elapsed: rerun,
        detail: format!("outputs of criteria 3-8 bit-identical on 1 and 4 threads; differing: {differing:?}"),
    };
    println!("{}", v.line());
    verdicts.push(v);

    let unexpected: Vec<&str> = verdicts.iter().filter(|v| !v.ok() && !v.known).map(|v| v.id).collect();
    let known: Vec<&str> = verdicts.iter().filter(|v| !v.ok() && v.known).map(|v| v.id).collect();
    println!(
        "summary: {} criteria lines, unexpected failures {unexpected:?}, known failures {known:?}",
        verdicts.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
