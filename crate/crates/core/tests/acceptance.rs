//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use smhc::channel::{check_invariants, extract_syndrome, logical_label};
use smhc::code::{build_original_code, build_subsystem_code, CodeSpec, Family};
use smhc::decoders::{
    bd_log_slope, bd_logical_rate, evaluate_decoder, exhaustive_map_table, BlockMapDecoder,
    CachedDecoder, Decoder, EvalResult, MdDecoder,
};
use smhc::gf2::{BitMatrix, BitVec};
use smhc::nn::{generate_dataset, train, MlpSpec, TrainConfig};

use common::{random_batch, with_random_biases, worst_gradient_error, GRAD_RTOL};

const BD_RTOL: f64 = 1e-12;
const BD_SLOPE_TOL: f64 = 0.05;
const SLOPE_R2: (f64, f64) = (2.0, 0.3);
const SLOPE_R3: (f64, f64) = (4.0, 0.6);
const SUBSYSTEM_CROSSING: (f64, f64) = (0.01, 0.04);
const ORIGINAL_CROSSING: (f64, f64) = (0.04, 0.10);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    for r in 1..=4usize {
        let code = build_subsystem_code(r).unwrap();
        let pow = |b: usize| b.pow(r as u32);
        let rank_z = BitMatrix::from_rows(code.n(), code.z_stabilizers()).unwrap().rank();
        let rank_x = BitMatrix::from_rows(code.n(), code.x_stabilizers()).unwrap().rank();
        let checks = code.x_checks().len() + code.z_checks().len();
        let ok = code.n() == pow(4)
            && code.num_logicals() == pow(2)
            && code.x_gauge().len() == pow(4) + pow(2) - 2 * pow(3)
            && code.x_gauge().len() == [0, 2, 18, 110][r - 1]
            && rank_z + rank_x == 2 * (pow(3) - pow(2))
            && rank_z + rank_x == [2, 10, 38, 130][r - 1]
            && checks == 2 * r * pow(4) / 4
            && code.x_checks().iter().chain(code.z_checks()).all(|c| c.weight() == 4)
            && code.x_logicals().iter().chain(code.z_logicals()).all(|l| l.weight() == pow(2));
        if !ok {
            bad.push(format!("subsystem r={r}"));
        }
        let original = build_original_code(r).unwrap();
        let rank = BitMatrix::from_rows(original.n(), original.z_stabilizers()).unwrap().rank()
            + BitMatrix::from_rows(original.n(), original.x_stabilizers()).unwrap().rank();
        if rank != pow(4) - pow(2) || rank != [2, 12, 56, 240][r - 1] {
            bad.push(format!("original r={r}"));
        }
    }
    outcome(bad.is_empty(), format!("levels 1..4 both families; mismatches: {bad:?}"))
}

/// Least weight of an error with trivial syndrome and nontrivial label.
fn distance_oracle(code: &CodeSpec) -> usize {
    let n = code.n();
    (1u64..1 << n)
        .filter_map(|e| {
            let ev = BitVec::from_u64(e, n);
            let trivial = extract_syndrome(code, &ev).unwrap().is_zero();
            (trivial && !logical_label(code, &ev).unwrap().is_zero()).then_some(e.count_ones() as usize)
        })
        .min()
        .unwrap()
}

fn criterion_2() -> Outcome {
    let c1 = build_subsystem_code(1).unwrap();
    let c2 = build_subsystem_code(2).unwrap();
    let (d1, d2) = (distance_oracle(&c1), distance_oracle(&c2));
    let (l1, l2) = (c1.distance_by_enumeration().unwrap(), c2.distance_by_enumeration().unwrap());
    outcome(
        d1 == 2 && d2 == 4 && l1 == d1 && l2 == d2,
        format!("d(r=1)={d1}, d(r=2)={d2} over 2^16 patterns; library {l1}, {l2}"),
    )
}

fn criterion_3() -> Outcome {
    let mut bad = 0;
    let mut total = 0;
    for r in 2..=3 {
        let code = build_subsystem_code(r).unwrap();
        for (i, stab) in code.z_stabilizers().iter().enumerate() {
            total += 1;
            let idx = code.compose_stabilizer_from_checks(i).unwrap();
            let mut acc = BitVec::zeros(code.n());
            for &c in &idx {
                acc.xor_assign(&code.z_checks()[c]);
            }
            if idx.len() != 1 << (r - 1) || &acc != stab {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{total} stabilizers at r=2,3, {bad} wrong"))
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in [0.01f64, 0.04, 0.1] {
        // Direct sum of the weight >= 2 binomial terms.
        let direct: f64 = (2..=16u32)
            .map(|w| {
                let c = (0..w).fold(1.0, |acc, i| acc * (16 - i) as f64 / (i + 1) as f64);
                c * p.powi(w as i32) * (1.0 - p).powi(16 - w as i32)
            })
            .sum();
        let closed = 1.0 - (1.0 - p).powi(16) - 16.0 * p * (1.0 - p).powi(15);
        let got = bd_logical_rate(2, p);
        worst = worst.max(((got - direct) / direct).abs()).max(((closed - direct) / direct).abs());
    }
    let slopes: Vec<f64> = (1..=4).map(|r| bd_log_slope(r, 1e-4)).collect();
    let slopes_ok = slopes
        .iter()
        .enumerate()
        .all(|(i, s)| (s - (1u32 << i) as f64).abs() <= BD_SLOPE_TOL);
    outcome(
        worst < BD_RTOL && slopes_ok,
        format!("max relative error {worst:.2e}; slopes at p=1e-4 {slopes:.4?}"),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let code = build_subsystem_code(2).unwrap();
    let mut mismatches = 0;
    let mut ties = 0;
    for p in [0.01, 0.04, 0.1] {
        let oracle = exhaustive_map_table(&code, p).unwrap();
        let dec = BlockMapDecoder::new(&code, p).unwrap();
        for s in 0..32u64 {
            let a = oracle.decision(s);
            let b = dec.decode(&BitVec::from_u64(s, 5));
            ties += a.tie_broken as usize;
            if a.label != b.label || a.tie_broken != b.tie_broken {
                mismatches += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && secs < 60.0,
        format!("96 decisions, {mismatches} mismatches, {ties} ties, {secs:.2}s"),
    )
}

fn show(r: &EvalResult) -> String {
    format!("{:.5} [{:.5}, {:.5}]", r.rate, r.ci_low, r.ci_high)
}

fn criterion_6() -> Outcome {
    let (p, shots) = (0.04, 1_000_000);
    let code = build_subsystem_code(2).unwrap();
    let cfg = TrainConfig {
        p_train: p,
        num_samples: 1 << 20,
        seed: 3,
        ..TrainConfig::default()
    };
    let start = Instant::now();
    let data = generate_dataset(&code, p, cfg.num_samples, 1).unwrap();
    let (net, report) = train(&MlpSpec::for_level(2, 2).unwrap(), &cfg, &data).unwrap();
    let train_secs = start.elapsed().as_secs_f64();
    let nn = evaluate_decoder(&CachedDecoder::new(net), &code, p, shots, 99).unwrap();
    let map = evaluate_decoder(
        &CachedDecoder::new(BlockMapDecoder::new(&code, p).unwrap()),
        &code,
        p,
        shots,
        99,
    )
    .unwrap();
    let bd = bd_logical_rate(2, p);
    let ordered = map.ci_high < nn.ci_low && nn.ci_high < bd;
    let loss_down = report.final_loss() < report.initial_loss();
    outcome(
        ordered && loss_down && train_secs < 1800.0,
        format!(
            "blockmap {} < nn {} < bd {bd:.5}; 2^20 samples, loss {:.4} -> {:.4}, trained in {train_secs:.0}s",
            show(&map),
            show(&nn),
            report.initial_loss(),
            report.final_loss()
        ),
    )
}

/// Least-squares slope of ln(rate) on ln(p), each point weighted by its
/// error count (the inverse variance of ln(rate) up to O(1/errors)).
fn weighted_slope(points: &[(f64, EvalResult)]) -> (f64, f64) {
    let rows: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|(p, r)| (p.ln(), r.rate.ln(), r.errors as f64 * (1.0 - r.rate)))
        .collect();
    let sw: f64 = rows.iter().map(|r| r.2).sum();
    let mx = rows.iter().map(|r| r.2 * r.0).sum::<f64>() / sw;
    let my = rows.iter().map(|r| r.2 * r.1).sum::<f64>() / sw;
    let sxx: f64 = rows.iter().map(|r| r.2 * (r.0 - mx).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| r.2 * (r.0 - mx) * (r.1 - my)).sum();
    (sxy / sxx, (1.0 / sxx).sqrt())
}

fn criterion_7() -> Outcome {
    let grid = [(3e-3, 10_000_000u64), (5e-3, 4_000_000), (1e-2, 2_000_000)];
    let mut pass = true;
    let mut detail = Vec::new();
    for (r, (target, tol)) in [(2, SLOPE_R2), (3, SLOPE_R3)] {
        let code = build_subsystem_code(r).unwrap();
        let points: Vec<(f64, EvalResult)> = grid
            .iter()
            .map(|&(p, shots)| {
                let dec = CachedDecoder::new(BlockMapDecoder::new(&code, p).unwrap());
                (p, evaluate_decoder(&dec, &code, p, shots, 7).unwrap())
            })
            .collect();
        let (slope, se) = weighted_slope(&points);
        pass &= (slope - target).abs() <= tol;
        let rates: Vec<String> = points.iter().map(|(p, r)| format!("{p}:{:.3e}", r.rate)).collect();
        detail.push(format!("r={r} slope {slope:.3} ± {se:.3} (want {target} ± {tol}) [{}]", rates.join(" ")));
    }
    outcome(pass, detail.join("; "))
}

struct Curve {
    grid: Vec<f64>,
    low: Vec<EvalResult>,
    high: Vec<EvalResult>,
}

impl Curve {
    fn run(family: Family, grid: &[f64], shots: u64, md: bool) -> Self {
        let eval = |r: usize| -> Vec<EvalResult> {
            let code = smhc::code::build_code(family, r).unwrap();
            grid.iter()
                .map(|&p| {
                    let dec: Box<dyn Decoder> = if md {
                        Box::new(CachedDecoder::new(MdDecoder::new(&code).unwrap()))
                    } else {
                        Box::new(CachedDecoder::new(BlockMapDecoder::new(&code, p).unwrap()))
                    };
                    evaluate_decoder(dec.as_ref(), &code, p, shots, 11).unwrap()
                })
                .collect()
        };
        Self {
            grid: grid.to_vec(),
            low: eval(2),
            high: eval(3),
        }
    }

    /// Level 3 beats level 2 at the first grid point and loses at the last,
    /// both outside the intervals; the crossing is interpolated in ln p on the
    /// first sign change of the rate difference.
    fn crossing(&self) -> (bool, Option<f64>) {
        let last = self.grid.len() - 1;
        let below = self.high[0].ci_high < self.low[0].ci_low;
        let above = self.high[last].ci_low > self.low[last].ci_high;
        let diff: Vec<f64> = self.high.iter().zip(&self.low).map(|(h, l)| h.rate - l.rate).collect();
        let star = (0..last).find(|&i| diff[i] < 0.0 && diff[i + 1] >= 0.0).map(|i| {
            let t = diff[i] / (diff[i] - diff[i + 1]);
            (self.grid[i].ln() + t * (self.grid[i + 1].ln() - self.grid[i].ln())).exp()
        });
        (below && above, star)
    }

    fn describe(&self) -> String {
        self.grid
            .iter()
            .zip(self.low.iter().zip(&self.high))
            .map(|(p, (l, h))| format!("{p}:{:.4}/{:.4}", l.rate, h.rate))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn criterion_8() -> Outcome {
    let sub = Curve::run(
        Family::Subsystem,
        &[0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04],
        40_000,
        false,
    );
    let orig = Curve::run(
        Family::Original,
        &[0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10],
        40_000,
        true,
    );
    let (sub_bracket, sub_star) = sub.crossing();
    let (orig_bracket, orig_star) = orig.crossing();
    let within = |s: Option<f64>, (lo, hi): (f64, f64)| s.is_some_and(|s| (lo..=hi).contains(&s));
    outcome(
        sub_bracket && orig_bracket && within(sub_star, SUBSYSTEM_CROSSING) && within(orig_star, ORIGINAL_CROSSING),
        format!(
            "subsystem blockmap p* = {sub_star:.4?} [r2/r3 {}]; original md p* = {orig_star:.4?} [r2/r3 {}]",
            sub.describe(),
            orig.describe()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut failures = Vec::new();
    for family in [Family::Subsystem, Family::Original] {
        for r in 1..=4 {
            let code = smhc::code::build_code(family, r).unwrap();
            if let Err(e) = code.validate().and_then(|_| check_invariants(&code, 200, r as u64)) {
                failures.push(format!("{family} r={r}: {e}"));
            }
            if r <= 3 {
                if let Err(e) = BlockMapDecoder::new(&code, 0.03) {
                    failures.push(format!("{family} r={r} blockmap: {e}"));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("structural and channel invariants at levels 1..4, composition maps at 1..3; failures: {failures:?}"),
    )
}

fn criterion_10() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..5u64 {
        let dims = [4 + seed as usize, 8, 6, 5, 2 + seed as usize % 3];
        let net = with_random_biases(&MlpSpec::new(1, &dims, seed).unwrap(), 100 + seed);
        let (x, y) = random_batch(16, dims[0], dims[4], 200 + seed);
        worst = worst.max(worst_gradient_error(&net, &x, &y, 5, 300 + seed));
    }
    outcome(worst < GRAD_RTOL, format!("five random networks, worst relative error {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, run) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        failed += !o.pass as usize;
        println!(
            "criterion {n}: {} ({:.1}s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
