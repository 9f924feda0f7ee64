//! Acceptance checks, one line per criterion. Exits nonzero if any fails.

use num_rational::Ratio;
use occuthresh::cycles::{census_correlation, census_sweep, markov_trace_delta, poisson_gof};
use occuthresh::instances::{expected_redundant_exact, Configuration, Params};
use occuthresh::moments::{
    first_moment_exact, hessian_det_formula, hessian_phi2, joint_moment_exact, moment_report, phi2,
    second_moment_asymptotic, second_moment_exact_ratio, threshold_dstar, variance_explained, OverlapPoint,
};
use occuthresh::sdpi::{contraction_generic, contraction_occupation, verify_k4};
use occuthresh::{Channel, Pmf};
use rand::{Rng, SeedableRng};
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

type Check = Result<String, String>;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_occuthresh"))
}

fn run_cli(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("occuthresh-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_1() -> Check {
    let out = run_cli(&["threshold", "--k", "4"]);
    ensure(out.status.success(), "threshold --k 4 failed")?;
    let table: toml::Table = toml::from_str(&String::from_utf8_lossy(&out.stdout)).map_err(|e| e.to_string())?;
    let d = table["d_star"].as_float().ok_or("no d_star")?;
    ensure((d - 2.826778).abs() <= 5e-6, format!("d* = {d}"))?;
    let start = Instant::now();
    let reps = 1000;
    for _ in 0..reps {
        std::hint::black_box(threshold_dstar::<f64>(std::hint::black_box(4)).map_err(|e| e.to_string())?);
    }
    let per_call = start.elapsed() / reps;
    ensure(per_call < Duration::from_millis(1), format!("{per_call:?} per call"))?;
    Ok(format!("d* = {d:.9}, {per_call:?} per call"))
}

/// Every wiring of (n, d, k) = (4, 2, 4) by Heap's algorithm.
fn for_each_permutation(len: usize, mut visit: impl FnMut(&[u32])) {
    let mut a: Vec<u32> = (0..len as u32).collect();
    let mut c = vec![0usize; len];
    visit(&a);
    let mut i = 0;
    while i < len {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn criterion_2() -> Check {
    let (n, d, k, r) = (4usize, 2usize, 4usize, 2usize);
    let m = d * n / k;
    let mut total = 0i64;
    let (mut sz, mut sz2, mut szx, mut sred) = (0i64, 0i64, 0i64, 0i64);
    for_each_permutation(d * n, |w| {
        total += 1;
        // tally[a][i] = multiplicity of the edge between variable i and constraint a
        let mut mult = vec![vec![0i64; n]; m];
        for (v, &f) in w.iter().enumerate() {
            mult[f as usize / k][v / d] += 1;
        }
        let mut z = 0i64;
        for x in 0u32..(1 << n) {
            let ok = (0..m).all(|a| (0..n).map(|i| mult[a][i] * ((x >> i) & 1) as i64).sum::<i64>() == r as i64);
            z += ok as i64;
        }
        let x1: i64 = mult.iter().flatten().map(|&c| c * (c - 1) / 2).sum();
        let sets: Vec<Vec<usize>> = (0..m).map(|a| (0..n).filter(|&i| mult[a][i] > 0).collect()).collect();
        let mut red = 0;
        for a in 0..m {
            for b in a + 1..m {
                if sets[a].len() == k && sets[a] == sets[b] {
                    red += 1;
                }
            }
        }
        sz += z;
        sz2 += z * z;
        szx += z * x1;
        sred += red;
    });
    ensure(total == 40320, format!("{total} permutations"))?;
    let ez = Ratio::new(sz, total);
    let ratio = Ratio::new(sz2, total) / (ez * ez);
    let ezx = Ratio::new(szx, total);
    let ered = Ratio::new(sred, total);
    ensure(ez == Ratio::new(108, 35), format!("E[Z] = {ez}"))?;
    ensure(ratio == Ratio::new(35, 27), format!("ratio = {ratio}"))?;
    ensure(ezx == Ratio::new(144, 35), format!("E[Z X1] = {ezx}"))?;
    ensure(ered == Ratio::new(8, 35), format!("E[redundant] = {ered}"))?;

    let p = Params::new(n, d, k, r).map_err(|e| e.to_string())?;
    let as_f = |q: Ratio<i64>| *q.numer() as f64 / *q.denom() as f64;
    let pairs = [
        ("E[Z]", first_moment_exact::<f64>(&p).map(|v| v.ln()), ez),
        ("ratio", second_moment_exact_ratio::<f64>(&p).map(|v| v.ln()), ratio),
        ("E[Z X1]", joint_moment_exact::<f64>(&p, 1).map(|v| v.ln()), ezx),
        ("E[redundant]", expected_redundant_exact::<f64>(&p).map(|v| v.ln()), ered),
    ];
    for (name, got, want) in pairs {
        let got = got.map_err(|e| e.to_string())?.exp();
        ensure(rel(got, as_f(want)) <= 1e-12, format!("{name}: {got} vs {want}"))?;
    }
    Ok(format!("over 40320 wirings: E[Z] = {ez}, ratio = {ratio}, E[Z X1] = {ezx}, E[red] = {ered}"))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut gaps = Vec::new();
    for n in [20usize, 40, 80] {
        let rep = moment_report(4, 2, Some(n), 1, false).map_err(|e| e.to_string())?;
        let exact = first_moment_exact::<f64>(&Params::new(n, 2, 4, 2).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .ln();
        gaps.push((exact - rep.ln_ez_asymptotic.unwrap()).abs());
    }
    ensure(gaps[1] <= 0.1, format!("gap at n = 40 is {}", gaps[1]))?;
    ensure(gaps[0] > gaps[1] && gaps[1] > gaps[2], format!("gaps {gaps:?} not decreasing"))?;
    let target = 1.5f64.sqrt();
    let mut dist = Vec::new();
    let mut last = 0.0;
    for n in [500usize, 1000, 2000] {
        let p = Params::new(n, 2, 4, 2).map_err(|e| e.to_string())?;
        last = second_moment_exact_ratio::<f64>(&p).map_err(|e| e.to_string())?.ln().exp();
        dist.push((last - target).abs());
    }
    ensure(rel(last, target) <= 0.1, format!("ratio at n = 2000 is {last}"))?;
    ensure(dist[0] > dist[1] && dist[1] > dist[2], format!("distances {dist:?} not decreasing"))?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), format!("took {took:?}"))?;
    Ok(format!("E[Z] log-gaps {gaps:.4?}; ratio at n = 2000 is {last:.5} vs {target:.5}; {took:.2?}"))
}

const CYCLE_SEED: u64 = 1;

fn criterion_4() -> Check {
    let p = Params::new(400, 3, 4, 2).map_err(|e| e.to_string())?;
    let samples = census_sweep(&p, 10_000, 2, CYCLE_SEED, None).map_err(|e| e.to_string())?;
    let gof = poisson_gof(&samples, 4, 3).map_err(|e| e.to_string())?;
    let (m1, m2, v1) = (gof[0].empirical_mean, gof[1].empirical_mean, gof[0].empirical_var);
    let corr = census_correlation(&samples, 1, 2);
    ensure((m1 - 3.0).abs() <= 3.0 * (3.0f64 / 1e4).sqrt(), format!("mean X1 = {m1}"))?;
    ensure((m2 - 9.0).abs() <= 3.0 * (9.0f64 / 1e4).sqrt(), format!("mean X2 = {m2}"))?;
    ensure(rel(v1, 3.0) <= 0.1, format!("Var X1 = {v1}"))?;
    ensure(corr.abs() <= 0.05, format!("corr = {corr}"))?;
    Ok(format!("mean X1 = {m1:.4}, mean X2 = {m2:.4}, Var X1 = {v1:.4}, corr = {corr:.4}"))
}

fn criterion_5() -> Check {
    for k in 4..=12usize {
        for l in 1..=10usize {
            let got = markov_trace_delta::<f64>(l, k);
            let want = (-1.0 / (k as f64 - 1.0)).powi(l as i32);
            ensure((got - want).abs() <= 1e-12, format!("k = {k}, l = {l}: {got} vs {want}"))?;
        }
    }
    let ve = variance_explained::<f64>(4, 2, 60).map_err(|e| e.to_string())?;
    let want = 1.5f64.sqrt().ln();
    ensure((ve.partial_sum - want).abs() <= 1e-12, format!("partial sum {}", ve.partial_sum))?;
    let asym = second_moment_asymptotic(4, 2.0f64).map_err(|e| e.to_string())?;
    ensure(rel(ve.partial_sum.exp(), asym.value) <= 1e-12, "exp(partial sum) differs from the asymptotic ratio")?;
    Ok(format!("partial sum {:.15} vs {want:.15}", ve.partial_sum))
}

fn criterion_6() -> Check {
    let h = hessian_phi2(4, 2.0f64).map_err(|e| e.to_string())?;
    ensure((h.h11 - 11.0).abs() <= 1e-12 && (h.h12 + 9.0).abs() <= 1e-12 && (h.h22 - 9.0).abs() <= 1e-12, format!("{h:?}"))?;
    let det = hessian_det_formula(4, 2.0f64).map_err(|e| e.to_string())?;
    ensure((h.det() - 18.0).abs() <= 1e-12 && (det - 18.0).abs() <= 1e-12, format!("det {} vs {det}", h.det()))?;
    let s = OverlapPoint::<f64>::star(4);
    let f = |a: f64, b: f64| phi2(&OverlapPoint::main(s.w1 + a, s.w2 + b), 4, 2.0).unwrap();
    let e = 1e-3;
    let f0 = f(0.0, 0.0);
    let fd = [
        ((f(e, 0.0) - 2.0 * f0 + f(-e, 0.0)) / (e * e), h.h11),
        ((f(e, e) - f(e, -e) - f(-e, e) + f(-e, -e)) / (4.0 * e * e), h.h12),
        ((f(0.0, e) - 2.0 * f0 + f(0.0, -e)) / (e * e), h.h22),
    ];
    for (num, exact) in fd {
        ensure(rel(num, exact) <= 1e-4, format!("finite difference {num} vs {exact}"))?;
    }
    Ok(format!("H = ({}, {}, {}), det = {det}", h.h11, h.h12, h.h22))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let s = contraction_occupation(4, 200, 1e-10f64).map_err(|e| e.to_string())?;
    let d_star = 2f64.ln() / 6f64.ln();
    ensure((s.sup - d_star).abs() <= 1e-4, format!("sup = {}", s.sup))?;
    ensure((s.argmax_w1 - 1.0).abs() <= 1e-3 && (s.argmax_w2 - 1.0).abs() <= 1e-3, format!("argmax ({}, {})", s.argmax_w1, s.argmax_w2))?;
    let c = verify_k4(100_000, 1e-13f64).map_err(|e| e.to_string())?;
    ensure(c.w_bar > 0.108 && c.w_bar < 0.1087, format!("w_bar = {}", c.w_bar))?;
    ensure((c.r_plus_at_w_bar - 0.380).abs() <= 1e-3, format!("R+(w_bar) = {}", c.r_plus_at_w_bar))?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), format!("took {took:?}"))?;
    Ok(format!(
        "sup = {:.6} at ({}, {}), w_bar = {:.6}, R+(w_bar) = {:.5}, {took:.2?}",
        s.sup, s.argmax_w1, s.argmax_w2, c.w_bar, c.r_plus_at_w_bar
    ))
}

fn criterion_8() -> Check {
    let p = Pmf::new(vec![0.2, 0.3, 0.5]).map_err(|e| e.to_string())?;
    let id = contraction_generic(&p, &Channel::identity(3), 60, 1e-10).map_err(|e| e.to_string())?;
    ensure((id.d_star - 1.0).abs() <= 1e-9, format!("identity: {}", id.d_star))?;
    let constant = Channel::from_column_major(2, 3, vec![0.3, 0.7, 0.3, 0.7, 0.3, 0.7]).map_err(|e| e.to_string())?;
    let c = contraction_generic(&p, &constant, 60, 1e-10).map_err(|e| e.to_string())?;
    ensure(c.d_star.abs() <= 1e-12, format!("constant: {}", c.d_star))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let col = |rng: &mut rand_chacha::ChaCha8Rng| {
            let v: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 0.01).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(move |x| x / s)
        };
        let data: Vec<f64> = (0..3).flat_map(|_| col(&mut rng)).collect();
        let pv: Vec<f64> = col(&mut rng).collect();
        let w = Channel::from_column_major(3, 3, data).map_err(|e| e.to_string())?;
        let ps = Pmf::new(pv).map_err(|e| e.to_string())?;
        let r = contraction_generic(&ps, &w, 30, 1e-8).map_err(|e| e.to_string())?;
        ensure(r.d_star >= 0.0 && r.d_star <= 1.0 + 1e-9, format!("random channel: {}", r.d_star))?;
        worst = worst.max(r.d_star);
    }
    Ok(format!("identity {:.12}, constant {:e}, random max {worst:.6}", id.d_star, c.d_star))
}

const SAT_SEED: &str = "1";

fn sat_fractions(csv: &str) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect()
}

fn criterion_9() -> Check {
    let mut report = Vec::new();
    for d in ["2", "3"] {
        let out = run_cli(&["satprob", "--k", "4", "--d", d, "--n", "8,16,24", "--trials", "200", "--seed", SAT_SEED]);
        ensure(out.status.success(), format!("satprob d = {d} failed: {}", String::from_utf8_lossy(&out.stderr)))?;
        let f = sat_fractions(&String::from_utf8_lossy(&out.stdout));
        ensure(f.len() == 3, "expected three rows")?;
        if d == "2" {
            ensure(f.iter().all(|&x| x >= 0.9), format!("d = 2 fractions {f:?}"))?;
        } else {
            ensure(f[0] > f[1] && f[1] > f[2], format!("d = 3 fractions {f:?} not strictly decreasing"))?;
        }
        report.push(format!("d = {d}: {f:?}"));
    }
    Ok(report.join("; "))
}

fn criterion_10() -> Check {
    // CLI reruns of the stochastic commands at two thread counts.
    let jobs: [(&str, Vec<&str>); 3] = [
        ("sat2", vec!["satprob", "--k", "4", "--d", "2", "--n", "8,16,24", "--trials", "200", "--seed", SAT_SEED]),
        ("sat3", vec!["satprob", "--k", "4", "--d", "3", "--n", "8,16,24", "--trials", "200", "--seed", SAT_SEED]),
        ("cyc", vec!["cycles", "--k", "4", "--d", "3", "--n", "400", "--samples", "2000", "--l-max", "3", "--seed", "1"]),
    ];
    for (name, args) in &jobs {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "4"] {
            let path = scratch(&format!("{name}-{threads}-{}.csv", outputs.len()));
            let mut full: Vec<&str> = args.clone();
            let p = path.to_str().unwrap().to_string();
            full.extend(["--threads", threads, "--out"]);
            let out = bin().args(&full).arg(&p).output().expect("binary runs");
            ensure(out.status.success(), format!("{name} failed"))?;
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), format!("{name}: outputs differ across reruns"))?;
    }
    // The full cycle sample of criterion 4 under different pool sizes.
    let p = Params::new(400, 3, 4, 2).map_err(|e| e.to_string())?;
    let sweep = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| census_sweep(&p, 10_000, 2, CYCLE_SEED, None).unwrap())
    };
    ensure(sweep(1) == sweep(3), "cycle census depends on the thread count")?;
    // Sampling itself is a pure function of the seed.
    let a = occuthresh::instances::sample_configuration(&p, 99);
    let b = occuthresh::instances::sample_configuration(&p, 99);
    ensure(Configuration::wiring(&a) == Configuration::wiring(&b), "sampling not reproducible")?;
    Ok("satprob and cycles outputs byte-identical across reruns and thread counts 1/4; census identical for 1/3 threads".into())
}

fn main() {
    // Under `cargo test -- --list` the harness must not run anything.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(u32, fn() -> Check); 10] = [
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
    let mut failed = 0;
    for (id, check) in criteria {
        let start = Instant::now();
        match check() {
            Ok(msg) => println!("[PASS] criterion {id}: {msg} ({:.2?})", start.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] criterion {id}: {msg} ({:.2?})", start.elapsed());
            }
        }
    }
    let _ = std::fs::remove_dir_all(std::env::temp_dir().join(format!("occuthresh-acceptance-{}", std::process::id())));
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
