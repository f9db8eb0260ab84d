//! Self-check suites: each suite reruns the module's invariants against an
//! independent route (exhaustive enumeration, closed forms, or sampling)
//! and prints one line per check. Output is deterministic for a fixed seed.

use clap::{Args, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fracsim::boolfn::{noise_stability, spectrum_profile, BooleanFunction, StabilityMethod};
use fracsim::bounds::{
    entropy_sandwich_check, equal_split_is_maximal, hypercontractivity_check,
    maj_stability_sandwich, thm44_upper,
};
use fracsim::codes::{
    greedy_covering_code, krawtchouk, rac1_closed_form_bias, rac1_exhaustive_bias, BaseResource,
};
use fracsim::frac::{
    collision_probability, count_parity_agreement, exact_bias, mc_bias_sequential,
    parity_agreement_closed_form, sequences_enumerate, BlockProtocol, CollisionMode,
};
use fracsim::prbox::{fprrac, BoxPyramid, Party, PrBox};
use fracsim::quantum::bloch_to_state;
use fracsim::quantum::BlochVector;
use fracsim::Result;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Boolfn,
    Codes,
    Frac,
    Prbox,
    Bounds,
    All,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Check {
    name: &'static str,
    pass: bool,
    /// soft checks report but never fail the run
    soft: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check {
        name,
        pass,
        soft: false,
        detail,
    }
}

fn soft(name: &'static str, pass: bool, detail: String) -> Check {
    Check {
        name,
        pass,
        soft: true,
        detail,
    }
}

fn boolfn_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for k in 1..=10 {
        let f = BooleanFunction::uniform_random(k, rng)?;
        worst = worst.max((f.fourier_transform().parseval_sum() - 1.0).abs());
    }
    out.push(check(
        "boolfn/parseval",
        worst < 1e-10,
        format!("max |sum - 1| = {worst:.3e} over random k=1..10"),
    ));

    let mut worst = 0.0f64;
    for k in 1..=6 {
        let f = BooleanFunction::uniform_random(k, rng)?;
        for i in 0..=10 {
            let q = i as f64 / 10.0;
            let a = noise_stability(&f, q, StabilityMethod::Fourier)?;
            let b = noise_stability(&f, q, StabilityMethod::Exhaustive)?;
            worst = worst.max((a - b).abs());
        }
    }
    out.push(check(
        "boolfn/stability-two-routes",
        worst < 1e-10,
        format!("max |fourier - exhaustive| = {worst:.3e}"),
    ));

    let f = BooleanFunction::maj(5)?;
    let mut monotone = true;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=100 {
        let q = i as f64 / 100.0;
        let s = noise_stability(&f, q, StabilityMethod::Fourier)?;
        monotone &= s >= prev - 1e-12;
        prev = s;
    }
    out.push(check(
        "boolfn/stability-monotone",
        monotone,
        "MAJ_5 stability nondecreasing on q in [0, 1]".into(),
    ));

    let mut granular = true;
    for k in 1..=10 {
        let f = BooleanFunction::uniform_random(k, rng)?;
        granular &= spectrum_profile(&f).granular;
    }
    out.push(check(
        "boolfn/granularity",
        granular,
        "all coefficients are multiples of 2^(1-deg)".into(),
    ));

    let mut worst = 0.0f64;
    for i in 1..=4 {
        let f = BooleanFunction::dictator(4, i)?;
        for j in 0..=10 {
            let q = j as f64 / 10.0;
            let s = noise_stability(&f, q, StabilityMethod::Fourier)?;
            worst = worst.max((s - q).abs());
        }
    }
    out.push(check(
        "boolfn/dictator-stability",
        worst < 1e-12,
        format!("max |Stab_q[dict] - q| = {worst:.3e}"),
    ));

    Ok(out)
}

fn codes_suite(_rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let mut ok = true;
    for n in 1..=25 {
        for x in 0..=n {
            let expected = n as i64 - 2 * x as i64;
            ok &= krawtchouk(1, n, x)? == expected.into();
        }
    }
    out.push(check(
        "codes/krawtchouk-k1",
        ok,
        "K_1(x) = n - 2x for n <= 25".into(),
    ));

    let mut ok = true;
    for n in 2..=20usize {
        for k in 0..n {
            for x in 0..=n {
                let lhs = krawtchouk(k + 1, n, x)? * (k as i64 + 1);
                let mid = krawtchouk(k, n, x)? * (n as i64 - 2 * x as i64);
                let low = if k == 0 {
                    0.into()
                } else {
                    krawtchouk(k - 1, n, x)? * (n as i64 - k as i64 + 1)
                };
                ok &= lhs == mid - low;
            }
        }
    }
    out.push(check(
        "codes/krawtchouk-recurrence",
        ok,
        "(k+1)K_{k+1} = (n-2x)K_k - (n-k+1)K_{k-1} for n <= 20".into(),
    ));

    let mut ok = true;
    for b in 2..=8 {
        for r in 1..=2.min(b / 2) {
            let code = greedy_covering_code(b, r)?;
            ok &= code.verify_radius()? <= r;
        }
    }
    out.push(check(
        "codes/covering-radius",
        ok,
        "greedy codes verified by exhaustive sphere check, b <= 8".into(),
    ));

    let mut worst = 0.0f64;
    for b in (3..=11).step_by(2) {
        let exhaustive = rac1_exhaustive_bias(b)?;
        worst = worst.max((exhaustive - rac1_closed_form_bias(b)).abs());
    }
    out.push(check(
        "codes/rac1-closed-form",
        worst < 1e-12,
        format!("max gap vs exhaustive = {worst:.3e}, odd b <= 11"),
    ));

    let mut ok = true;
    for (n, k, d) in [(8usize, 2usize, 3usize), (10, 3, 4), (12, 4, 5), (9, 2, 0)] {
        let x = fracsim::boolfn::BitString::from_index(0, n);
        let y = fracsim::boolfn::BitString::from_index((1usize << d) - 1, n);
        let (dist, agree, _total) = count_parity_agreement(&x, &y, k)?;
        ok &= dist == d && agree == parity_agreement_closed_form(n, k, d)?;
    }
    out.push(check(
        "codes/parity-agreement",
        ok,
        "direct count matches (C(n,k) + K_k(d)) / 2".into(),
    ));

    Ok(out)
}

fn frac_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let _ = rng;

    let mut ok = true;
    for n in [8usize, 12, 16] {
        for blocks in [2usize, 4] {
            for k in 1..=3 {
                let exact = collision_probability(blocks, n, k, CollisionMode::Exact)?;
                let bound = collision_probability(blocks, n, k, CollisionMode::Bound)?;
                ok &= exact >= bound - 1e-12;
            }
        }
    }
    out.push(check(
        "frac/collision-exact-vs-bound",
        ok,
        "exact collision probability dominates the closed bound".into(),
    ));

    let f = BooleanFunction::xor(2)?;
    let p = BlockProtocol::new(BaseResource::RacSr, 8, 4, f)?;
    let report = exact_bias(&p, "xor2")?;
    let expected = collision_probability(4, 8, 2, CollisionMode::Exact)? * 0.25;
    let gap = (report.bias_avg - expected).abs();
    out.push(check(
        "frac/block-product-structure",
        gap < 1e-12,
        format!("bias = collision * Stab(xor2); gap {gap:.3e}"),
    ));

    let mut ok = true;
    for m in [2usize, 3] {
        let f = BooleanFunction::dictator(1, 1)?;
        let p = BlockProtocol::new(BaseResource::RacSr, 6, m, f)?;
        let report = exact_bias(&p, "dict1")?;
        let b = 6 / m;
        let base = fracsim::codes::rac1_sr(b)?.nominal_bias();
        // k = 1 never collides, so the block bias equals the base bias
        ok &= (report.bias_avg - base).abs() < 1e-12;
    }
    out.push(check(
        "frac/k1-reduces-to-base",
        ok,
        "single-index queries reproduce the base code bias".into(),
    ));

    let f = BooleanFunction::xor(2)?;
    let p = BlockProtocol::new(BaseResource::RacSr, 8, 4, f)?;
    let exact = exact_bias(&p, "xor2")?;
    let mc = mc_bias_sequential(&p, "xor2", 200_000, 7)?;
    let ci = mc.ci.unwrap_or(0.0);
    let gap = (mc.bias_avg - exact.bias_avg).abs();
    out.push(check(
        "frac/mc-matches-exact",
        gap <= 1.6 * ci,
        format!("|mc - exact| = {gap:.3e}, 99% ci = {ci:.3e}"),
    ));

    let seqs = sequences_enumerate(6, 3)?;
    let ok = seqs
        .iter()
        .enumerate()
        .all(|(i, s)| s.lexicographic_rank(6) == i)
        && seqs.len() as u128 == fracsim::frac::sequence_count(6, 3);
    out.push(check(
        "frac/sequence-rank",
        ok,
        "lexicographic rank inverts enumeration order on S_6^3".into(),
    ));

    Ok(out)
}

fn prbox_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let mut ok = true;
    for a in 0..2u8 {
        for b in 0..2u8 {
            for _ in 0..50 {
                let mut pr = PrBox::new();
                let x = pr.use_box(Party::Alice, a, rng)?;
                let y = pr.use_box(Party::Bob, b, rng)?;
                ok &= x ^ y == a & b;
            }
        }
    }
    out.push(check(
        "prbox/xor-correlation",
        ok,
        "outputs satisfy a XOR b = x AND y on every input pair".into(),
    ));

    let mut counts = [0u32; 2];
    for _ in 0..20_000 {
        let mut pr = PrBox::new();
        counts[pr.use_box(Party::Alice, 1, rng)? as usize] += 1;
    }
    let dev = (counts[0] as f64 - 10_000.0).abs();
    // 4 sigma for 20k fair coin flips
    out.push(check(
        "prbox/uniform-marginal",
        dev < 4.0 * (20_000f64 * 0.25).sqrt(),
        format!("count deviation {dev:.0} of 4-sigma limit"),
    ));

    let mut ok = true;
    for l in 0..=3usize {
        let size = 1usize << l;
        for db_bits in 0..(1u32 << size) {
            let db: Vec<u8> = (0..size).map(|i| ((db_bits >> i) & 1) as u8).collect();
            for idx in 0..size {
                let mut pyr = BoxPyramid::new(l)?;
                let y = pyr.encode(&db, rng)?;
                let got = pyr.decode(idx, y, rng)?;
                ok &= got == db[idx];
                ok &= pyr.bob_uses() == l;
            }
        }
    }
    out.push(check(
        "prbox/pyramid-exhaustive",
        ok,
        "every database and address decodes correctly for depth <= 3".into(),
    ));

    let mut ok = true;
    let f = BooleanFunction::xor(2)?;
    for xi in 0..8usize {
        let x = fracsim::boolfn::BitString::from_index(xi, 3);
        for s in fracsim::frac::sequences_enumerate(3, 2)? {
            let (got, audit) = fprrac(&x, &f, &s, rng)?;
            let want = f.eval(&x.select(s.indices()))?;
            ok &= got == want && audit.correct && audit.bits_sent == 1;
        }
    }
    out.push(check(
        "prbox/fprrac-certain",
        ok,
        "n=3, k=2 XOR queries all decode exactly with one sent bit".into(),
    ));

    Ok(out)
}

fn bounds_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let sandwich = entropy_sandwich_check();
    out.push(check(
        "bounds/entropy-sandwich",
        sandwich.is_ok(),
        "1 - 4t^2 <= H(1/2 + t) <= 1 - (2/ln 2) t^2 on a 1001-point grid".into(),
    ));

    let grid: Vec<f64> = (0..=19).map(|i| i as f64 * 0.05).collect();
    let points = maj_stability_sandwich(9, &grid)?;
    let lower_ok = points.iter().all(|p| p.lower_ok);
    let upper_ok = points.iter().all(|p| p.upper_ok);
    out.push(check(
        "bounds/maj-arcsin-lower",
        lower_ok,
        "(2/pi) asin q <= Stab_q[MAJ_9]".into(),
    ));
    out.push(soft(
        "bounds/maj-arcsin-upper",
        upper_ok,
        "Stab_q[MAJ_9] <= (2/pi) asin q + 1/(sqrt(1-q^2) sqrt(k))".into(),
    ));

    let mut ok = true;
    for _ in 0..20 {
        let values: Vec<_> = (0..8)
            .map(|_| {
                let v = BlochVector::random_unit(rng);
                bloch_to_state(&v).map(|d| d.matrix().clone())
            })
            .collect::<Result<_>>()?;
        ok &= hypercontractivity_check(&values, 3, 1, 0.4)?.pass;
    }
    out.push(check(
        "bounds/hypercontractivity",
        ok,
        "20 random single-qubit encodings, n=3, delta=0.4".into(),
    ));

    let mut ok = true;
    for n in 4..=12usize {
        for m in 2..=3.min(n) {
            ok &= equal_split_is_maximal(n, m)?;
        }
    }
    out.push(check(
        "bounds/equal-split",
        ok,
        "equal block sizes maximize the trade-off, n <= 12, m <= 3".into(),
    ));

    let mut ok = true;
    for k in [1usize, 2, 3] {
        let f = BooleanFunction::xor(k)?;
        let mut prev = 0.0f64;
        // m fixed, n shrinking, so the ratio m/n and the bound both grow
        for n in [48usize, 24, 12] {
            let u = thm44_upper(&f, n, 4, fracsim::bounds::DEFAULT_ETA)?;
            ok &= u >= prev - 1e-12;
            prev = u;
        }
    }
    out.push(check(
        "bounds/upper-monotone",
        ok,
        "upper bound nondecreasing in m/n for XOR".into(),
    ));

    Ok(out)
}

pub fn run(args: &VerifyArgs) -> Result<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut checks = Vec::new();
    let all = args.suite == Suite::All;
    if all || args.suite == Suite::Boolfn {
        checks.extend(boolfn_suite(&mut rng)?);
    }
    if all || args.suite == Suite::Codes {
        checks.extend(codes_suite(&mut rng)?);
    }
    if all || args.suite == Suite::Frac {
        checks.extend(frac_suite(&mut rng)?);
    }
    if all || args.suite == Suite::Prbox {
        checks.extend(prbox_suite(&mut rng)?);
    }
    if all || args.suite == Suite::Bounds {
        checks.extend(bounds_suite(&mut rng)?);
    }
    let mut hard_failures = 0;
    for c in &checks {
        let status = match (c.pass, c.soft) {
            (true, _) => "PASS",
            (false, true) => "SOFT-FAIL",
            (false, false) => "FAIL",
        };
        if !c.pass && !c.soft {
            hard_failures += 1;
        }
        println!("{status:<9} {:<32} {}", c.name, c.detail);
    }
    println!("{} checks, {} hard failures", checks.len(), hard_failures);
    Ok(if hard_failures > 0 { 1 } else { 0 })
}
