//! Acceptance checks 1-9. Runs as a plain binary (`harness = false`) so that the
//! per-criterion lines are always printed; exits non-zero if any check fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use kronecker_stab::atlas::{exceptional_phase, phi_k, ChartPoint};
use kronecker_stab::ksequence::{a_seq, closed_form, ratio_limits, slit_params};
use kronecker_stab::lifting::{lift_total, monodromy, orbit_loop, LiftError, LiftOptions};
use kronecker_stab::precise::Ctx;
use kronecker_stab::projective::{
    classify, fixed_points, g_power, removed_distance, same_integer_point, MobiusPSL2, ProjPoint,
};
use kronecker_stab::stability::{construct, sigma_minus1, validate};

type Check = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn strip_point(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..PI - 0.05))
}

/// `a_k` from the plain i128 recurrence.
fn a_oracle(n: u32, k: i64) -> i128 {
    let n = i128::from(n);
    let (mut prev, mut cur) = (0_i128, 1_i128);
    for _ in 1..k.unsigned_abs() {
        let next = n * cur - prev;
        prev = cur;
        cur = next;
    }
    match k {
        0 => 0,
        k if k < 0 => -cur,
        _ => cur,
    }
}

fn af(n: u32, k: i64) -> f64 {
    a_oracle(n, k) as f64
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    let t = Instant::now();
    for n in 1..=6 {
        for k in -200..=200 {
            let d = a_seq(n, k).pow(2) - a_seq(n, k + 1) * a_seq(n, k - 1);
            ensure(d.is_one(), || format!("determinant identity fails at n={n} k={k}"))?;
        }
    }
    let mut worst = 0.0_f64;
    for n in 3..=10 {
        for k in 0..=40 {
            let exact = a_seq(n, k).to_f64().unwrap();
            let approx = closed_form(n, k).map_err(|e| e.to_string())?;
            let err = if exact == 0.0 { approx.abs() } else { ((approx - exact) / exact).abs() };
            worst = worst.max(err);
        }
    }
    ensure(worst < 1e-10, || format!("closed form relative error {worst:e}"))?;
    // a_{k+1}/a_k decreases and a_k/a_{k+1} increases: both reduce to
    // a_{k+1}^2 > a_k a_{k+2}, checked exactly
    for k in 1..60 {
        let gap = a_seq(3, k + 1).pow(2) - a_seq(3, k) * a_seq(3, k + 2);
        ensure(gap > BigInt::from(0), || format!("ratios not monotone at k={k}"))?;
    }
    let (lo, hi) = ratio_limits(3).map_err(|e| e.to_string())?;
    let (a60, a61) = (a_seq(3, 60).to_f64().unwrap(), a_seq(3, 61).to_f64().unwrap());
    let (eu, ed) = ((a61 / a60 - hi).abs(), (a60 / a61 - lo).abs());
    ensure(eu < 1e-8 && ed < 1e-8, || format!("ratio limit errors {eu:e}, {ed:e} at k=60"))?;
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("runtime {secs:.2}s"))?;
    Ok(format!("closed form err {worst:.1e}, limit err {:.1e}, {secs:.2}s", eu.max(ed)))
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-PI..PI));
        let w = strip_point(&mut rng);
        let u = w.exp();
        let (z1, w1) = phi_k(1, 1, z, w).map_err(|e| e.to_string())?;
        let (z2, w2) = phi_k(1, 2, z, w).map_err(|e| e.to_string())?;
        let errs = [
            (z1 - (z + w)).norm(),
            (w1 - ((u - 1.0) / u).ln()).norm(),
            (z2 - (z + (u - 1.0).ln())).norm(),
            (w2 - (1.0 / (1.0 - u)).ln()).norm(),
        ];
        worst = errs.iter().fold(worst, |a, &b| a.max(b));
    }
    ensure(worst < 1e-12, || format!("max error {worst:e}"))?;
    Ok(format!("max error {worst:.1e}"))
}

/// The gluing identities in 192-bit arithmetic; the f64 error is reported
/// alongside since it grows like `a_k a_{k+1}` times the unit roundoff.
fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ctx = Ctx::default();
    let (mut worst_g, mut worst_chi, mut worst_f64) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..500 {
        let n = [1, 2, 3, 5][i % 4];
        let k = (i / 4) as i64 % 17 - 8;
        let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let w = strip_point(&mut rng);
        let (zh, wh) = (ctx.c(z), ctx.c(w));
        let (zk, wk) = ctx.phi_k(n, k, &zh, &wh);
        let (g0, g1) = ctx.g_k(n, k, &zk, &wk);
        let zw = ctx.add(&zh, &wh);
        let (e0, e1) = (ctx.exp(&zh), ctx.exp(&zw));
        let d0 = ctx.sub(&g0, &e0);
        let d1 = ctx.sub(&g1, &e1);
        let err = ctx.to_f64(&ctx.norm(&d0)).max(ctx.to_f64(&ctx.norm(&d1)));
        worst_g = worst_g.max(err);
        let p0 = ctx.chi(n, 0, &wh).map_err(|e| e.to_string())?;
        let wk2 = ctx.psi_k(n, k, &wh);
        let pk = ctx.chi(n, k, &wk2).map_err(|e| e.to_string())?;
        worst_chi = worst_chi.max(p0.chordal(&pk));
        // the same identity through the f64 maps
        if let Ok((zf, wf)) = phi_k(n, k, z, w) {
            if let Ok((a, b)) = kronecker_stab::atlas::g_k(n, k, zf, wf) {
                worst_f64 = worst_f64.max((a - z.exp()).norm().max((b - (z + w).exp()).norm()));
            }
        }
    }
    ensure(worst_g < 1e-11 && worst_chi < 1e-11, || {
        format!("g_k o phi_k err {worst_g:e}, chi gluing err {worst_chi:e}")
    })?;
    Ok(format!(
        "g_k o phi_k err {worst_g:.1e}, chi gluing err {worst_chi:.1e} (192-bit); f64 path reaches {worst_f64:.1e}"
    ))
}

fn criterion_4() -> Check {
    for n in 1..=6 {
        for k in -50..=50_i64 {
            let g = g_power(n, k);
            let expect = [-a_seq(n, k - 1), a_seq(n, k), -a_seq(n, k), a_seq(n, k + 1)];
            let got = [g.a.clone(), g.b.clone(), g.c.clone(), g.d.clone()];
            let neg: Vec<BigInt> = expect.iter().map(|x| -x).collect();
            ensure(got == expect || got[..] == neg[..], || format!("G^{k} differs for n={n}"))?;
            // G^{-k} [1:0] = [a_{k+1} : a_k]
            let img = g_power(n, -k).apply_exact(&(BigInt::one(), BigInt::from(0)));
            ensure(same_integer_point(&img, &(a_seq(n, k + 1), a_seq(n, k))), || {
                format!("puncture image differs at n={n} k={k}")
            })?;
        }
    }
    ensure(g_power(1, 3).is_identity() && !g_power(1, 1).is_identity(), || "G_1 has no order 3".into())?;
    let m = MobiusPSL2::new(0, 1, -1, 1).map_err(|e| e.to_string())?;
    ensure(m.compose(&m).compose(&m).is_identity(), || "(0,1;-1,1)^3 != id".into())?;
    let mut worst = 0.0_f64;
    for n in 1..=8 {
        let g = g_power(n, 1);
        let pts = fixed_points(n);
        ensure(pts.len() == if n == 2 { 1 } else { 2 }, || format!("fixed point count for n={n}"))?;
        for p in pts {
            worst = worst.max(g.apply(&p).chordal(&p));
            // [1 : l] with l^2 - n l + 1 = 0
            let l = p.ratio().ok_or("fixed point at infinity")?;
            worst = worst.max((l * l - l * f64::from(n) + 1.0).norm());
        }
    }
    ensure(worst < 1e-12, || format!("fixed point error {worst:e}"))?;
    Ok(format!("|k| <= 50 exact, fixed point err {worst:.1e}"))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    let mut cases = [0usize; 3];
    let random = |rng: &mut ChaCha8Rng| Complex64::from_polar(rng.gen_range(0.01..10.0), rng.gen_range(-PI..PI));
    for i in 0..10_000 {
        let n = rng.gen_range(1..=6);
        let (z0, z1) = match i % 50 {
            0 => (c(0.0, 0.0), random(&mut rng)),
            1 => (random(&mut rng), c(0.0, 0.0)),
            _ => (random(&mut rng), random(&mut rng)),
        };
        let case = usize::from(z0.norm() == 0.0) + 2 * usize::from(z1.norm() == 0.0);
        cases[case.min(2)] += 1;
        let rec = construct(n, z0, z1).map_err(|e| e.to_string())?;
        let report = validate(&rec);
        ensure(report.is_valid(), || format!("invalid record for n={n} ({z0}, {z1}): {:?}", report.violations))?;
        let (a, b) = rec.central_charge();
        worst = worst.max(((a - z0).norm() + (b - z1).norm()) / (z0.norm() + z1.norm()));
    }
    ensure(worst < 1e-12, || format!("reconstruction error {worst:e}"))?;
    ensure(cases.iter().all(|&k| k > 0), || format!("cases not all exercised: {cases:?}"))?;
    Ok(format!(
        "10000 valid, reconstruction err {worst:.1e}, cases both/z0=0/z1=0 = {}/{}/{}",
        cases[0], cases[1], cases[2]
    ))
}

fn criterion_6() -> Check {
    let mut worst_f64 = 0.0_f64;
    for n in 1..=4 {
        let s = sigma_minus1(n);
        let q = s.quotient().ok_or("sigma_-1 has no chart")?;
        ensure(q.in_overlap(), || format!("sigma_-1 not in the strip for n={n}"))?;
        let base = q.canonical();
        for k in -5..=5 {
            let rep = q.in_chart(k).map_err(|e| e.to_string())?.canonical();
            ensure(rep.k == base.k, || format!("canonical chart differs for n={n} k={k}"))?;
            worst_f64 = worst_f64.max((rep.w - base.w).norm());
        }
    }
    let mut ctx = Ctx::default();
    let mut worst_hp = 0.0_f64;
    for n in 1..=8 {
        let w0 = sigma_minus1(n).quotient().ok_or("sigma_-1 has no chart")?.w;
        let wh = ctx.c(w0);
        for k in -5..=5 {
            let wk = ctx.psi_k(n, k, &wh);
            let im = ctx.to_f64(&wk.im);
            ensure(im > 0.0 && im < PI, || format!("representative off the strip, n={n} k={k}"))?;
            let back = ctx.psi_k_inv(n, k, &wk);
            let d = ctx.sub(&back, &wh);
            worst_hp = worst_hp.max(ctx.to_f64(&ctx.norm(&d)));
        }
    }
    ensure(worst_f64 < 1e-11 && worst_hp < 1e-11, || format!("errors {worst_f64:e} (f64), {worst_hp:e} (192-bit)"))?;
    Ok(format!("n <= 4 f64 err {worst_f64:.1e}; n <= 8 192-bit err {worst_hp:.1e}"))
}

fn criterion_7() -> Check {
    let t = Instant::now();
    let opts = LiftOptions::default();
    let radius = 0.03;
    let mut notes = Vec::new();
    for (n, a, b) in [(1, 1.0, 1.0), (2, 2.0, 3.0)] {
        let center = ProjPoint::real(a, b).map_err(|e| e.to_string())?;
        let r = monodromy(n, &center, radius, None, &opts).map_err(|e| e.to_string())?;
        ensure(!r.closed_up && r.displacement > 1e-3, || {
            format!("loop around [{a}:{b}] for n={n} closes (displacement {:e})", r.displacement)
        })?;
        notes.push(format!("[{a}:{b}] n={n} disp {:.2}", r.displacement));
    }
    let band = ProjPoint::real(1.0, 1.0).map_err(|e| e.to_string())?;
    match monodromy(3, &band, radius, None, &opts) {
        Err(LiftError::RemovedPointOnPath { .. }) => {}
        other => return Err(format!("band loop for n=3 not rejected: {other:?}")),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut found, mut worst) = (0, 0.0_f64);
    while found < 20 {
        let n = 1 + (found % 3) as u32;
        let p = ProjPoint::new(c(1.0, 0.0), c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
            .map_err(|e| e.to_string())?;
        if !classify(n, &p, 1e-9).map_err(|e| e.to_string())?.is_regular() || removed_distance(n, &p, 200) < 2.0 * radius
        {
            continue;
        }
        let r = monodromy(n, &p, radius, None, &opts).map_err(|e| e.to_string())?;
        ensure(r.closed_up && r.displacement < 1e-8, || format!("regular loop at {p} (n={n}) opens: {:e}", r.displacement))?;
        worst = worst.max(r.displacement);
        found += 1;
    }
    let mut worst_orbit = 0.0_f64;
    for n in 1..=3 {
        let start = ChartPoint::new(n, 0, c(0.2, -0.4), c(0.3, 1.2)).map_err(|e| e.to_string())?;
        let (z0, z1) = start.charges();
        let report = lift_total(n, &orbit_loop(z0, z1, 256), &start, &opts).map_err(|e| e.to_string())?;
        let end = report.trace.last().ok_or("empty trace")?;
        let end = if end.k == 0 { *end } else { end.to_chart(0).map_err(|e| e.to_string())? };
        let dz = (end.z - start.z - c(0.0, 2.0 * PI)).norm();
        let dw = (end.w - start.w).norm();
        ensure(dz < 1e-11 && dw < 1e-11, || format!("orbit loop for n={n}: dz {dz:e}, dw {dw:e}"))?;
        worst_orbit = worst_orbit.max(dz.max(dw));
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("runtime {secs:.1}s"))?;
    Ok(format!(
        "{}; n=3 band rejected; 20 regular loops close (max {worst:.1e}); orbit err {worst_orbit:.1e}; {secs:.1}s",
        notes.join(", ")
    ))
}

/// For `n <= 2` the f64 phases are checked against the 1e-12 margin. For
/// `n >= 3` the true gap between `S_j` and `S_{j+1}` is `Im psi_j(w) / pi`, of
/// order `a_j^-2`, which is below 1e-12 at `|j| = 15`; there the strict
/// increase is checked in 192-bit arithmetic.
fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut notes = Vec::new();
    for n in 1..=2 {
        let mut margin = f64::INFINITY;
        for _ in 0..100 {
            let pt = ChartPoint::new(n, 0, c(0.0, rng.gen_range(-1.0..1.0)), strip_point(&mut rng))
                .map_err(|e| e.to_string())?;
            let ph: Vec<f64> = (-15..=15)
                .map(|j| exceptional_phase(n, j, &pt))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            margin = ph.windows(2).fold(margin, |m, p| m.min(p[1] - p[0]));
        }
        ensure(margin > 1e-12, || format!("n={n} margin {margin:e}"))?;
        notes.push(format!("n={n} margin {margin:.1e}"));
    }
    let mut ctx = Ctx::default();
    for n in 3..=5 {
        let mut margin = f64::INFINITY;
        for _ in 0..100 {
            let z = ctx.c(c(0.0, rng.gen_range(-1.0..1.0)));
            let w = ctx.c(strip_point(&mut rng));
            let ph: Vec<_> = (-15..=15).map(|j| ctx.exceptional_phase(n, j, &z, &w)).collect();
            for p in ph.windows(2) {
                margin = margin.min(ctx.to_f64(&ctx.sub_real(&p[1], &p[0])));
            }
        }
        ensure(margin > 0.0, || format!("n={n} phases not increasing (192-bit), margin {margin:e}"))?;
        notes.push(format!("n={n} margin {margin:.1e} (192-bit)"));
    }
    Ok(notes.join(", "))
}

fn render(n: u32, figure: &str) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_kstab"))
        .args(["render", "-n", &n.to_string(), "--figure", figure])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

/// `[x0 : x1] = [y0 : y1]` for integer points, compared exactly.
fn same_real(x: (f64, f64), y: (f64, f64)) -> bool {
    let r = |v: f64| v.round() as i128;
    r(x.0) * r(y.1) == r(x.1) * r(y.0)
}

fn criterion_9() -> Check {
    let kmax = 12;
    let mut samples = 0usize;
    let mut worst = 0.0_f64;
    for n in 1..=3_u32 {
        // slit abscissae
        let cn = render(n, "cn")?;
        let slits = cn["slits"].as_array().ok_or("no slits")?;
        if n == 1 {
            ensure(slits.len() == 1 && num(&slits[0]["x"]) == 0.0, || "n=1 slit".into())?;
        } else {
            let params = slit_params(n, kmax).map_err(|e| e.to_string())?;
            ensure(slits.len() == params.x.len(), || format!("n={n}: {} slits", slits.len()))?;
            for s in slits {
                let k = s["k"].as_i64().ok_or("slit without k")?;
                let x = num(&s["x"]);
                let kk = k.abs();
                let oracle = (af(n, kk) / af(n, kk + 1)).ln() * k.signum() as f64;
                ensure((x - params.x[&k]).abs() < 1e-9 && (x - oracle).abs() < 1e-9, || {
                    format!("slit k={k} at {x} for n={n}")
                })?;
            }
            if n > 2 {
                let (lo, _) = ratio_limits(n).map_err(|e| e.to_string())?;
                ensure((num(&cn["band"][0]) - lo.ln()).abs() < 1e-9, || "band end".into())?;
            }
        }
        // punctures
        let chi = render(n, "chi")?;
        let mut expect: Vec<(f64, f64)> = if n == 1 {
            vec![(0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
        } else {
            (-kmax..=kmax).map(|k| (af(n, k), af(n, k + 1))).collect()
        };
        if n == 2 {
            expect.push((1.0, 1.0));
        }
        let mut distinct: Vec<(f64, f64)> = Vec::new();
        for p in expect {
            if !distinct.iter().any(|&q| same_real(p, q)) {
                distinct.push(p);
            }
        }
        let marks: Vec<(f64, f64)> = chi["punctures"]
            .as_array()
            .ok_or("no punctures")?
            .iter()
            .map(|p| (num(&p["z0"]), num(&p["z1"])))
            .collect();
        ensure(marks.len() == distinct.len(), || format!("n={n}: {} marks, expected {}", marks.len(), distinct.len()))?;
        for m in &marks {
            ensure(distinct.iter().any(|&q| same_real(*m, q)), || format!("unexpected mark {m:?} for n={n}"))?;
        }
        if n > 2 {
            let (lo, hi) = ratio_limits(n).map_err(|e| e.to_string())?;
            let band = &chi["removed_band"];
            ensure((num(&band[0]) - lo).abs() < 1e-12 && (num(&band[1]) - hi).abs() < 1e-12, || "removed band".into())?;
        }
        for sheet in chi["sheets"].as_array().ok_or("no sheets")? {
            let k = sheet["chart"].as_i64().ok_or("sheet chart")?;
            let want = [(af(n, k + 1), af(n, k)), (af(n, k), af(n, k - 1))];
            for (p, w) in sheet["punctures"].as_array().ok_or("sheet punctures")?.iter().zip(want) {
                ensure(same_real((num(&p["z0"]), num(&p["z1"])), w), || format!("sheet {k} puncture for n={n}"))?;
            }
        }
        // chi re-substitution: [a_k u - a_{k+1} : a_{k-1} u - a_k]
        for curve in chi["curves"].as_array().ok_or("no curves")? {
            let k = curve["chart"].as_i64().ok_or("curve chart")?;
            for s in curve["samples"].as_array().ok_or("no samples")? {
                let u = c(num(&s["source"][0]), num(&s["source"][1])).exp();
                let x0 = u * af(n, k) - af(n, k + 1);
                let x1 = u * af(n, k - 1) - af(n, k);
                let pt = &s["point"];
                let y0 = c(num(&pt[0][0]), num(&pt[0][1]));
                let y1 = c(num(&pt[1][0]), num(&pt[1][1]));
                // chordal distance between [x0 : x1] and [y0 : y1]
                let cross = (x0 * y1 - x1 * y0).norm();
                let d = cross / ((x0.norm_sqr() + x1.norm_sqr()).sqrt() * (y0.norm_sqr() + y1.norm_sqr()).sqrt());
                worst = worst.max(d);
                samples += 1;
            }
        }
        // psi re-substitution
        let psi = render(n, "psi")?;
        for curve in psi["curves"].as_array().ok_or("no curves")? {
            let k = curve["chart"].as_i64().ok_or("curve chart")?;
            for s in curve["samples"].as_array().ok_or("no samples")? {
                let u = c(num(&s["source"][0]), num(&s["source"][1])).exp();
                let want = ((u * af(n, k + 1) - af(n, k)) / (u * af(n, k) - af(n, k - 1))).ln();
                let got = c(num(&s["image"][0]), num(&s["image"][1]));
                worst = worst.max((got - want).norm());
                samples += 1;
            }
        }
    }
    ensure(worst < 1e-9, || format!("re-substitution error {worst:e}"))?;
    Ok(format!("{samples} curve samples, max re-substitution err {worst:.1e}"))
}

fn main() {
    let checks: [(u32, &str, fn() -> Check); 9] = [
        (1, "sequence exactness", criterion_1),
        (2, "n=1 specialization", criterion_2),
        (3, "gluing coherence", criterion_3),
        (4, "Moebius structure", criterion_4),
        (5, "surjectivity construction", criterion_5),
        (6, "sigma_-1 consistency", criterion_6),
        (7, "covering behavior", criterion_7),
        (8, "phase monotonicity", criterion_8),
        (9, "figure reproduction", criterion_9),
    ];
    let mut failed = 0;
    for (id, name, check) in checks {
        match check() {
            Ok(detail) => println!("criterion {id} ({name}): PASS  {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {id} ({name}): FAIL  {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
