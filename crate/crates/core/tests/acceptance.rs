//! Acceptance suite. Each test prints one PASS/FAIL line to stderr
//! (bypassing the harness capture) and fails if its criterion fails.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use contact_caustic::caustic::{conjugate_time, extract_symbol, slice_with, Side, SliceSettings};
use contact_caustic::classifier::{
    abcd, classify, min_root_separation, normalized_resultant, p_tilde, phi_from_theta, resultant, t_tilde,
    trig_zeros, unit_roots, TOL_ANGLE, TOL_CIRCLE, TOL_RES,
};
use contact_caustic::cli::ScenarioConfig;
use contact_caustic::fitseries::{fit_with, uniform_grid, wedge_residual};
use contact_caustic::flow::{integrate, CotangentState, IntegratorSettings};
use contact_caustic::model::{heisenberg, FrameField, NormalFormCoefficients};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn criterion(n: u32, title: &str, body: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let result = body();
    let secs = start.elapsed().as_secs_f64();
    let line = match &result {
        Ok(d) => format!("criterion {n:>2} PASS  {title} ({d}; {secs:.1} s)\n"),
        Err(d) => format!("criterion {n:>2} FAIL  {title} ({d}; {secs:.1} s)\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(d) = result {
        panic!("criterion {n} failed: {d}");
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, || format!("took {:.1} s, limit {limit} s", elapsed.as_secs_f64()))
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn scenario(name: &str) -> ScenarioConfig {
    ScenarioConfig::load(&scenarios_dir().join(format!("{name}.json"))).unwrap()
}

// Closed-form Heisenberg geodesic, independent of the library's copy.
fn oracle(phi: f64, r: f64, t: f64) -> [f64; 6] {
    let (p, q) = (phi.cos(), phi.sin());
    let (s, c) = ((r * t).sin(), (r * t).cos());
    let x = (p * s + q * (1.0 - c)) / r;
    let y = (q * s - p * (1.0 - c)) / r;
    let w = (r * t - s) / (2.0 * r * r);
    [x, y, w, p * c + q * s - r * y / 2.0, q * c - p * s + r * x / 2.0, r]
}

#[test]
fn c01_heisenberg_conjugate_time() {
    criterion(1, "Heisenberg conjugate time is 2π/r", || {
        let start = Instant::now();
        let f = FrameField::new(&heisenberg()).unwrap();
        let s = IntegratorSettings::default();
        let mut worst: f64 = 0.0;
        for r in [0.5, 1.0, 2.0, 5.0, 10.0] {
            for phi in uniform_grid(8) {
                let tau = conjugate_time(&f, phi, r, &s).map_err(|e| e.to_string())?;
                worst = worst.max((tau * r / (2.0 * PI) - 1.0).abs());
            }
        }
        ensure(worst <= 1e-8, || format!("max relative error {worst:e}"))?;
        within(start.elapsed(), 10.0)?;
        Ok(format!("max relative error {worst:.1e}"))
    });
}

#[test]
fn c02_heisenberg_geodesics_and_collapse() {
    criterion(2, "Heisenberg geodesics match the closed form; slice collapses", || {
        let f = FrameField::new(&heisenberg()).unwrap();
        let s = IntegratorSettings::default();
        let mut worst: f64 = 0.0;
        for r in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
            for phi in [0.0, 0.9, 2.5, 4.4] {
                let arc = integrate(&f, CotangentState::initial(phi, r), 2.0 * PI / r, &s).map_err(|e| e.to_string())?;
                for (&t, st) in arc.times.iter().zip(&arc.states) {
                    let e = oracle(phi, r, t);
                    for (a, b) in st.to_array().iter().zip(e) {
                        worst = worst.max((a - b).abs());
                    }
                }
            }
        }
        ensure(worst <= 1e-9, || format!("sup error {worst:e}"))?;
        let settings = SliceSettings { n_grid: 512, ..Default::default() };
        let mut extent: f64 = 0.0;
        for side in [Side::Plus, Side::Minus] {
            let sl = slice_with(&f, 0.1, side, &settings).map_err(|e| e.to_string())?;
            extent = extent.max(sl.extent());
        }
        ensure(extent <= 1e-8, || format!("slice extent {extent:e}"))?;
        Ok(format!("sup error {worst:.1e}, slice extent {extent:.1e}"))
    });
}

#[test]
fn c03_conjugate_time_expansion() {
    criterion(3, "τ_conj − 2π/r is O(1/r³)", || {
        let start = Instant::now();
        let c = NormalFormCoefficients {
            c0: 0.4, c1: 0.2, c2: -0.1, c31: 0.3, c32: 0.2, c423: 0.3, c443: -0.2, ..Default::default()
        };
        let f = FrameField::new(&c).unwrap();
        let s = IntegratorSettings::default();
        let k = |r: f64| -> Result<f64, String> {
            let mut m: f64 = 0.0;
            for phi in uniform_grid(8) {
                let tau = conjugate_time(&f, phi, r, &s).map_err(|e| e.to_string())?;
                m = m.max((tau - 2.0 * PI / r).abs() * r.powi(3));
            }
            Ok(m)
        };
        let (k16, k32) = (k(16.0)?, k(32.0)?);
        let ratio = k16 / k32;
        ensure((0.5..=2.0).contains(&ratio), || format!("K(16) = {k16:e}, K(32) = {k32:e}"))?;
        within(start.elapsed(), 60.0)?;
        Ok(format!("K(16) = {k16:.3e}, K(32) = {k32:.3e}, ratio {ratio:.3}"))
    });
}

#[test]
fn c04_off_curve_four_cusps() {
    criterion(4, "off the curve every slice has 4 cusps", || {
        let start = Instant::now();
        let sets = [
            NormalFormCoefficients { c0: 0.1, ..Default::default() },
            NormalFormCoefficients { c0: 0.4, c2: -0.1, c31: 0.3, c32: 0.2, c421: 0.1, c443: -0.15, ..Default::default() },
            NormalFormCoefficients { c0: -0.2, c2: 0.3, c1: 0.15, c31: -0.4, c423: 0.2, c445: 0.1, ..Default::default() },
        ];
        let settings = SliceSettings::default();
        let mut n = 0;
        for c in &sets {
            let f = FrameField::new(c).unwrap();
            for h in [0.03, 0.05] {
                for side in [Side::Plus, Side::Minus] {
                    let sl = slice_with(&f, h, side, &settings).map_err(|e| e.to_string())?;
                    ensure(sl.cusp_angles.len() == 4, || format!("{c:?} h = {h} {side:?}: {} cusps", sl.cusp_angles.len()))?;
                    n += 1;
                }
            }
        }
        within(start.elapsed(), 120.0)?;
        Ok(format!("{n} slices"))
    });
}

#[test]
fn c05_on_curve_shipped_scenarios() {
    criterion(5, "shipped on-curve scenarios reproduce their declared symbols", || {
        let start = Instant::now();
        let mut seen = Vec::new();
        let mut degenerate_pair = false;
        for name in ["s1", "s2", "s3", "degenerate_s5"] {
            let cfg = scenario(name);
            let f = FrameField::new(&cfg.coefficients).unwrap();
            let report = classify(&cfg.coefficients).map_err(|e| e.to_string())?;
            let settings = SliceSettings { n_grid: cfg.n_grid, integrator: cfg.integrator(), ..Default::default() };
            let mut names = Vec::new();
            for side in [Side::Plus, Side::Minus] {
                let declared = cfg.expected.get(side).ok_or(format!("{name}: no declared symbol"))?;
                let sl = slice_with(&f, cfg.h, side, &settings).map_err(|e| e.to_string())?;
                ensure(sl.cusp_angles.len() == 6, || format!("{name} {side:?}: {} cusps", sl.cusp_angles.len()))?;
                let sym = extract_symbol(&sl).map_err(|e| e.to_string())?;
                let canonical = sym.canonical();
                ensure(canonical == declared.symbol().canonical(), || {
                    format!("{name} {side:?}: got {canonical}, declared {declared:?}")
                })?;
                ensure(report.family(side.sign()).contains(&declared), || {
                    format!("{name} {side:?}: {declared:?} not in family {:?}", report.family(side.sign()))
                })?;
                names.push(declared);
            }
            degenerate_pair |= names.iter().any(|s| s.is_degenerate()) && names.iter().any(|s| !s.is_degenerate());
            seen.push(format!("{name} {:?}/{:?}", names[0], names[1]));
        }
        for want in ["S1", "S2", "S3"] {
            ensure(seen.iter().any(|s| s.contains(want)), || format!("no scenario shows {want}"))?;
        }
        ensure(degenerate_pair, || "no degenerate pair".into())?;
        within(start.elapsed(), 600.0)?;
        Ok(seen.join(", "))
    });
}

fn s1_fits() -> (ScenarioConfig, contact_caustic::fitseries::SuspensionFit, contact_caustic::fitseries::SuspensionFit) {
    let cfg = scenario("s1");
    let f = FrameField::new(&cfg.coefficients).unwrap();
    let phis = uniform_grid(cfg.fit_grid);
    let fit = |side| fit_with(&f, side, &cfg.h_list, &phis, cfg.fit_degree, &cfg.integrator()).unwrap();
    let (fp, fm) = (fit(Side::Plus), fit(Side::Minus));
    (cfg, fp, fm)
}

#[test]
fn c06_side_equality() {
    criterion(6, "f3 and f4 agree across sides", || {
        let (_, fp, fm) = s1_fits();
        let mut parts = Vec::new();
        for l in [3usize, 4] {
            let d = fp.f(l).iter().zip(fm.f(l)).map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1])).fold(0.0, f64::max);
            let tol = 5.0 * fp.coefficient_tolerance[l - 3].max(fm.coefficient_tolerance[l - 3]);
            ensure(d <= tol, || format!("f{l}: difference {d:e} > {tol:e}"))?;
            parts.push(format!("f{l} {d:.2e} <= {tol:.2e}"));
        }
        Ok(parts.join(", "))
    });
}

#[test]
fn c07_wedge_identity() {
    criterion(7, "wedge identity on the S1 scenario", || {
        let (cfg, fp, fm) = s1_fits();
        let report = classify(&cfg.coefficients).map_err(|e| e.to_string())?;
        let w = wedge_residual(&fp, &fm, &report).map_err(|e| e.to_string())?;
        let steps = w.plus.zero_set_distance_steps.max(w.minus.zero_set_distance_steps);
        ensure(w.residual <= 0.05, || format!("residual {}", w.residual))?;
        ensure(steps <= 2.0, || format!("zero sets {steps} steps apart"))?;
        Ok(format!("residual {:.4}, zero sets within {steps:.2} steps", w.residual))
    });
}

#[test]
fn c08_displayed_coefficients() {
    criterion(8, "A, B, C, D reproduce the displayed examples exactly", || {
        let one = |f: fn(&mut NormalFormCoefficients)| {
            let mut c = NormalFormCoefficients::default();
            f(&mut c);
            abcd(&c)
        };
        let k = one(|c| c.c423 = 1.0);
        ensure(k.a_plus == 3.0 * PI && k.a_minus == -3.0 * PI, || format!("A± = {}, {}", k.a_plus, k.a_minus))?;
        ensure(k.b_plus == 35.0 / 8.0 && k.b_minus == 35.0 / 8.0, || format!("B± = {}, {}", k.b_plus, k.b_minus))?;
        let d = one(|c| c.c442 = 1.0).d;
        ensure(d == -36.0, || format!("D = {d}"))?;
        let c = one(|c| c.c443 = 1.0).c;
        ensure(c == 36.0, || format!("C = {c}"))?;
        Ok("exact".into())
    });
}

fn random_c(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

#[test]
fn c09_root_count_law() {
    criterion(9, "unit-root count is 2 or 4 and both root paths agree", || {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        let (mut twos, mut fours) = (0, 0);
        let mut worst: f64 = 0.0;
        let mut n = 0;
        while n < 1000 {
            let (mu, nu) = (random_c(&mut rng), random_c(&mut rng));
            if mu.norm() < 1e-3 {
                continue;
            }
            n += 1;
            let r = unit_roots(&p_tilde(mu, nu), TOL_CIRCLE).map_err(|e| e.to_string())?;
            ensure(!r.multiple, || format!("multiple root for μ = {mu}, ν = {nu}"))?;
            match r.angles.len() {
                2 => twos += 1,
                4 => fours += 1,
                k => return Err(format!("{k} unit roots for μ = {mu}, ν = {nu}")),
            }
            let mut phis: Vec<f64> = r.angles.iter().flat_map(|&t| phi_from_theta(t)).collect();
            phis.sort_by(f64::total_cmp);
            let direct = trig_zeros(2.0 * nu.re, -2.0 * nu.im, 2.0 * mu.re, -2.0 * mu.im).map_err(|e| e.to_string())?;
            ensure(direct.len() == phis.len(), || format!("{} trig zeros vs {} from roots", direct.len(), phis.len()))?;
            for (a, b) in direct.iter().zip(&phis) {
                worst = worst.max(contact_caustic::caustic::angle_distance(*a, *b));
            }
        }
        ensure(worst <= 1e-8, || format!("root paths differ by {worst:e}"))?;
        Ok(format!("{twos} with 2 roots, {fours} with 4; paths agree to {worst:.1e}"))
    });
}

#[test]
fn c10_resultant() {
    criterion(10, "resultant homogeneity and shared-root detection", || {
        let mut rng = rand::rngs::StdRng::seed_from_u64(10);
        // homogeneity: relative to the scale on every draw, to |Res| where well conditioned
        let (mut worst_scale, mut worst_rel): (f64, f64) = (0.0, 0.0);
        for _ in 0..200 {
            let (mu, nu, b) = (random_c(&mut rng), random_c(&mut rng), random_c(&mut rng));
            let (p, t) = (p_tilde(mu, nu), t_tilde(b));
            let r1 = resultant(&p, &t).map_err(|e| e.to_string())?;
            let scale = p.max_norm().powi(3) * t.max_norm().powi(4);
            for s in [2.0, 3.0] {
                let rs = resultant(&p_tilde(mu * s, nu * s), &t_tilde(b * s)).map_err(|e| e.to_string())?;
                let want = r1 * f64::powi(s, 7);
                let err = (rs - want).norm();
                worst_scale = worst_scale.max(err / (scale * f64::powi(s, 7)));
                if r1.norm() >= 1e-2 * scale {
                    worst_rel = worst_rel.max(err / want.norm());
                }
            }
        }
        ensure(worst_scale <= 1e-12 && worst_rel <= 1e-12, || {
            format!("homogeneity error {worst_scale:e} (scale), {worst_rel:e} (relative)")
        })?;
        // constructed shared roots
        let mut built = 0;
        while built < 100 {
            let (mu, b) = (random_c(&mut rng), random_c(&mut rng));
            if mu.norm() < 1e-2 || b.norm() < 1e-2 {
                continue;
            }
            let t = t_tilde(b);
            let theta = unit_roots(&t, TOL_CIRCLE).map_err(|e| e.to_string())?.angles[built % 3];
            let z0 = Complex64::from_polar(1.0, theta);
            let nu = Complex64::new(-(mu * z0 * z0).re, rng.random_range(-2.0..2.0)) * z0.conj();
            let p = p_tilde(mu, nu);
            let res = normalized_resultant(&p, &t).map_err(|e| e.to_string())?;
            let sep = min_root_separation(&unit_roots(&p, TOL_CIRCLE).map_err(|e| e.to_string())?.angles, &[theta]);
            ensure(res <= TOL_RES && sep <= TOL_ANGLE, || format!("constructed: res {res:e}, separation {sep:e}"))?;
            built += 1;
        }
        // random instances: small resultant exactly when a root is shared
        let mut agree = 0;
        for _ in 0..1000 {
            let (mu, nu, b) = (random_c(&mut rng), random_c(&mut rng), random_c(&mut rng));
            if mu.norm() < 1e-3 || b.norm() < 1e-3 {
                continue;
            }
            let (p, t) = (p_tilde(mu, nu), t_tilde(b));
            let res = normalized_resultant(&p, &t).map_err(|e| e.to_string())?;
            let sep = min_root_separation(
                &unit_roots(&p, TOL_CIRCLE).map_err(|e| e.to_string())?.angles,
                &unit_roots(&t, TOL_CIRCLE).map_err(|e| e.to_string())?.angles,
            );
            ensure((res <= TOL_RES) == (sep <= TOL_ANGLE), || format!("random: res {res:e}, separation {sep:e}"))?;
            agree += 1;
        }
        Ok(format!(
            "homogeneity {worst_scale:.1e} (scale) / {worst_rel:.1e} (relative); 100 constructed, {agree} random agree"
        ))
    });
}

#[test]
fn c11_determinism() {
    criterion(11, "validate output is byte-identical across thread counts", || {
        let cfg = scenarios_dir().join("s1.json");
        let run = |threads: &str| -> Result<Vec<u8>, String> {
            let out = std::env::temp_dir().join(format!("cc-determinism-{threads}-{}", std::process::id()));
            let o = Command::new(env!("CARGO_BIN_EXE_contact-caustic"))
                .args(["validate", "--threads", threads, "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
            let bytes = std::fs::read(out.join("validate.json")).map_err(|e| e.to_string())?;
            let _ = std::fs::remove_dir_all(out);
            Ok(bytes)
        };
        let (a, b) = (run("1")?, run("4")?);
        ensure(a == b, || "outputs differ".into())?;
        Ok(format!("{} bytes, 1 vs 4 threads", a.len()))
    });
}
