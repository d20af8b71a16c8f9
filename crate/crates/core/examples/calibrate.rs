//! Random on-curve coefficient sets: classifier arrangement vs the symbol of
//! the numerical slice. One JSON line per (set, side).
//!
//! cargo run --release --example calibrate -- <seed> <count> <h> <n_grid> [degenerate|predict]
use contact_caustic::caustic::{extract_symbol, slice_with, Side, SliceSettings};
use contact_caustic::classifier::{classify, with_shared_root};
use contact_caustic::model::{FrameField, NormalFormCoefficients};
use rand::{Rng, SeedableRng};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seed: u64 = args[1].parse().unwrap();
    let count: usize = args[2].parse().unwrap();
    let h: f64 = args[3].parse().unwrap();
    let n: usize = args[4].parse().unwrap();
    let mode = args.get(5).map(String::as_str).unwrap_or("");
    let degenerate = mode == "degenerate";
    // classifier only, no slices
    let predict_only = mode == "predict";
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    for _ in 0..count {
        let mut c = NormalFormCoefficients::default();
        loop {
            c.c31 = rng.random_range(-1.0..1.0);
            c.c32 = rng.random_range(-1.0..1.0);
            if c.c31.hypot(c.c32) > 0.3 {
                break;
            }
        }
        let s = 0.3;
        c.c421 = rng.random_range(-s..s);
        c.c422 = rng.random_range(-s..s);
        c.c423 = rng.random_range(-s..s);
        c.c442 = rng.random_range(-s..s);
        c.c443 = rng.random_range(-s..s);
        c.c444 = rng.random_range(-s..s);
        c.c445 = rng.random_range(-s..s);
        if degenerate {
            let root = rng.random_range(0..3);
            let free = rng.random_range(-3.0..3.0);
            c = with_shared_root(&c, true, root, free).unwrap();
        }
        let rep = classify(&c).unwrap();
        let field = FrameField::new(&c).unwrap();
        if predict_only {
            println!(
                "{}",
                serde_json::json!({ "coeffs": c, "plus": rep.arrangement_plus, "minus": rep.arrangement_minus,
                    "family_plus": rep.predicted_family_plus, "family_minus": rep.predicted_family_minus,
                    "symbol_plus": rep.predicted_symbol_plus, "symbol_minus": rep.predicted_symbol_minus })
            );
            continue;
        }
        for side in [Side::Plus, Side::Minus] {
            let settings = SliceSettings { n_grid: n, ..Default::default() };
            let out = match slice_with(&field, h, side, &settings) {
                Ok(sl) => {
                    let sym = extract_symbol(&sl);
                    serde_json::json!({
                        "cusps": sl.cusp_angles.len(),
                        "crossings": sl.crossings.len(),
                        "symbol": sym.as_ref().map(|s| s.to_string()).unwrap_or_else(|e| e.to_string()),
                        "name": sym.ok().and_then(|s| s.name()),
                        "cusp_angles": sl.cusp_angles,
                        "passages": sl.crossings.iter().map(|c| [c.phi_a, c.phi_b]).collect::<Vec<_>>(),
                    })
                }
                Err(e) => serde_json::json!({ "error": e.to_string() }),
            };
            let (fam, arr) = match side {
                Side::Plus => (&rep.predicted_family_plus, &rep.arrangement_plus),
                Side::Minus => (&rep.predicted_family_minus, &rep.arrangement_minus),
            };
            println!(
                "{}",
                serde_json::json!({ "coeffs": c, "side": side, "family": fam, "arrangement": arr,
                    "pred_cusps": rep.cusp_angles, "slice": out })
            );
        }
    }
}
