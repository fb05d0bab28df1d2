// Temporary stress probe; larger dimensions than the acceptance envelope.
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use speclift::jordan::*;
use speclift::matrix::ComplexMatrix;
use speclift::*;

fn c(re: f64, im: f64) -> Complex64 { Complex64::new(re, im) }

fn main() {
    let cfg = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(999);
    let mut fails = 0; let mut total = 0;
    for n in 6..=8usize {
        for _case in 0..60 {
            let n1 = rng.gen_range(1..n);
            let parts = |m: usize, rng: &mut ChaCha8Rng| {
                let mut left = m; let mut p = vec![];
                while left > 0 { let take = rng.gen_range(1..=left); p.push(take); left -= take; }
                p
            };
            let layout = vec![
                (c(0.3, 0.1), parts(n1, &mut rng)),
                (c(-0.4, -0.3), parts(n - n1, &mut rng)),
            ];
            let wanted = JordanStructure::from_parts(&layout).unwrap();
            let model = wanted.model_matrix();
            let t = loop {
                let data: Vec<Complex64> = (0..n*n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                let t = ComplexMatrix::new(n, data).unwrap();
                if t.cond_2().is_some_and(|k| k <= 100.0) { break t; }
            };
            let a = t.mul(&model).unwrap().mul(&t.inverse().unwrap()).unwrap();
            total += 1;
            match jordan_structure(&a, &cfg) {
                Ok(got) if got.matches(&wanted, 1e-5) => {}
                Ok(got) => { fails += 1; println!("n={n} wrong {got:?} for {layout:?}"); }
                Err(e) => { fails += 1; println!("n={n} error {e} for {layout:?}"); }
            }
        }
    }
    println!("jordan recovery n=6..8: {}/{} ok", total - fails, total);
}
