// scratch diagnostics; removed before release
use hharmonic::expansion::random_function;
use hharmonic::specfun::hyp::probe_branches;
use hharmonic::HHarmonicFunction;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut worst = (0.0f64, 0usize, 0usize, 0usize, 0.0f64);
    for &n in &[3usize, 5, 7] {
        for &m in &[1usize, 4, 17, 28, 60, 120, 250, 512] {
            for j in 0..2usize {
                for &u in &[0.9, 0.93, 0.96, 0.98, 0.99, 0.995, 0.999, 0.9999] {
                    if let Some((near, direct)) = probe_branches(n, m, j, u) {
                        let rel = ((near - direct) / direct).abs();
                        if rel > worst.0 {
                            worst = (rel, n, m, j, u);
                        }
                    }
                }
            }
        }
    }
    println!(
        "worst rel dev (j<=1): {:e} at n={} m={} j={} u={}",
        worst.0, worst.1, worst.2, worst.3, worst.4
    );

    // json roundtrip diff hunt
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let f = random_function(&mut rng, 3, 5, 2).unwrap();
    let text = f.to_json().unwrap();
    let g = HHarmonicFunction::from_json(&text).unwrap();
    println!("roundtrip diff: {:e}", f.max_coeff_diff(&g));
    let doc_f = f.to_document().unwrap();
    let doc_g = g.to_document().unwrap();
    for (bf, bg) in doc_f.blocks.iter().zip(&doc_g.blocks) {
        for (tf, tg) in bf.terms.iter().zip(&bg.terms) {
            if tf.a.to_bits() != tg.a.to_bits() {
                println!("coeff m={} differs: {:e} vs {:e}", bf.m, tf.a, tg.a);
            }
            for (k, (a, b)) in tf.pole.iter().zip(&tg.pole).enumerate() {
                if a.to_bits() != b.to_bits() {
                    println!("pole m={} comp {}: {:e} vs {:e}", bf.m, k, a, b);
                }
            }
        }
    }
}
