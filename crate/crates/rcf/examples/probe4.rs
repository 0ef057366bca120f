use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcf::formula::parse;
use rcf::qe::{Budget, Engine};
use std::time::Instant;

fn run(text: &str) -> (u128, String) {
    let f = parse(text).unwrap();
    let mut eng = Engine::new(Budget::default());
    let t = Instant::now();
    let r = eng.qe_full(&f);
    let v = match r {
        Ok(out) => out.ground_eval().map(|b| if b { "TRUE" } else { "FALSE" }.to_string())
            .unwrap_or_else(|| format!("open[{}]", out.size())),
        Err(e) => format!("ERR {e}"),
    };
    (t.elapsed().as_millis(), v)
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0u128;
    for i in 0..20 {
        let coeffs: Vec<i64> = (0..5).map(|_| rng.gen_range(-5..=5)).collect();
        let mut text = String::from("exists x. x^5");
        for (k, c) in coeffs.iter().enumerate() {
            let pow = 4 - k;
            if *c != 0 {
                let term = if pow == 0 { format!("{c}") } else if pow == 1 { format!("{c}*x") } else { format!("{c}*x^{pow}") };
                text.push_str(&format!(" + {term}"));
            }
        }
        text.push_str(" = 0");
        let (ms, v) = run(&text);
        worst = worst.max(ms);
        println!("{i:>2}: {ms:>6} ms  {v}  {text}");
    }
    println!("worst quintic: {worst} ms");
    // FALSE / hard cases
    for text in [
        "exists x. x^4 + 1 = 0",
        "exists x. x^4 - 5*x^2 + 4 = 0 /\\ x > 2",
        "exists x. x^4 + x^2 + 1 = 0",
        "forall x. x^4 - 5*x^2 + 4 > -3",
        "exists x. x^5 - 3*x + 1 = 0 /\\ x > 2",
        "forall x. x^4 + x^2 + 1 > 0",
        "exists x. x^5 + 4*x^4 - 2*x^3 + x - 3 = 0 /\\ x > 1 /\\ x < 2",
    ] {
        let (ms, v) = run(text);
        println!("{ms:>6} ms  {v}  {text}");
    }
}
