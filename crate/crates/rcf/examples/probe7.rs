use rcf::formula::parse;
use rcf::qe::{Budget, Engine};
use std::time::Instant;

fn decide(text: &str) -> Result<String, String> {
    let f = parse(text).map_err(|e| e.to_string())?;
    let mut eng = Engine::new(Budget::default());
    match eng.qe_full(&f) {
        Ok(out) => out.ground_eval().map(|b| if b { "TRUE" } else { "FALSE" }.to_string())
            .ok_or_else(|| format!("open: {out}")),
        Err(e) => Err(e.to_string()),
    }
}

fn main() {
    // 10 one-variable semialgebraic hole formulas (hole variable h)
    let corpus = [
        "h < 0 \\/ h*h < 2",
        "h < 1",
        "h*h < 4",
        "h < -3",
        "h*h + 1 > 0",
        "h*h < 0",
        "2*h < 5",
        "h*h - 3*h + 2 < 0",
        "h < 1/2",
        "h + 5 < 0",
    ];
    let phi = |v: &str, idx: usize| corpus[idx].replace('h', v);
    let below_lt = |v: &str, idx: usize| format!("(forall y. (y < {v} -> {}))", phi("y", idx));
    let below_le = |v: &str, idx: usize| format!("(forall y. (y <= {v} -> {}))", phi("y", idx));

    let mut total = 0;
    let mut passed = 0;
    let t0 = Instant::now();
    for idx in 0..corpus.len() {
        let dci = format!(
            "(exists x. {}) /\\ (forall x. ({} -> (exists z. (z > x /\\ {})))) -> (forall x. {})",
            below_lt("x", idx), below_lt("x", idx), below_lt("z", idx), phi("x", idx)
        );
        let dci1 = format!(
            "(exists x. {}) /\\ (exists e. (e > 0 /\\ (forall x. ({} -> (forall y. ((x <= y /\\ y <= x + e) -> {})))))) -> (forall x. {})",
            below_le("x", idx), phi("x", idx), phi("y", idx), phi("x", idx)
        );
        let dci2 = format!(
            "(exists x. {}) /\\ (forall x. ({} -> (exists z. (z > x /\\ {})))) /\\ (forall x. ({} -> {})) -> (forall x. {})",
            below_le("x", idx), below_le("x", idx), below_lt("z", idx), below_lt("x", idx), phi("x", idx), phi("x", idx)
        );
        let dsup = format!(
            "(exists x. {}) /\\ (exists y. forall x. ({} -> x <= y)) -> (exists z. forall y. ((forall x. ({} -> x <= y)) <-> z <= y))",
            phi("x", idx), phi("x", idx), phi("x", idx)
        );
        let dinf = format!(
            "(exists x. {}) /\\ (exists y. forall x. ({} -> y <= x)) -> (exists z. forall y. ((forall x. ({} -> y <= x)) <-> y <= z))",
            phi("x", idx), phi("x", idx), phi("x", idx)
        );
        // D-Cut with psi(y) = y > 9
        let dcut = format!(
            "(exists x. exists y. ({} /\\ y > 9)) /\\ (forall x. forall y. (({} /\\ y > 9) -> x < y)) -> (exists z. forall x. forall y. (({} /\\ y > 9) -> (x <= z /\\ z <= y)))",
            phi("x", idx), phi("x", idx), phi("x", idx)
        );
        for (name, sentence) in [("dci", dci), ("dci1", dci1), ("dci2", dci2), ("dsup", dsup), ("dinf", dinf), ("dcut", dcut)] {
            total += 1;
            let t = Instant::now();
            match decide(&sentence) {
                Ok(v) if v == "TRUE" => { passed += 1; let ms = t.elapsed().as_millis(); if ms > 1000 { println!("SLOW {name}[{idx}] {ms} ms"); } }
                Ok(v) => println!("WRONG {name}[{idx}] -> {v}"),
                Err(e) => println!("ERR {name}[{idx}]: {e}"),
            }
        }
    }
    println!("{passed}/{total} scheme instances TRUE in {} s", t0.elapsed().as_secs());
}
