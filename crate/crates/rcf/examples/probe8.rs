use rcf::formula::parse;
use rcf::qe::{Budget, Engine};

fn main() {
    let phi = |v: &str| format!("({v} + 5 < 0)");
    let dci1 = format!(
        "(exists x. (forall y. (y <= x -> {}))) /\\ (exists e. (e > 0 /\\ (forall x. ({} -> (forall y. ((x <= y /\\ y <= x + e) -> {})))))) -> (forall x. {})",
        phi("y"), phi("x"), phi("y"), phi("x")
    );
    let f = parse(&dci1).unwrap();
    let mut eng = Engine::new(Budget::default());
    match eng.qe_full(&f) {
        Ok(out) => println!("OK: {:?}", out.ground_eval()),
        Err(e) => println!("ERR: {e}"),
    }
}
