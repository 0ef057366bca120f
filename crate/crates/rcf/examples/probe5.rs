use rcf::formula::parse;
use rcf::qe::{Budget, Engine};
use std::time::Instant;

fn run(label: &str, text: &str) {
    let f = parse(text).unwrap();
    let mut eng = Engine::new(Budget::default());
    let t = Instant::now();
    match eng.qe_full(&f) {
        Ok(out) => {
            let v = out.ground_eval().map(|b| if b { "TRUE" } else { "FALSE" }.to_string())
                .unwrap_or_else(|| format!("open[{}]", out.size()));
            println!("{:>7} ms  {v:<8} {label}", t.elapsed().as_millis());
        }
        Err(e) => println!("{:>7} ms  ERR {e}  {label}", t.elapsed().as_millis()),
    }
}

fn main() {
    let phi = "(y < 0 \\/ y*y < 2)";
    let phi_x = "(x < 0 \\/ x*x < 2)";
    let below = |v: &str| format!("(forall y. (y < {v} -> {phi}))");
    let h1 = format!("(exists x. {})", below("x"));
    let h2 = format!("(forall x. ({} -> (exists z. (z > x /\\ {}))))", below("x"), below("z"));
    let dci = format!("{h1} /\\ {h2} -> (forall x. {phi_x})");
    run("DCI instance (thm 2.7 phi)", &dci);
    run("hypothesis-2 standalone", &h2);

    // D-Sup with phi(x) = x < 1
    let dsup = "(exists x. x < 1) /\\ (exists y. forall x. (x < 1 -> x <= y)) -> (exists z. forall y. ((forall x. (x < 1 -> x <= y)) <-> z <= y))";
    run("D-Sup instance (x<1)", dsup);

    // D-Cut with phi = x<0, psi = y>1
    let dcut = "(exists x. exists y. (x < 0 /\\ y > 1)) /\\ (forall x. forall y. ((x < 0 /\\ y > 1) -> x < y)) -> (exists z. forall x. forall y. ((x < 0 /\\ y > 1) -> (x <= z /\\ z <= y)))";
    run("D-Cut instance", dcut);

    // RCF sqrt axiom
    run("rcf_sqrt", "forall x. (x > 0 -> (exists y. y*y = x))");

    // quadratic discriminant shape with parameters + quantifier alternation
    run("forall-exists quadratic", "forall b. exists x. x*x + b*x - 1 = 0");
}
