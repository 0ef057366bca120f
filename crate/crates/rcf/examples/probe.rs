use rcf::formula::parse;
use rcf::qe::{Budget, Engine};
use std::time::Instant;

fn run(text: &str) {
    let f = parse(text).unwrap();
    let mut eng = Engine::new(Budget { max_nodes: 2_000_000, max_seconds: 60 });
    let t = Instant::now();
    match eng.qe_full(&f) {
        Ok(out) => {
            let ms = t.elapsed().as_millis();
            let val = out.ground_eval().map(|b| if b { "TRUE" } else { "FALSE" }.to_string())
                .unwrap_or_else(|| format!("open[{} nodes]", out.size()));
            println!("{ms:>7} ms  {:>8} nodes  {val:<22} {text}", eng.nodes_used());
        }
        Err(e) => println!("{:>7} ms  ERROR {e}  {text}", t.elapsed().as_millis()),
    }
}

fn main() {
    run("exists x. x*x = 2");
    run("exists x. x*x*x - 2*x - 5 = 0 /\\ 2 < x /\\ x < 3");
    run("exists x. x*x*x*x - 5*x*x + 4 = 0 /\\ x > 2");
    run("exists x. x^5 - 3*x + 1 = 0 /\\ 0 < x /\\ x < 1");
    run("exists x. x^5 + 4*x^4 - 2*x^3 + x - 3 = 0");
    run("exists x. x*x + b*x + c = 0");
    run("exists x. x*x = a");
    run("exists x. x*x*x = a");
    run("forall x. x*x >= 0");
}
