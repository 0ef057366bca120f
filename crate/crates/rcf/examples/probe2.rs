use rcf::formula::parse;
use rcf::qe::{Budget, Engine};
use std::time::Instant;

fn main() {
    let f = parse("exists x. x^5 + 4*x^4 - 2*x^3 + x - 3 = 0").unwrap();
    let mut eng = Engine::new(Budget { max_nodes: 3_000_000, max_seconds: 25 });
    let t = Instant::now();
    let r = eng.qe_full(&f);
    println!("{} ms, nodes {}, result {:?}", t.elapsed().as_millis(), eng.nodes_used(), r.map(|f| f.size()));
    rcf::qe::dump_stats();
}
