use rcf::formula::parse;
use rcf::qe::{Budget, Engine};

fn main() {
    for text in [
        "exists x. x*x*x - 2*x - 5 = 0 /\\ x < 2",
        "exists x. x*x*x - 2*x - 5 = 0 /\\ 2 < x /\\ x < 3",
    ] {
        let f = parse(text).unwrap();
        let mut eng = Engine::new(Budget::default());
        let out = eng.qe_full(&f).unwrap();
        println!("{text}\n  => {out}\n");
    }
}
