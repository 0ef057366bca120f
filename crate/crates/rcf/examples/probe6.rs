use rcf::formula::{desugar_conditionals, freshen, parse, push_negations, Formula};
use rcf::qe::{Budget, Engine};
use std::time::Instant;

fn main() {
    let phi = "(y < 0 \\/ y*y < 2)";
    let below = |v: &str| format!("(forall y. (y < {v} -> {phi}))");
    let h2 = format!("(forall x. ({} -> (exists z. (z > x /\\ {}))))", below("x"), below("z"));
    let f = parse(&h2).unwrap();
    let f = push_negations(&desugar_conditionals(&f), true);
    let f = freshen(&f);

    // manual innermost-out elimination with size prints
    fn strip(f: &Formula, prefix: &mut Vec<(bool, String)>) -> Formula {
        match f {
            Formula::Exists(v, b) => { prefix.push((true, v.clone())); strip(b, prefix) }
            Formula::Forall(v, b) => { prefix.push((false, v.clone())); strip(b, prefix) }
            Formula::And(xs) => Formula::and(xs.iter().map(|x| strip(x, prefix)).collect()),
            Formula::Or(xs) => Formula::or(xs.iter().map(|x| strip(x, prefix)).collect()),
            other => other.clone(),
        }
    }
    let mut prefix = Vec::new();
    let matrix = strip(&f, &mut prefix);
    println!("prefix: {:?}", prefix.iter().map(|(e, v)| format!("{}{}", if *e {"E"} else {"A"}, v)).collect::<Vec<_>>());
    let mut eng = Engine::new(Budget { max_nodes: 4_000_000, max_seconds: 120 });
    let mut body = matrix;
    for (is_e, v) in prefix.iter().rev() {
        let t = Instant::now();
        let before = body.size();
        let r = if *is_e {
            eng.eliminate_one(v, &body)
        } else {
            let neg = rcf::qe::negate_nf_pub(&body);
            eng.eliminate_one(v, &neg).map(|out| rcf::qe::negate_nf_pub(&out))
        };
        match r {
            Ok(out) => {
                println!("eliminate {}{}: {} -> {} nodes in {} ms", if *is_e {"E"} else {"A"}, v, before, out.size(), t.elapsed().as_millis());
                body = out;
                if body.size() < 400 { println!("  = {body}"); }
            }
            Err(e) => { println!("eliminate {}{} FAILED after {} ms: {e}", if *is_e {"E"} else {"A"}, v, t.elapsed().as_millis()); return; }
        }
    }
    println!("result: {}", body.ground_eval().map(|b| b.to_string()).unwrap_or_else(|| body.to_string()));
}
