//! A four-link arm threading a gap three link widths wide, and the
//! certificate returned when the gap shrinks to one and a half.

use std::time::Instant;

use pathclass::fixtures;
use pathclass::geom::Point;
use pathclass::jointcover::build_joint_cover;
use pathclass::planner::{plan, PlanOptions, PlanOutcome};

fn horizontal(x0: f64, y: f64) -> Vec<Point> {
    (0..5)
        .map(|i| Point::new2(x0 - 0.8 * i as f64, y))
        .collect()
}

fn main() -> pathclass::Result<()> {
    let w = 0.1;
    let spec = fixtures::four_link_arm(w);
    let (start, goal) = (horizontal(4.0, 2.0), horizontal(8.0, 8.0));

    for factor in [3.0, 1.5] {
        let scene = fixtures::narrow_passage(factor * w);
        let (jc, _) = build_joint_cover(&scene)?;
        let t = Instant::now();
        let out = plan(&scene, &start, &goal, &jc, &spec, &PlanOptions::default())?;
        print!("gap {:.2}: ", factor * w);
        match out {
            PlanOutcome::Plans { plans } => {
                let p = &plans[0];
                println!(
                    "{} waypoints in {:.2?}, max length error {:.1e}, max step {:.3}, {} repaired steps",
                    p.waypoints.len(),
                    t.elapsed(),
                    p.max_length_error,
                    p.max_step,
                    p.repaired_steps
                );
                let mid = &p.waypoints[p.waypoints.len() / 2];
                println!(
                    "  halfway pose {:?}",
                    mid.iter().map(|q| (q.x(), q.y())).collect::<Vec<_>>()
                );
            }
            PlanOutcome::Certificate { certificate: c } => {
                println!(
                    "{:?} certificate (heuristic {}), {} pruned sequences",
                    c.kind,
                    c.heuristic,
                    c.sequences.len()
                );
                if let Some(s) = c.sequences.first() {
                    println!(
                        "  first: {}",
                        serde_json::to_string(s).expect("serializable")
                    );
                }
            }
        }
    }
    Ok(())
}
