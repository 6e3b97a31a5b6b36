//! Several point-robot plans between two squares, one per class.

use pathclass::fixtures;
use pathclass::geom::Point;
use pathclass::jointcover::build_joint_cover;
use pathclass::planner::{plan, PlanOptions, PlanOutcome};
use pathclass::robot::RobotSpec;

fn main() -> pathclass::Result<()> {
    let scene = fixtures::two_squares();
    let (jc, _) = build_joint_cover(&scene)?;
    let (s, g) = (Point::new2(-0.6, 0.37), Point::new2(4.6, 0.41));
    let opts = PlanOptions {
        alternatives: 3,
        step: 0.1,
        ..Default::default()
    };
    match plan(&scene, &[s], &[g], &jc, &RobotSpec::point(), &opts)? {
        PlanOutcome::Plans { plans } => {
            for (i, p) in plans.iter().enumerate() {
                println!(
                    "plan {i}: {} waypoints through regions {:?}, valid {}",
                    p.waypoints.len(),
                    p.regions,
                    p.validity.ok()
                );
                println!("        class {}", p.class.join(" "));
            }
        }
        PlanOutcome::Certificate { certificate } => println!("no plan: {:?}", certificate.kind),
    }

    // A walled-off goal has no path at all; the certificate lists what the
    // start can reach.
    let walled = fixtures::walled_goal();
    let (jc, _) = build_joint_cover(&walled)?;
    let out = plan(
        &walled,
        &[Point::new2(1., 1.)],
        &[Point::new2(8., 3.)],
        &jc,
        &RobotSpec::point(),
        &opts,
    )?;
    if let PlanOutcome::Certificate { certificate: c } = out {
        println!(
            "walled goal: {:?} certificate, goal region {} not among reachable {:?}",
            c.kind, c.goal_region, c.reachable
        );
    }
    Ok(())
}
