//! Compare point paths around one box: same class, different class, and the
//! crossing word each path gets from vertical rays.

use pathclass::fixtures;
use pathclass::geom::Point;
use pathclass::jointcover::build_joint_cover;
use pathclass::robot::{build_complex, RobotSpec};
use pathclass::states::{h_signature, point_path_representation, same_class};

fn path(pts: &[(f64, f64)]) -> Vec<Point> {
    pts.iter().map(|&(x, y)| Point::new2(x, y)).collect()
}

fn main() -> pathclass::Result<()> {
    let scene = fixtures::single_box();
    let (jc, _) = build_joint_cover(&scene)?;
    let sb = build_complex(&RobotSpec::point())?;

    let paths = [
        (
            "left",
            path(&[(5.03, 1.02), (1.04, 1.07), (1.09, 8.96), (5.02, 9.01)]),
        ),
        (
            "left, wider",
            path(&[(5.03, 1.02), (0.51, 0.43), (0.47, 9.52), (5.02, 9.01)]),
        ),
        (
            "right",
            path(&[(5.03, 1.02), (8.97, 1.06), (9.04, 8.93), (5.02, 9.01)]),
        ),
        (
            "right, twice around",
            path(&[
                (5.03, 1.02),
                (8.97, 1.06),
                (9.04, 8.93),
                (1.06, 9.07),
                (1.02, 1.03),
                (8.91, 0.98),
                (9.07, 8.99),
                (5.02, 9.01),
            ]),
        ),
    ];

    let reps: Vec<_> = paths
        .iter()
        .map(|(_, p)| point_path_representation(p, &jc, &sb))
        .collect::<pathclass::Result<_>>()?;
    for ((name, p), rep) in paths.iter().zip(&reps) {
        println!(
            "{name:>20}: {} states, crossing word {}",
            rep.len(),
            h_signature(p, &scene)?
        );
    }
    println!();
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            let verdict = if same_class(&reps[i], &reps[j])? {
                "same"
            } else {
                "different"
            };
            println!("{:>20} vs {:<20} {verdict}", paths[i].0, paths[j].0);
        }
    }
    Ok(())
}
